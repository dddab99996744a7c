#include "nestfill/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "nestfill/io.hpp"

namespace nestfill {

namespace {

struct SpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("NESTFILL_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw SpecError("NESTFILL_SEED must be an unsigned integer");
  }
  return 0;
}

struct Options {
  // construct
  std::string method;
  std::optional<std::uint32_t> p;
  std::vector<std::uint32_t> u_chain;
  std::vector<std::uint32_t> modulus;
  std::string tower = "auto";
  std::string bases;
  std::string chain_json;
  std::uint32_t k = 2;
  std::optional<std::uint32_t> t;
  std::string columns;
  std::vector<std::string> inputs;
  std::string oa_path;
  std::string ndm_out;
  // lift
  std::string mode;
  std::string perms;
  std::optional<std::uint64_t> perm_seed;
  std::optional<std::uint64_t> seed;
  std::string stage = "full";
  std::size_t collapse = 1;
  std::optional<std::size_t> slice_layer;
  std::string group_order;
  // shared
  std::string in;
  std::string out;
  std::string format = "json";
  std::string report;
};

bool needs_subfield(const std::string& method) {
  return method == "subfield-noa" || method == "bush-noa" || method == "ndm-product";
}

ChainPtr field_chain(const Options& o) {
  if (!o.chain_json.empty()) {
    try {
      return chain_from_json(Json::parse(o.chain_json));
    } catch (const nlohmann::json::exception& e) {
      throw SpecError(std::string("--chain: ") + e.what());
    }
  }
  if (!o.p || o.u_chain.empty()) throw SpecError("--p and --u are required for " + o.method);
  TowerNesting nesting = TowerNesting::degree;
  if (o.tower == "subfield" || (o.tower == "auto" && needs_subfield(o.method) && o.u_chain.front() > 1))
    nesting = TowerNesting::subfield;
  std::optional<std::vector<std::uint32_t>> modulus;
  if (!o.modulus.empty()) modulus = o.modulus;
  return GroupChain::field_tower(*o.p, o.u_chain, modulus, nesting);
}

ChainPtr omega_chain(const Options& o) {
  if (!o.chain_json.empty()) {
    try {
      return chain_from_json(Json::parse(o.chain_json));
    } catch (const nlohmann::json::exception& e) {
      throw SpecError(std::string("--chain: ") + e.what());
    }
  }
  if (o.bases.empty()) throw SpecError("--bases (e.g. zn:6,zn:2 or gf:2:2,zn:3) is required for " + o.method);
  std::vector<BaseGroup> bases;
  for (const auto& item : split(o.bases, ',')) {
    const auto parts = split(item, ':');
    try {
      if (parts.size() == 2 && parts[0] == "zn") {
        bases.push_back(BaseGroup::cyclic(static_cast<std::uint32_t>(std::stoul(parts[1]))));
      } else if (parts.size() == 3 && parts[0] == "gf") {
        bases.push_back(BaseGroup::additive(make_field(static_cast<std::uint32_t>(std::stoul(parts[1])),
                                                       static_cast<std::uint32_t>(std::stoul(parts[2])))));
      } else {
        throw SpecError("bad base group '" + item + "'");
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const SpecError*>(&e)) throw;
      throw SpecError("bad base group '" + item + "': " + e.what());
    }
  }
  return GroupChain::omega_ring(std::move(bases));
}

std::optional<std::vector<std::vector<Code>>> parse_columns(const std::string& text, const GroupChain& chain) {
  if (text.empty()) return std::nullopt;
  std::vector<std::vector<Code>> cols;
  for (const auto& col : split(text, ';')) {
    auto& c = cols.emplace_back();
    for (const auto& v : split(col, ',')) c.push_back(chain.parse(v));
  }
  return cols;
}

std::vector<Permutation> parse_perms(const std::string& text) {
  std::vector<Permutation> perms;
  for (const auto& block : split(text, ';')) {
    auto& p = perms.emplace_back();
    for (const auto& v : split(block, ',')) {
      try {
        p.push_back(static_cast<std::uint32_t>(std::stoul(v)));
      } catch (const std::exception&) {
        throw SpecError("bad permutation entry '" + v + "'");
      }
    }
  }
  return perms;
}

Json job_json(const std::string& command, const Options& o) {
  Json j;
  j["command"] = command;
  if (command == "construct") {
    j["method"] = o.method;
    if (o.p) j["p"] = *o.p;
    if (!o.u_chain.empty()) j["u"] = o.u_chain;
    if (!o.modulus.empty()) j["modulus"] = o.modulus;
    j["tower"] = o.tower;
    if (!o.bases.empty()) j["bases"] = o.bases;
    if (!o.chain_json.empty()) j["chain"] = o.chain_json;
    j["k"] = o.k;
    if (o.t) j["t"] = *o.t;
    if (!o.columns.empty()) j["columns"] = o.columns;
    if (!o.inputs.empty()) j["inputs"] = o.inputs;
    if (!o.oa_path.empty()) j["oa"] = o.oa_path;
  } else if (command == "lift") {
    j["in"] = o.in;
    j["mode"] = o.mode;
    j["stage"] = o.stage;
    if (!o.perms.empty()) j["perms"] = o.perms;
    if (o.perm_seed) j["perm_seed"] = *o.perm_seed;
    if (o.seed) j["seed"] = *o.seed;
    if (o.mode == "ssfd-grouped") {
      j["collapse"] = o.collapse;
      if (o.slice_layer) j["slice_layer"] = *o.slice_layer;
      if (!o.group_order.empty()) j["group_order"] = o.group_order;
    }
  }
  return j;
}

void emit_design(const DesignFile& d, const Options& o, std::ostream& out) {
  if (o.out.empty()) {
    out << (o.format == "csv" ? design_to_csv(d) : design_to_json(d).dump(2) + "\n");
  } else {
    write_design(d, o.out, o.format);
  }
}

/// Re-verifies a design and writes the JSON report to report_path, or to
/// sink when no path is given; returns the exit code.
int report(const DesignFile& d, const std::string& report_path, std::ostream& sink) {
  const auto reports = verify_design(d);
  Json j;
  j["type"] = d.type;
  j["method"] = d.method;
  bool pass = true;
  Json checks = Json::array();
  for (const auto& r : reports) {
    pass = pass && r.pass;
    checks.push_back(report_to_json(r));
  }
  j["pass"] = pass;
  j["checks"] = checks;
  const auto text = j.dump(2) + "\n";
  if (!report_path.empty()) {
    write_text(report_path, text);
  } else {
    sink << text;
  }
  return pass ? kExitOk : kExitVerificationFailure;
}

DesignFile construct(const Options& o) {
  const auto& m = o.method;
  if (m == "rh-noa" || m == "subfield-noa" || m == "bush-noa") {
    const auto chain = field_chain(o);
    NoaFamily f;
    if (m == "rh-noa") {
      f = construct_noa_rh(chain, o.k, parse_columns(o.columns, *chain), o.t.value_or(2));
    } else if (m == "subfield-noa") {
      f = construct_noa_subfield(chain, o.k, parse_columns(o.columns, *chain), o.t.value_or(2));
    } else {
      if (!o.columns.empty()) throw SpecError("bush-noa uses its own coefficient matrix; drop --columns");
      f = construct_noa_bush(chain, o.k);
    }
    return design_from_nested(f.nested, f.sliced, m);
  }
  if (m == "ndm-product") {
    const auto chain = field_chain(o);
    const auto a = o.oa_path.empty() ? rao_hamming_oa(chain, o.k) : read_group_matrix(o.oa_path, chain);
    const auto f = construct_from_ndm(chain, a);
    if (!o.ndm_out.empty()) {
      auto d = design_from_nested(f.ndm, f.delta_slices, m);
      d.job = job_json("construct", o);
      write_design(d, o.ndm_out, o.format);
    }
    return design_from_nested(f.noa, f.sliced, m);
  }
  if (m == "kron-soa" || m == "kron-noa" || m == "kron-ndm") {
    const auto chain = omega_chain(o);
    std::vector<GroupMatrix> inputs;
    for (const auto& path : o.inputs) inputs.push_back(read_group_matrix(path, chain));
    if (inputs.empty()) throw SpecError("--inputs lists the input arrays, first layer first");
    if (m == "kron-ndm") {
      const auto f = construct_ndm_kron(chain, inputs);
      return design_from_nested(f.nested, f.sliced, m);
    }
    if (m == "kron-noa") {
      const auto f = construct_noa_kron_multi(chain, inputs, o.t.value_or(2));
      return design_from_nested(f.nested, f.sliced, m);
    }
    if (inputs.size() != 2) throw SpecError("kron-soa takes exactly two inputs");
    const auto soa = construct_soa_kron(chain, inputs[1], inputs[0], o.t.value_or(2));
    // All prefix families (B^l, B; rho_1, rho_2) share one top: record them
    // as a single prefix chain checked under rho_1, with rho_2 on the top.
    NestedArray all;
    all.top = soa.sliced.top;
    all.strength = soa.sliced.strength;
    for (const auto& p : soa.prefixes) {
      all.layer_rows.push_back(p.layer_rows.front());
      all.projection_layers.push_back(1);
    }
    all.layer_rows.push_back(all.top.rows());
    all.projection_layers.push_back(2);
    auto d = design_from_nested(all, {soa.sliced}, m);
    d.type = "soa";
    return d;
  }
  throw SpecError("unknown method '" + m + "'");
}

DesignFile lift(const Options& o) {
  const auto in = read_design(o.in);
  if (!in.symbolic() || in.difference_matrix())
    throw SpecError("lift needs an orthogonal-array design (noa or soa), got '" + in.type + "'");
  const LiftStage stage = o.stage == "relabel-only" ? LiftStage::relabel_only : LiftStage::full;
  const std::uint64_t seed = o.seed ? *o.seed : default_seed();
  const auto& sizes = in.chain->layer_sizes();

  std::vector<std::uint64_t> perm_seeds;
  auto permutations = [&](bool nested) {
    if (!o.perms.empty()) return parse_perms(o.perms);
    const std::uint64_t base = o.perm_seed ? *o.perm_seed : seed;
    std::vector<Permutation> perms;
    for (std::size_t c = 0; c < in.rows.cols(); ++c) {
      perm_seeds.push_back(derive_seed(base, c));
      perms.push_back(nested ? gen_nested_permutation(sizes, perm_seeds.back())
                             : gen_sliced_permutation(sizes, perm_seeds.back()));
    }
    return perms;
  };

  LiftedDesign lifted;
  std::string type;
  if (o.mode == "nsfd") {
    if (in.layer_prefixes.empty()) throw SpecError("nsfd lifting needs a nested design (layer_prefixes)");
    lifted = build_nsfd(nested_view(in), permutations(true), stage, seed);
    type = "nsfd";
  } else if (o.mode == "ssfd-multi") {
    NoaFamily family{nested_view(in), sliced_views(in)};
    if (family.nested.layer_rows.empty())
      family.nested = {family.nested.top, {in.rows.rows()}, {in.layer}, in.t_claimed.value_or(2),
                       ArrayRole::orthogonal_array};
    lifted = build_ssfd_multi(family, permutations(false), stage, seed);
    type = "ssfd";
  } else if (o.mode == "ssfd-grouped") {
    if (!o.perms.empty() || o.perm_seed) throw SpecError("ssfd-grouped relabels by groups; permutations do not apply");
    const std::size_t want = o.slice_layer.value_or(o.collapse);
    const auto views = sliced_views(in);
    const SlicedArray* soa = nullptr;
    for (const auto& v : views)
      if (v.layer == want) soa = &v;
    if (!soa) throw SpecError("design has no slice family with collapse layer " + std::to_string(want));
    std::optional<std::vector<Code>> order;
    if (!o.group_order.empty()) {
      order.emplace();
      for (const auto& v : split(o.group_order, ',')) order->push_back(in.chain->parse(v));
    }
    lifted = build_ssfd_grouped(*soa, o.collapse, order, stage, seed);
    type = "ssfd";
  } else {
    throw SpecError("unknown lift mode '" + o.mode + "'");
  }
  auto d = design_from_lifted(lifted, in.chain, type, o.mode);
  d.permutation_seeds = perm_seeds;
  return d;
}

void add_output_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "Output path (default: stdout)");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--report", o.report, "Write the verification report here");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nested and sliced orthogonal arrays, difference matrices and space-filling designs", "nestfill"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;

  auto* construct_cmd = app.add_subcommand("construct", "Build an array family and verify it");
  construct_cmd
      ->add_option("--method", o.method, "rh-noa | subfield-noa | bush-noa | ndm-product | kron-soa | kron-noa | kron-ndm")
      ->required()
      ->check(CLI::IsMember({"rh-noa", "subfield-noa", "bush-noa", "ndm-product", "kron-soa", "kron-noa", "kron-ndm"}));
  construct_cmd->add_option("--p", o.p, "Characteristic of the field tower");
  construct_cmd->add_option("--u", o.u_chain, "Degree chain u_1,...,u_I")->delimiter(',');
  construct_cmd->add_option("--modulus", o.modulus, "Irreducible modulus of GF(p^u_I), lowest degree first")
      ->delimiter(',');
  construct_cmd->add_option("--tower", o.tower, "Layer nesting of the field tower")
      ->check(CLI::IsMember({"auto", "degree", "subfield"}));
  construct_cmd->add_option("--bases", o.bases, "Omega ring base groups, e.g. gf:2:2,zn:3,zn:2");
  construct_cmd->add_option("--chain", o.chain_json, "Chain descriptor as JSON");
  construct_cmd->add_option("--k", o.k, "Dimension of the row space (strength for bush-noa)");
  construct_cmd->add_option("--t", o.t, "Claimed strength");
  construct_cmd->add_option("--columns", o.columns, "Explicit generator columns: c11,c21,..;c12,c22,..");
  construct_cmd->add_option("--inputs", o.inputs, "Input arrays, first layer first")->delimiter(',');
  construct_cmd->add_option("--oa", o.oa_path, "Input OA over F_I for ndm-product");
  construct_cmd->add_option("--ndm-out", o.ndm_out, "Also write the difference-matrix family (ndm-product)");
  add_output_options(construct_cmd, o);

  auto* lift_cmd = app.add_subcommand("lift", "Relabel and lift a design to a nested or sliced space-filling design");
  lift_cmd->add_option("--in", o.in, "Design file")->required();
  lift_cmd->add_option("--mode", o.mode, "nsfd | ssfd-grouped | ssfd-multi")
      ->required()
      ->check(CLI::IsMember({"nsfd", "ssfd-grouped", "ssfd-multi"}));
  lift_cmd->add_option("--perms", o.perms, "One permutation per column: a,b,..;c,d,..");
  lift_cmd->add_option("--perm-seed", o.perm_seed, "Seed for generated permutations");
  lift_cmd->add_option("--seed", o.seed, "Lifting seed (default: $NESTFILL_SEED or 0)");
  lift_cmd->add_option("--stage", o.stage, "Stop after relabeling or lift fully")
      ->check(CLI::IsMember({"relabel-only", "full"}));
  lift_cmd->add_option("--collapse", o.collapse, "Collapse layer j for ssfd-grouped");
  lift_cmd->add_option("--slice-layer", o.slice_layer, "Slice family i for ssfd-grouped (default: j)");
  lift_cmd->add_option("--group-order", o.group_order, "Order of the groups for ssfd-grouped");
  add_output_options(lift_cmd, o);

  auto* verify_cmd = app.add_subcommand("verify", "Re-run every oracle a design file claims");
  verify_cmd->add_option("--in", o.in, "Design file")->required();
  verify_cmd->add_option("--out", o.report, "Write the JSON report here (default: stdout)");

  auto* export_cmd = app.add_subcommand("export", "Convert a design file");
  export_cmd->add_option("--in", o.in, "Design file")->required();
  export_cmd->add_option("--format", o.format, "csv | json | scatter")
      ->check(CLI::IsMember({"csv", "json", "scatter"}));
  export_cmd->add_option("--out", o.out, "Output file, or directory for scatter")->required();

  std::vector<std::string> argv_storage{"nestfill"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitSpecError;
  }

  try {
    if (construct_cmd->parsed()) {
      auto d = construct(o);
      d.job = job_json("construct", o);
      emit_design(d, o, out);
      // With the design on stdout the report goes to stderr.
      return report(d, o.report, o.out.empty() ? err : out);
    }
    if (lift_cmd->parsed()) {
      auto d = lift(o);
      d.job = job_json("lift", o);
      emit_design(d, o, out);
      // With the design on stdout the report goes to stderr.
      return report(d, o.report, o.out.empty() ? err : out);
    }
    if (verify_cmd->parsed()) {
      return report(read_design(o.in), o.report, out);
    }
    if (export_cmd->parsed()) {
      const auto d = read_design(o.in);
      if (d.rows.empty()) throw SpecError("cannot export an empty design");
      if (o.format == "scatter") {
        for (const auto& p : write_scatter(d, o.out)) out << p.string() << "\n";
      } else {
        write_design(d, o.out, o.format);
      }
      return kExitOk;
    }
  } catch (const VerificationFailure& e) {
    Json j;
    j["pass"] = false;
    j["checks"] = Json::array({report_to_json(e.report())});
    err << "verification failed: " << e.what() << "\n" << j.dump(2) << "\n";
    return kExitVerificationFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitSpecError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitSpecError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitSpecError;
}

}  // namespace nestfill
