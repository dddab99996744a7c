#include "nestfill/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nestfill {

namespace {

Json matrix_to_json(const LevelMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(Json(std::vector<std::uint32_t>(m.row(r).begin(), m.row(r).end())));
  return rows;
}

std::uint32_t entry_code(const Json& v, const ChainPtr& chain) {
  if (v.is_number_unsigned()) return v.get<std::uint32_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw std::invalid_argument("negative entry in rows");
    return static_cast<std::uint32_t>(v.get<std::int64_t>());
  }
  if (v.is_string()) {
    if (!chain) throw std::invalid_argument("text entries need a group chain");
    return chain->parse(v.get<std::string>());
  }
  throw std::invalid_argument("row entries must be integers or element text");
}

LevelMatrix matrix_from_json(const Json& rows, const ChainPtr& chain) {
  if (!rows.is_array()) throw std::invalid_argument("rows must be an array of arrays");
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& row : rows) {
    if (!row.is_array()) throw std::invalid_argument("rows must be an array of arrays");
    auto& r = out.emplace_back();
    for (const auto& v : row) r.push_back(entry_code(v, chain));
  }
  return LevelMatrix::from_rows(out);
}

const char* mode_name(StratificationClaim::Mode m) { return m == StratificationClaim::Mode::blocks ? "blocks" : "prefix"; }

std::vector<std::size_t> iota_layers(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i + 1;
  return out;
}

}  // namespace

Json chain_to_json(const GroupChain& chain) {
  Json j;
  if (chain.kind() == ChainKind::field_tower) {
    j["kind"] = "field";
    j["p"] = chain.characteristic();
    j["u_chain"] = chain.degree_chain();
    j["modulus"] = chain.field().modulus();
    j["nesting"] = chain.nesting() == TowerNesting::subfield ? "subfield" : "degree";
    return j;
  }
  j["kind"] = "omega";
  Json bases = Json::array();
  for (const auto& b : chain.bases()) {
    Json e;
    if (b.is_field()) {
      e["field"] = {{"p", b.field()->characteristic()}, {"u", b.field()->degree()}, {"modulus", b.field()->modulus()}};
    } else {
      e["zn"] = b.order();
    }
    bases.push_back(e);
  }
  j["bases"] = bases;
  return j;
}

ChainPtr chain_from_json(const Json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "field") {
      std::optional<std::vector<std::uint32_t>> modulus;
      if (j.contains("modulus")) modulus = j.at("modulus").get<std::vector<std::uint32_t>>();
      const auto nesting = j.value("nesting", std::string("degree"));
      if (nesting != "degree" && nesting != "subfield") throw std::invalid_argument("unknown nesting '" + nesting + "'");
      return GroupChain::field_tower(j.at("p").get<std::uint32_t>(), j.at("u_chain").get<std::vector<std::uint32_t>>(),
                                     modulus, nesting == "subfield" ? TowerNesting::subfield : TowerNesting::degree);
    }
    if (kind == "omega") {
      std::vector<BaseGroup> bases;
      for (const auto& b : j.at("bases")) {
        if (b.contains("zn")) {
          bases.push_back(BaseGroup::cyclic(b.at("zn").get<std::uint32_t>()));
        } else if (b.contains("field")) {
          const auto& f = b.at("field");
          std::optional<std::vector<std::uint32_t>> modulus;
          if (f.contains("modulus")) modulus = f.at("modulus").get<std::vector<std::uint32_t>>();
          bases.push_back(
              BaseGroup::additive(make_field(f.at("p").get<std::uint32_t>(), f.at("u").get<std::uint32_t>(), modulus)));
        } else {
          throw std::invalid_argument("base group needs \"zn\" or \"field\"");
        }
      }
      return GroupChain::omega_ring(std::move(bases));
    }
    throw std::invalid_argument("unknown chain kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed chain descriptor: ") + e.what());
  }
}

DesignFile design_from_nested(const NestedArray& a, const std::vector<SlicedArray>& slices, std::string method) {
  const bool dm = a.role == ArrayRole::difference_matrix;
  DesignFile d;
  d.type = dm ? "ndm" : "noa";
  d.method = std::move(method);
  d.chain = a.top.chain;
  d.layer = d.chain->layers();
  d.rows = a.top.data;
  d.s = d.chain->order();
  if (!dm) d.t_claimed = a.strength;
  d.layer_prefixes = a.layer_rows;
  d.projection_layers = a.projection_layers;
  for (const auto& s : slices) {
    if (!(s.top == a.top)) throw std::invalid_argument("slice family over a different top array");
    d.slices.push_back({s.slice_rows, s.layer});
  }
  return d;
}

DesignFile design_from_sliced(const SlicedArray& a, std::string method) {
  const bool dm = a.role == ArrayRole::difference_matrix;
  DesignFile d;
  d.type = dm ? "sdm" : "soa";
  d.method = std::move(method);
  d.chain = a.top.chain;
  d.layer = d.chain->layers();
  d.rows = a.top.data;
  d.s = d.chain->order();
  if (!dm) d.t_claimed = a.strength;
  d.slices.push_back({a.slice_rows, a.layer});
  return d;
}

DesignFile design_from_lifted(const LiftedDesign& l, const ChainPtr& chain, std::string type, std::string method) {
  DesignFile d;
  d.type = std::move(type);
  d.method = std::move(method);
  d.chain = chain;
  d.layer = chain->layers();
  d.s = l.levels;
  d.stage = l.design ? "full" : "relabel-only";
  d.rows = l.design ? *l.design : l.relabeled;
  if (l.design) d.relabeled = l.relabeled;
  d.claims = l.claims;
  d.permutations = l.permutations;
  d.lift_seed = l.seed;
  return d;
}

NestedArray nested_view(const DesignFile& d) {
  NestedArray a;
  a.top = GroupMatrix{d.chain, d.rows};
  a.layer_rows = d.layer_prefixes;
  a.projection_layers = d.projection_layers.empty() ? iota_layers(d.layer_prefixes.size()) : d.projection_layers;
  a.strength = d.t_claimed.value_or(2);
  a.role = d.difference_matrix() ? ArrayRole::difference_matrix : ArrayRole::orthogonal_array;
  return a;
}

std::vector<SlicedArray> sliced_views(const DesignFile& d) {
  std::vector<SlicedArray> out;
  for (const auto& s : d.slices)
    out.push_back({GroupMatrix{d.chain, d.rows}, s.slice_size, s.collapse_layer, d.t_claimed.value_or(2),
                   d.difference_matrix() ? ArrayRole::difference_matrix : ArrayRole::orthogonal_array});
  return out;
}

LiftedDesign lifted_view(const DesignFile& d) {
  LiftedDesign l;
  l.levels = d.s;
  if (d.stage == "full") {
    if (!d.relabeled) throw std::invalid_argument("full-stage design without relabeled rows");
    l.relabeled = *d.relabeled;
    l.design = d.rows;
  } else {
    l.relabeled = d.rows;
  }
  l.claims = d.claims;
  l.permutations = d.permutations;
  l.seed = d.lift_seed;
  return l;
}

std::vector<VerificationReport> verify_design(const DesignFile& d) {
  std::vector<VerificationReport> out;
  if (d.rows.empty()) {
    out.push_back(VerificationReport::fail("design", "empty design"));
    return out;
  }
  if (!d.symbolic()) {
    out.push_back(verify_lifted(lifted_view(d)));
    return out;
  }
  for (std::size_t r = 0; r < d.rows.rows(); ++r)
    for (std::size_t c = 0; c < d.rows.cols(); ++c)
      if (d.rows(r, c) >= d.chain->size(d.layer)) {
        out.push_back(VerificationReport::fail("alphabet", "entry " + std::to_string(d.rows(r, c)) + " outside F_" +
                                                              std::to_string(d.layer)));
        return out;
      }
  if (!d.layer_prefixes.empty()) out.push_back(verify_nested(nested_view(d)));
  for (const auto& s : sliced_views(d)) out.push_back(verify_sliced(s));
  if (d.layer_prefixes.empty() && d.slices.empty()) {
    if (d.difference_matrix()) {
      const auto rho = chain_projection(*d.chain, d.layer, true);
      out.push_back(check_difference_matrix(apply_projection(d.rows, rho), *rho.group));
    } else {
      out.push_back(check_oa_strength(d.rows, d.chain->size(d.layer), d.t_claimed.value_or(2)));
    }
  }
  return out;
}

Json report_to_json(const VerificationReport& r) {
  Json j;
  j["check"] = r.check;
  j["pass"] = r.pass;
  if (!r.pass) {
    j["detail"] = r.detail;
    if (r.counterexample) {
      std::vector<std::size_t> cols;
      for (auto c : r.counterexample->columns) cols.push_back(c + 1);
      j["counterexample"] = {{"columns", cols},
                             {"levels", r.counterexample->levels},
                             {"observed", r.counterexample->observed},
                             {"expected", r.counterexample->expected}};
    }
  }
  return j;
}

namespace {

Json design_meta(const DesignFile& d) {
  Json j;
  j["format"] = kDesignFormat;
  j["tool_version"] = kToolVersion;
  j["type"] = d.type;
  j["method"] = d.method;
  j["chain"] = chain_to_json(*d.chain);
  j["layer"] = d.layer;
  j["n"] = d.rows.rows();
  j["m"] = d.rows.cols();
  j["s"] = d.s;
  if (d.t_claimed) j["t_claimed"] = *d.t_claimed;
  if (!d.layer_prefixes.empty()) {
    j["layer_prefixes"] = d.layer_prefixes;
    j["projection_layers"] = d.projection_layers;
  }
  if (!d.slices.empty()) {
    Json slices = Json::array();
    for (const auto& s : d.slices) slices.push_back({{"slice_size", s.slice_size}, {"collapse_layer", s.collapse_layer}});
    j["slices"] = slices;
  }
  if (!d.symbolic()) {
    j["stage"] = d.stage;
    Json claims = Json::array();
    for (const auto& c : d.claims) claims.push_back({{"mode", mode_name(c.mode)}, {"rows", c.rows}, {"grid", c.grid}});
    j["stratification"] = claims;
    j["permutations"] = d.permutations;
    j["permutation_seeds"] = d.permutation_seeds;
    if (d.lift_seed) j["lift_seed"] = *d.lift_seed;
    if (d.relabeled) j["relabeled_rows"] = matrix_to_json(*d.relabeled);
  }
  j["job"] = d.job;
  return j;
}

}  // namespace

Json design_to_json(const DesignFile& d) {
  Json j = design_meta(d);
  j["rows"] = matrix_to_json(d.rows);
  if (d.symbolic()) {
    std::vector<char> used(d.chain->order(), 0);
    for (auto v : d.rows.data()) used.at(v) = 1;
    Json symbols = Json::object();
    for (Code c = 0; c < used.size(); ++c)
      if (used[c]) symbols[std::to_string(c)] = d.chain->format(c);
    j["symbols"] = symbols;
  }
  return j;
}

DesignFile design_from_json(const Json& j) {
  try {
    if (j.value("format", std::string()) != kDesignFormat) throw std::invalid_argument("not a nestfill design file");
    DesignFile d;
    d.type = j.at("type").get<std::string>();
    static const std::vector<std::string> kTypes{"oa", "dm", "noa", "ndm", "soa", "sdm", "nsfd", "ssfd"};
    if (std::find(kTypes.begin(), kTypes.end(), d.type) == kTypes.end())
      throw std::invalid_argument("unknown design type '" + d.type + "'");
    d.method = j.value("method", std::string());
    d.chain = chain_from_json(j.at("chain"));
    d.layer = j.value("layer", d.chain->layers());
    if (d.layer < 1 || d.layer > d.chain->layers()) throw std::invalid_argument("layer out of range");
    d.s = j.at("s").get<std::uint32_t>();
    if (j.contains("t_claimed")) d.t_claimed = j.at("t_claimed").get<std::uint32_t>();
    if (j.contains("layer_prefixes")) {
      d.layer_prefixes = j.at("layer_prefixes").get<std::vector<std::size_t>>();
      d.projection_layers = j.value("projection_layers", iota_layers(d.layer_prefixes.size()));
      if (d.projection_layers.size() != d.layer_prefixes.size())
        throw std::invalid_argument("projection_layers and layer_prefixes differ in length");
      for (auto l : d.projection_layers)
        if (l < 1 || l > d.chain->layers()) throw std::invalid_argument("projection layer out of range");
    }
    if (j.contains("slices"))
      for (const auto& s : j.at("slices"))
        d.slices.push_back({s.at("slice_size").get<std::size_t>(), s.at("collapse_layer").get<std::size_t>()});
    const bool symbolic = d.symbolic();
    d.rows = matrix_from_json(j.at("rows"), symbolic ? d.chain : nullptr);
    if (d.rows.rows() != j.value("n", d.rows.rows()) || d.rows.cols() != j.value("m", d.rows.cols()))
      throw std::invalid_argument("row data does not match n and m");
    if (!symbolic) {
      d.stage = j.value("stage", std::string("full"));
      if (d.stage != "full" && d.stage != "relabel-only") throw std::invalid_argument("unknown stage '" + d.stage + "'");
      for (const auto& c : j.value("stratification", Json::array())) {
        const auto mode = c.at("mode").get<std::string>();
        if (mode != "prefix" && mode != "blocks") throw std::invalid_argument("unknown stratification mode");
        d.claims.push_back({mode == "blocks" ? StratificationClaim::Mode::blocks : StratificationClaim::Mode::prefix,
                            c.at("rows").get<std::size_t>(), c.at("grid").get<std::uint32_t>()});
      }
      d.permutations = j.value("permutations", std::vector<Permutation>{});
      d.permutation_seeds = j.value("permutation_seeds", std::vector<std::uint64_t>{});
      if (j.contains("lift_seed")) d.lift_seed = j.at("lift_seed").get<std::uint64_t>();
      if (j.contains("relabeled_rows")) d.relabeled = matrix_from_json(j.at("relabeled_rows"), nullptr);
    } else {
      for (auto v : d.rows.data())
        if (v >= d.chain->order()) throw std::invalid_argument("code " + std::to_string(v) + " outside the chain");
    }
    d.job = j.value("job", Json::object());
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed design file: ") + e.what());
  }
}

std::string design_to_csv(const DesignFile& d) {
  std::ostringstream out;
  out << "# meta: " << design_meta(d).dump() << "\n";
  for (std::size_t c = 0; c < d.rows.cols(); ++c) out << (c ? "," : "") << "x" << c + 1;
  out << "\n";
  for (std::size_t r = 0; r < d.rows.rows(); ++r) {
    for (std::size_t c = 0; c < d.rows.cols(); ++c) out << (c ? "," : "") << d.rows(r, c);
    out << "\n";
  }
  return out.str();
}

DesignFile design_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::optional<Json> meta;
  bool header = false;
  Json rows = Json::array();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string tag = "# meta:";
      if (line.rfind(tag, 0) == 0) {
        try {
          meta = Json::parse(line.substr(tag.size()));
        } catch (const nlohmann::json::exception& e) {
          throw std::invalid_argument(std::string("malformed CSV metadata: ") + e.what());
        }
      }
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    Json row = Json::array();
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        const auto v = std::stoull(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw std::invalid_argument("non-integer CSV cell '" + cell + "'");
      }
    }
    rows.push_back(row);
  }
  if (!meta) throw std::invalid_argument("CSV design lacks a '# meta:' line");
  (*meta)["rows"] = rows;
  return design_from_json(*meta);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

DesignFile read_design(const std::filesystem::path& path) {
  const auto text = read_text(path);
  if (path.extension() == ".csv" || (!text.empty() && text.front() == '#')) return design_from_csv(text);
  try {
    return design_from_json(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_design(const DesignFile& d, const std::filesystem::path& path, const std::string& format) {
  if (format == "json") {
    write_text(path, design_to_json(d).dump(2) + "\n");
  } else if (format == "csv") {
    write_text(path, design_to_csv(d));
  } else {
    throw std::invalid_argument("unknown format '" + format + "'");
  }
}

GroupMatrix read_group_matrix(const std::filesystem::path& path, const ChainPtr& chain) {
  const auto text = read_text(path);
  if (path.extension() == ".csv") {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#' || line.front() == 'x') continue;
      auto& row = rows.emplace_back();
      std::istringstream cells(line);
      std::string cell;
      while (std::getline(cells, cell, ',')) row.push_back(cell);
    }
    return GroupMatrix::parse(chain, rows);
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  const Json& rows = j.is_object() ? j.at("rows") : j;
  const auto m = matrix_from_json(rows, chain);
  return GroupMatrix::from_codes(chain, m.to_rows());
}

std::vector<std::filesystem::path> write_scatter(const DesignFile& d, const std::filesystem::path& dir) {
  if (d.rows.empty()) throw std::invalid_argument("cannot export an empty design");
  if (d.rows.cols() < 2) throw std::invalid_argument("scatter export needs at least two columns");
  std::vector<std::size_t> layer(d.rows.rows(), 1);
  if (!d.layer_prefixes.empty()) {
    for (std::size_t r = 0; r < d.rows.rows(); ++r) {
      std::size_t l = 0;
      while (l < d.layer_prefixes.size() && d.layer_prefixes[l] <= r) ++l;
      layer[r] = l + 1;
    }
  } else if (!d.slices.empty()) {
    for (std::size_t r = 0; r < d.rows.rows(); ++r) layer[r] = r / d.slices.front().slice_size + 1;
  } else {
    // Lifted designs: nested prefixes or the finest slice blocks from the claims.
    std::vector<std::size_t> prefixes;
    std::size_t block = 0;
    for (const auto& c : d.claims) {
      if (c.mode == StratificationClaim::Mode::prefix && c.rows < d.rows.rows()) prefixes.push_back(c.rows);
      if (c.mode == StratificationClaim::Mode::blocks && (block == 0 || c.rows < block)) block = c.rows;
    }
    for (std::size_t r = 0; r < d.rows.rows(); ++r) {
      if (!prefixes.empty()) {
        std::size_t l = 0;
        while (l < prefixes.size() && prefixes[l] <= r) ++l;
        layer[r] = l + 1;
      } else if (block) {
        layer[r] = r / block + 1;
      }
    }
  }
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (std::size_t a = 0; a < d.rows.cols(); ++a)
    for (std::size_t b = a + 1; b < d.rows.cols(); ++b) {
      std::ostringstream out;
      out << "run,x" << a + 1 << ",x" << b + 1 << ",layer\n";
      for (std::size_t r = 0; r < d.rows.rows(); ++r)
        out << r + 1 << "," << d.rows(r, a) << "," << d.rows(r, b) << "," << layer[r] << "\n";
      const auto path = dir / ("x" + std::to_string(a + 1) + "_x" + std::to_string(b + 1) + ".csv");
      write_text(path, out.str());
      written.push_back(path);
    }
  return written;
}

}  // namespace nestfill
