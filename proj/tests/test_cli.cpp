#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "nestfill/cli.hpp"
#include "nestfill/io.hpp"
#include "reference_tables.hpp"
#include "test_support.hpp"

using namespace nestfill;
using nestfill::testing::data_path;
using nestfill::testing::scratch_dir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string perm_text(const std::vector<std::vector<std::uint32_t>>& perms) {
  std::string text;
  for (const auto& p : perms) {
    if (!text.empty()) text += ';';
    for (std::size_t i = 0; i < p.size(); ++i) text += (i ? "," : "") + std::to_string(p[i]);
  }
  return text;
}

std::string rh_table(const std::filesystem::path& dir) {
  const auto path = (dir / "rh.json").string();
  REQUIRE(run({"construct", "--method", "rh-noa", "--p", "2", "--u", "1,2,3", "--k", "2", "--out", path}).code ==
          kExitOk);
  return path;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("construct reproduces the GF(8) table") {
    const auto dir = scratch_dir("cli_construct");
    const auto path = rh_table(dir);
    const auto d = read_design(path);
    CHECK(d.type == "noa");
    CHECK(nested_view(d).top.format() == reference::kGf8ThreeLayerTop);
    CHECK(d.job["method"] == "rh-noa");

    // Design on stdout, report on stderr.
    const auto r = run({"construct", "--method", "rh-noa", "--p", "2", "--u", "1,2,3", "--k", "2"});
    CHECK(r.code == kExitOk);
    const auto j = Json::parse(r.out);
    CHECK(j["rows"].size() == 64);
    CHECK(Json::parse(r.err)["pass"] == true);
    // Output is byte-identical across runs.
    CHECK(run({"construct", "--method", "rh-noa", "--p", "2", "--u", "1,2,3", "--k", "2"}).out == r.out);
  }

  TEST_CASE("construct methods") {
    const auto dir = scratch_dir("cli_methods");
    CHECK(run({"construct", "--method", "subfield-noa", "--p", "2", "--u", "2,4", "--k", "2", "--out",
               (dir / "sub.json").string()})
              .code == kExitOk);
    CHECK(read_design(dir / "sub.json").rows.rows() == 256);
    CHECK(run({"construct", "--method", "bush-noa", "--p", "3", "--u", "1,2", "--k", "3", "--out",
               (dir / "bush.json").string()})
              .code == kExitOk);
    CHECK(read_design(dir / "bush.json").t_claimed == 3u);
    CHECK(run({"construct", "--method", "bush-noa", "--p", "2", "--u", "1,2", "--k", "3", "--out",
               (dir / "bush2.json").string()})
              .code == kExitOk);
    CHECK(run({"construct", "--method", "ndm-product", "--p", "2", "--u", "1,2", "--k", "2", "--out",
               (dir / "ndm.json").string(), "--ndm-out", (dir / "ndm_d.json").string()})
              .code == kExitOk);
    CHECK(read_design(dir / "ndm.json").rows.rows() == 64);
    CHECK(read_design(dir / "ndm_d.json").type == "ndm");
    CHECK(run({"construct", "--method", "rh-noa", "--p", "2", "--u", "1,2,3", "--k", "3", "--columns",
               "1,0,0;0,1,0;0,0,1;1,1,1", "--t", "3", "--out", (dir / "star.json").string()})
              .code == kExitOk);
    CHECK(read_design(dir / "star.json").rows.cols() == 4);
  }

  TEST_CASE("Kronecker-sum methods read input arrays") {
    const auto dir = scratch_dir("cli_kron");
    const auto ndm = (dir / "e3.json").string();
    const auto inputs =
        data_path("ndm_d1.json").string() + "," + data_path("ndm_d2.json").string() + "," + data_path("ndm_d3.json").string();
    CHECK(run({"construct", "--method", "kron-ndm", "--bases", "gf:2:2,zn:3,zn:2", "--inputs", inputs, "--out", ndm})
              .code == kExitOk);
    const auto e = read_design(ndm);
    CHECK(nested_view(e).top == GroupMatrix::parse(testing::omega_ndm_chain(), reference::kOmegaNdmTop));

    const auto soa = (dir / "b.json").string();
    CHECK(run({"construct", "--method", "kron-soa", "--bases", "zn:6,zn:2", "--inputs",
               data_path("z6_oa.json").string() + "," + data_path("omega_z2_oa.json").string(), "--out", soa})
              .code == kExitOk);
    const auto b = read_design(soa);
    CHECK(b.type == "soa");
    CHECK(b.rows.rows() == 144);
    CHECK(run({"verify", "--in", soa}).code == kExitOk);

    CHECK(run({"construct", "--method", "kron-noa", "--bases", "zn:6,zn:2", "--inputs",
               data_path("z6_oa.json").string() + "," + data_path("omega_z2_oa.json").string(), "--out",
               (dir / "noa.json").string()})
              .code == kExitOk);
    // Inputs in the wrong layer order are rejected.
    CHECK(run({"construct", "--method", "kron-noa", "--bases", "zn:6,zn:2", "--inputs",
               data_path("omega_z2_oa.json").string() + "," + data_path("z6_oa.json").string()})
              .code != kExitOk);
  }

  TEST_CASE("invalid requests exit with code 2") {
    CHECK(run({"construct", "--method", "bush-noa", "--p", "2", "--u", "1,2", "--k", "4"}).code == kExitSpecError);
    CHECK(run({"construct", "--method", "rh-noa", "--p", "4", "--u", "1,2", "--k", "2"}).code == kExitSpecError);
    CHECK(run({"construct", "--method", "rh-noa", "--p", "2", "--u", "2,1", "--k", "2"}).code == kExitSpecError);
    CHECK(run({"construct", "--method", "nonsense", "--p", "2", "--u", "1,2"}).code == kExitSpecError);
    CHECK(run({"construct", "--method", "rh-noa", "--p", "2", "--u", "1,2", "--k", "2", "--columns", "0,1;0,0"})
              .code == kExitSpecError);
    CHECK(run({"construct"}).code == kExitSpecError);
    CHECK(run({"frobnicate"}).code == kExitSpecError);
    CHECK(run({"verify", "--in", "/nonexistent/file.json"}).code == kExitSpecError);
    const auto r = run({"construct", "--method", "bush-noa", "--p", "2", "--u", "1,2", "--k", "4"});
    CHECK(r.err.find("s_1 >= k - 1") != std::string::npos);
  }

  TEST_CASE("oracle failures exit with code 3") {
    const auto dir = scratch_dir("cli_fail");
    // Default generator with a strength-3 claim.
    CHECK(run({"construct", "--method", "rh-noa", "--p", "2", "--u", "1,2", "--k", "3", "--t", "3"}).code ==
          kExitVerificationFailure);
    // A tampered design file.
    const auto path = rh_table(dir);
    auto j = Json::parse(read_text(path));
    j["rows"][5][1] = 0;
    write_text(dir / "bad.json", j.dump());
    const auto r = run({"verify", "--in", (dir / "bad.json").string()});
    CHECK(r.code == kExitVerificationFailure);
    const auto report = Json::parse(r.out);
    CHECK(report["pass"] == false);
  }

  TEST_CASE("lift reproduces the relabeled tables") {
    const auto dir = scratch_dir("cli_lift");
    const auto path = rh_table(dir);
    const auto nsfd = (dir / "m3.json").string();
    CHECK(run({"lift", "--in", path, "--mode", "nsfd", "--perms", perm_text(reference::kNestedPermutations), "--stage",
               "relabel-only", "--out", nsfd})
              .code == kExitOk);
    CHECK(read_design(nsfd).rows.to_rows() == reference::kNestedRelabel);

    const auto ssfd = (dir / "m.json").string();
    CHECK(run({"lift", "--in", path, "--mode", "ssfd-multi", "--perms", perm_text(reference::kSlicedPermutations),
               "--stage", "relabel-only", "--out", ssfd})
              .code == kExitOk);
    CHECK(read_design(ssfd).rows.to_rows() == reference::kSlicedRelabel);

    const auto grouped = (dir / "g.json").string();
    CHECK(run({"lift", "--in", path, "--mode", "ssfd-grouped", "--collapse", "1", "--seed", "3", "--out", grouped})
              .code == kExitOk);
    CHECK(run({"verify", "--in", grouped}).code == kExitOk);
    CHECK(run({"lift", "--in", path, "--mode", "nsfd", "--perms", "0,1,2,3,4,5,6,7;0,1,2,3,4,5,6,7;0,1,2,3,4,5,6,7"})
              .code == kExitSpecError);
  }

  TEST_CASE("full lifts are deterministic and record their seeds") {
    const auto dir = scratch_dir("cli_seed");
    const auto path = rh_table(dir);
    const std::vector<std::string> args{"lift", "--in", path, "--mode", "nsfd", "--seed", "7"};
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    const auto j = Json::parse(a.out);
    CHECK(j["lift_seed"] == 7);
    CHECK(j["permutation_seeds"].size() == 3);
    const auto d = design_from_json(j);
    CHECK(check_latin_hypercube(d.rows).pass);
    CHECK(run({"lift", "--in", path, "--mode", "nsfd", "--seed", "8"}).out != a.out);

    setenv("NESTFILL_SEED", "7", 1);
    const auto env = run({"lift", "--in", path, "--mode", "nsfd"});
    unsetenv("NESTFILL_SEED");
    CHECK(Json::parse(env.out)["lift_seed"] == 7);
    CHECK(Json::parse(env.out)["rows"] == j["rows"]);
    setenv("NESTFILL_SEED", "abc", 1);
    CHECK(run({"lift", "--in", path, "--mode", "nsfd"}).code == kExitSpecError);
    unsetenv("NESTFILL_SEED");
  }

  TEST_CASE("export formats") {
    const auto dir = scratch_dir("cli_export");
    const auto path = rh_table(dir);
    const auto csv = (dir / "rh.csv").string();
    CHECK(run({"export", "--in", path, "--format", "csv", "--out", csv}).code == kExitOk);
    const auto back = (dir / "back.json").string();
    CHECK(run({"export", "--in", csv, "--format", "json", "--out", back}).code == kExitOk);
    CHECK(read_design(back).rows == read_design(path).rows);
    CHECK(run({"verify", "--in", csv}).code == kExitOk);

    const auto lifted = (dir / "l.json").string();
    REQUIRE(run({"lift", "--in", path, "--mode", "nsfd", "--seed", "1", "--out", lifted}).code == kExitOk);
    const auto r = run({"export", "--in", lifted, "--format", "scatter", "--out", (dir / "scatter").string()});
    CHECK(r.code == kExitOk);
    CHECK(std::filesystem::exists(dir / "scatter" / "x1_x2.csv"));
    CHECK(std::filesystem::exists(dir / "scatter" / "x1_x3.csv"));
    CHECK(std::filesystem::exists(dir / "scatter" / "x2_x3.csv"));

    auto j = Json::parse(read_text(path));
    j["rows"] = Json::array();
    write_text(dir / "empty.json", j.dump());
    CHECK(run({"export", "--in", (dir / "empty.json").string(), "--format", "scatter", "--out",
               (dir / "none").string()})
              .code == kExitSpecError);
  }

  TEST_CASE("help and version") {
    CHECK(run({"--version"}).code == kExitOk);
    CHECK(run({"--help"}).code == kExitOk);
  }
}
