#include <fstream>

#include "doctest.h"
#include "nestfill/io.hpp"
#include "reference_tables.hpp"
#include "test_support.hpp"

using namespace nestfill;
using nestfill::testing::gf8_chain;
using nestfill::testing::scratch_dir;
using nestfill::testing::to_perms;

namespace {

DesignFile gf8_design() {
  const auto fam = construct_noa_rh(gf8_chain(), 2);
  return design_from_nested(fam.nested, fam.sliced, "rh-noa");
}

bool all_pass(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return !reports.empty();
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("chain descriptors round-trip") {
    for (const auto& chain : {gf8_chain(), testing::omega_ndm_chain(), testing::omega_z6_chain(),
                              GroupChain::field_tower(2, {2, 4}, std::nullopt, TowerNesting::subfield),
                              GroupChain::field_tower(3, {1, 2}, std::vector<std::uint32_t>{2, 2, 1})}) {
      const auto back = chain_from_json(chain_to_json(*chain));
      CHECK(*back == *chain);
    }
    const auto j = chain_to_json(*gf8_chain());
    CHECK(j["kind"] == "field");
    CHECK(j["p"] == 2);
    CHECK(j["u_chain"] == Json::array({1, 2, 3}));
    const auto short_form = chain_from_json(Json::parse(R"({"kind":"omega","bases":[{"zn":6},{"zn":2}]})"));
    CHECK(*short_form == *testing::omega_z6_chain());
    CHECK_THROWS_AS(chain_from_json(Json::parse(R"({"kind":"ring"})")), std::invalid_argument);
    CHECK_THROWS_AS(chain_from_json(Json::parse(R"({"kind":"field","p":2})")), std::invalid_argument);
  }

  TEST_CASE("JSON design round-trip") {
    const auto d = gf8_design();
    CHECK(d.type == "noa");
    CHECK(d.layer_prefixes == std::vector<std::size_t>{4, 16, 64});
    const auto j = design_to_json(d);
    CHECK(j["format"] == kDesignFormat);
    CHECK(j["rows"].size() == 64);
    CHECK(j["symbols"]["6"] == "x^2+x");
    const auto back = design_from_json(j);
    CHECK(back.rows == d.rows);
    CHECK(back.layer_prefixes == d.layer_prefixes);
    CHECK(back.projection_layers == d.projection_layers);
    CHECK(back.slices.size() == d.slices.size());
    CHECK(*back.chain == *d.chain);
    CHECK(all_pass(verify_design(back)));
    CHECK(nested_view(back).top.format() == reference::kGf8ThreeLayerTop);
  }

  TEST_CASE("rows may be given as element text") {
    auto j = design_to_json(gf8_design());
    j["rows"] = Json::array();
    for (const auto& row : reference::kGf8ThreeLayerTop) j["rows"].push_back(row);
    const auto d = design_from_json(j);
    CHECK(nested_view(d).top.format() == reference::kGf8ThreeLayerTop);
  }

  TEST_CASE("CSV round-trip") {
    const auto d = gf8_design();
    const auto csv = design_to_csv(d);
    CHECK(csv.rfind("# meta: ", 0) == 0);
    CHECK(csv.find("\nx1,x2,x3\n") != std::string::npos);
    const auto back = design_from_csv(csv);
    CHECK(back.rows == d.rows);
    CHECK(back.layer_prefixes == d.layer_prefixes);
    CHECK(all_pass(verify_design(back)));
    CHECK_THROWS_AS(design_from_csv("x1,x2\n0,1\n"), std::invalid_argument);
  }

  TEST_CASE("file round-trip json -> csv -> json") {
    const auto dir = scratch_dir("io_roundtrip");
    const auto d = gf8_design();
    write_design(d, dir / "a.json", "json");
    const auto a = read_design(dir / "a.json");
    write_design(a, dir / "a.csv", "csv");
    const auto b = read_design(dir / "a.csv");
    write_design(b, dir / "b.json", "json");
    const auto c = read_design(dir / "b.json");
    CHECK(c.rows == d.rows);
    CHECK(read_text(dir / "a.json") == read_text(dir / "b.json"));
    CHECK_THROWS_AS(write_design(d, dir / "x.txt", "yaml"), std::invalid_argument);
    CHECK_THROWS(read_design(dir / "missing.json"));
  }

  TEST_CASE("lifted designs round-trip and re-verify") {
    const auto fam = construct_noa_rh(gf8_chain(), 2);
    const auto lifted = build_nsfd(fam.nested, to_perms(reference::kNestedPermutations), LiftStage::full, 7);
    const auto d = design_from_lifted(lifted, gf8_chain(), "nsfd", "rh-noa");
    const auto back = design_from_json(design_to_json(d));
    CHECK(back.rows == *lifted.design);
    REQUIRE(back.relabeled);
    CHECK(back.relabeled->to_rows() == reference::kNestedRelabel);
    CHECK(back.lift_seed == 7u);
    CHECK(back.permutations == lifted.permutations);
    CHECK(all_pass(verify_design(back)));
    const auto view = lifted_view(back);
    CHECK(view.claims.size() == lifted.claims.size());

    auto broken = back;
    broken.rows(0, 0) = broken.rows(1, 0);
    CHECK_FALSE(all_pass(verify_design(broken)));
  }

  TEST_CASE("sliced designs and difference matrices") {
    const auto chain = testing::omega_ndm_chain();
    std::vector<GroupMatrix> inputs;
    for (const char* name : {"ndm_d1.json", "ndm_d2.json", "ndm_d3.json"})
      inputs.push_back(read_group_matrix(testing::data_path(name), chain));
    const auto fam = construct_ndm_kron(chain, inputs);
    const auto d = design_from_nested(fam.nested, fam.sliced, "kron-ndm");
    CHECK(d.type == "ndm");
    const auto back = design_from_json(design_to_json(d));
    CHECK(all_pass(verify_design(back)));
    CHECK(nested_view(back).top == GroupMatrix::parse(chain, reference::kOmegaNdmTop));

    const auto z = testing::omega_z6_chain();
    const auto soa = construct_soa_kron(z, GroupMatrix::parse(z, reference::kOmegaZ2Array),
                                        GroupMatrix::parse(z, reference::kZ6Array));
    const auto s = design_from_sliced(soa.sliced, "kron-soa");
    CHECK(s.type == "soa");
    CHECK(all_pass(verify_design(design_from_json(design_to_json(s)))));
    const auto views = sliced_views(s);
    REQUIRE(views.size() == 1);
    CHECK(views[0].slice_rows == 36);
  }

  TEST_CASE("tampered symbolic designs fail verification") {
    auto d = gf8_design();
    d.rows(7, 2) = 0;
    CHECK_FALSE(all_pass(verify_design(d)));
    for (const auto& r : verify_design(d))
      if (!r.pass) CHECK(r.counterexample.has_value());
    const auto j = report_to_json(verify_design(d).front());
    CHECK(j.contains("check"));
    CHECK(j.contains("pass"));
  }

  TEST_CASE("malformed design files") {
    CHECK_THROWS_AS(design_from_json(Json::parse("{}")), std::invalid_argument);
    auto j = design_to_json(gf8_design());
    j["rows"][3] = Json::array({1, 2});
    CHECK_THROWS_AS(design_from_json(j), std::invalid_argument);
    j = design_to_json(gf8_design());
    j["rows"][3][0] = 99;
    CHECK_THROWS_AS(design_from_json(j), std::invalid_argument);
    j = design_to_json(gf8_design());
    j["type"] = "banana";
    CHECK_THROWS_AS(design_from_json(j), std::invalid_argument);
    const auto dir = scratch_dir("io_malformed");
    write_text(dir / "bad.json", "{not json");
    CHECK_THROWS_AS(read_design(dir / "bad.json"), std::invalid_argument);
  }

  TEST_CASE("bare input arrays") {
    const auto z = testing::omega_z6_chain();
    const auto a = read_group_matrix(testing::data_path("z6_oa.json"), z);
    CHECK(a == GroupMatrix::parse(z, reference::kZ6Array));
    const auto dir = scratch_dir("io_bare");
    write_text(dir / "codes.json", "[[0, 1], [1, 0]]");
    CHECK(read_group_matrix(dir / "codes.json", z).rows() == 2);
    write_text(dir / "codes.csv", "x1,x2\n0,w\nw,0\n");
    CHECK(read_group_matrix(dir / "codes.csv", z)(0, 1) == z->parse("w"));
    write_text(dir / "bad.json", R"({"rows": [["0", "q"]]})");
    CHECK_THROWS_AS(read_group_matrix(dir / "bad.json", z), std::invalid_argument);
  }

  TEST_CASE("scatter export") {
    const auto fam = construct_noa_rh(gf8_chain(), 2);
    const auto lifted = build_nsfd(fam.nested, to_perms(reference::kNestedPermutations), LiftStage::full, 7);
    auto d = design_from_lifted(lifted, gf8_chain(), "nsfd", "rh-noa");
    const auto dir = scratch_dir("io_scatter");
    const auto files = write_scatter(d, dir);
    CHECK(files.size() == 3);
    for (const auto& f : files) {
      std::ifstream in(f);
      std::string line;
      std::size_t lines = 0;
      std::getline(in, line);
      CHECK(line.rfind("run,", 0) == 0);
      std::string second;
      while (std::getline(in, line))
        if (!line.empty()) ++lines;
      CHECK(lines == 64);
    }
    const auto text = read_text(dir / "x1_x2.csv");
    CHECK(text.find("\n1,") != std::string::npos);
    d.rows = LevelMatrix();
    CHECK_THROWS_AS(write_scatter(d, dir), std::invalid_argument);
  }
}
