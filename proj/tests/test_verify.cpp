#include "doctest.h"
#include "nestfill/arrays.hpp"
#include "nestfill/verify.hpp"
#include "reference_tables.hpp"
#include "test_support.hpp"

using namespace nestfill;
using nestfill::testing::project_levels;

namespace {

LevelMatrix levels(const std::vector<std::vector<std::uint32_t>>& rows) { return LevelMatrix::from_rows(rows); }

GroupMatrix gf8_table() { return GroupMatrix::parse(testing::gf8_chain(), reference::kGf8ThreeLayerTop); }

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("strength oracle on the GF(8) table") {
    const auto a = gf8_table();
    CHECK(check_oa_strength(a.data, 8, 2).pass);
    CHECK(check_oa_strength(project_levels(a.slice_rows(0, 4), 1), 2, 2).pass);
    // Without collapsing, the 16-run layer is not an OA at 8 levels.
    const auto raw = check_oa_strength(a.slice_rows(0, 16).data, 8, 2);
    CHECK_FALSE(raw.pass);
    REQUIRE(raw.counterexample);
    CHECK(raw.counterexample->columns == std::vector<std::size_t>{0, 1});
  }

  TEST_CASE("strength oracle edge cases") {
    const auto a = levels({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(check_oa_strength(a, 2, 1).pass);
    CHECK(check_oa_strength(a, 2, 2).pass);
    CHECK_THROWS_AS(check_oa_strength(a, 2, 3), std::invalid_argument);
    CHECK_THROWS_AS(check_oa_strength(a, 2, 0), std::invalid_argument);
    // Run count not divisible by s^t is a structural failure, not an exception.
    const auto odd = check_oa_strength(levels({{0, 0}, {1, 1}, {0, 1}}), 2, 2);
    CHECK_FALSE(odd.pass);
    CHECK_FALSE(odd.detail.empty());
    CHECK(odd.counterexample.has_value());
    // Levels outside [0, s) fail.
    CHECK_FALSE(check_oa_strength(levels({{0, 2}, {1, 1}}), 2, 1).pass);
  }

  TEST_CASE("counterexample is the lexicographically first failing tuple") {
    // Columns 0,1 balanced; column 2 duplicates column 0, so (0,2) is the first
    // failing pair; its first failing level tuple is (0,0), seen twice.
    const auto a = levels({{0, 0, 0, 0}, {0, 1, 0, 1}, {1, 0, 1, 1}, {1, 1, 1, 0}});
    const auto r = check_oa_strength(a, 2, 2);
    CHECK_FALSE(r.pass);
    REQUIRE(r.counterexample);
    CHECK(r.counterexample->columns == std::vector<std::size_t>{0, 2});
    CHECK(r.counterexample->levels == std::vector<std::uint32_t>{0, 0});
    CHECK(r.counterexample->observed == 2);
    CHECK(r.counterexample->expected == 1);
  }

  TEST_CASE("difference matrix oracle") {
    const auto chain = testing::omega_ndm_chain();
    const auto e = GroupMatrix::parse(chain, reference::kOmegaNdmTop);
    const GroupTable g(24, [&](std::uint32_t a, std::uint32_t b) { return chain->add(a, b); });
    CHECK(check_difference_matrix(e.data, g).pass);
    const auto constant = check_difference_matrix(levels({{1, 1}, {1, 1}}), GroupTable::cyclic(2));
    CHECK_FALSE(constant.pass);
    CHECK(constant.counterexample.has_value());
    const auto c4 = testing::gf8_chain();
    const auto two = GroupChain::field_tower(2, {1, 2});
    const GroupTable g4(4, [&](std::uint32_t a, std::uint32_t b) { return two->add(a, b); });
    CHECK(check_difference_matrix(levels({{0, 0}, {0, 1}, {0, 2}, {0, 3}}), g4).pass);
    (void)c4;
  }

  TEST_CASE("group tables") {
    const auto z5 = GroupTable::cyclic(5);
    CHECK(z5.add(3, 4) == 2);
    CHECK(z5.neg(2) == 3);
    CHECK(z5.sub(1, 3) == 3);
  }

  TEST_CASE("Latin hypercube oracle") {
    CHECK(check_latin_hypercube(levels({{0}, {1}, {2}})).pass);
    CHECK_FALSE(check_latin_hypercube(levels({{0}, {1}, {1}})).pass);
    CHECK(check_latin_hypercube(LevelMatrix::from_rows(reference::kNestedLatinHypercube)).pass);
  }

  TEST_CASE("stratification oracle") {
    const auto l = LevelMatrix::from_rows(reference::kNestedLatinHypercube);
    CHECK(check_stratification(l, 64, 8).pass);
    CHECK(check_stratification(l.slice_rows(0, 4), 64, 2).pass);
    CHECK(check_stratification(l.slice_rows(0, 16), 64, 4).pass);
    CHECK(check_stratification(l, 64, 1).pass);
    CHECK_FALSE(check_stratification(l.slice_rows(0, 4), 64, 4).pass);
    CHECK_FALSE(check_stratification(levels({{0, 0}, {1, 1}, {2, 2}, {3, 3}}), 4, 2).pass);
  }

  TEST_CASE("projection refinement") {
    const auto chain = testing::gf8_chain();
    CHECK(check_projection_refinement({chain_projection(*chain, 1), chain_projection(*chain, 2),
                                       chain_projection(*chain, 3)})
              .pass);
    // Residues modulo x+1 and x^2+x+1 do not refine each other.
    const auto f8 = make_field(2, 3);
    LevelProjection phi1, phi2;
    phi1.levels = 2;
    phi2.levels = 4;
    for (Code c = 0; c < 8; ++c) {
      phi1.map.push_back(residue_projection(*f8, c, {1, 1}));
      phi2.map.push_back(residue_projection(*f8, c, {1, 1, 1}));
    }
    CHECK_FALSE(check_projection_refinement({phi1, phi2}).pass);
  }

  TEST_CASE("nested oracle") {
    const auto chain = testing::gf8_chain();
    const auto a = gf8_table();
    std::vector<LevelMatrix> family{a.slice_rows(0, 4).data, a.slice_rows(0, 16).data, a.data};
    std::vector<LevelProjection> rho{chain_projection(*chain, 1), chain_projection(*chain, 2),
                                     chain_projection(*chain, 3)};
    CHECK(check_nested(family, rho, 2).pass);
    // Replacing the 16-run layer by rows that do not contain layer 1 fails.
    std::vector<LevelMatrix> broken = family;
    broken[1] = a.slice_rows(16, 32).data;
    CHECK_FALSE(check_nested(broken, rho, 2).pass);
    // One layer reduces to the strength check.
    CHECK(check_nested({a.data}, {LevelProjection::identity(8)}, 2).pass);
    CHECK_FALSE(check_nested({a.slice_rows(0, 16).data}, {LevelProjection::identity(8)}, 2).pass);
  }

  TEST_CASE("sliced oracle") {
    const auto chain = testing::gf8_chain();
    const auto a = gf8_table();
    CHECK(check_sliced(a.data, 16, chain_projection(*chain, 2), 2).pass);
    CHECK(check_sliced(a.data, 4, chain_projection(*chain, 1), 2).pass);
    CHECK(check_sliced(a.data, 64, LevelProjection::identity(8), 2).pass);
    CHECK_FALSE(check_sliced(a.data, 16, LevelProjection::identity(8), 2).pass);

    const auto z = testing::omega_z6_chain();
    const auto b = col_kron_sum(GroupMatrix::parse(z, reference::kOmegaZ2Array), GroupMatrix::parse(z, reference::kZ6Array));
    CHECK(check_sliced(b.data, 36, chain_projection(*z, 1), 2).pass);
  }

  TEST_CASE("nested and sliced difference matrices") {
    const auto chain = testing::omega_ndm_chain();
    const auto e = GroupMatrix::parse(chain, reference::kOmegaNdmTop);
    std::vector<LevelProjection> rho;
    for (std::size_t i = 1; i <= 3; ++i) rho.push_back(chain_projection(*chain, i, true));
    CHECK(check_nested_dm({e.slice_rows(0, 4).data, e.slice_rows(0, 12).data, e.data}, rho).pass);
    CHECK(check_sliced_dm(e.data, 12, rho[1]).pass);
    CHECK(check_sliced_dm(e.data, 4, rho[0]).pass);
    CHECK_FALSE(check_sliced_dm(e.data, 12, rho[2]).pass);
  }

  TEST_CASE("projection application") {
    const auto p = LevelProjection::identity(2);
    CHECK_THROWS_AS(apply_projection(levels({{0, 5}}), p), std::out_of_range);
  }
}
