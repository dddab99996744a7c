#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "nestfill/groups.hpp"
#include "test_support.hpp"

using namespace nestfill;
using nestfill::testing::gf8_chain;
using nestfill::testing::omega_ndm_chain;

namespace {

std::vector<std::string> text(const GroupChain& chain, const std::vector<Code>& codes) {
  std::vector<std::string> out;
  for (Code c : codes) out.push_back(chain.format(c));
  return out;
}

// Independent oracle: T is a subgroup of F_I, meets F_{i-1} only in 0, and
// F_{i-1} + T covers F_i exactly once.
void check_direct_sum(const GroupChain& chain, std::size_t layer) {
  const auto t = chain.transversal(layer);
  const std::set<Code> ts(t.begin(), t.end());
  REQUIRE(ts.size() == t.size());
  CHECK(t.size() == chain.size(layer) / chain.size(layer - 1));
  for (Code a : t)
    for (Code b : t) CHECK(ts.count(chain.add(a, b)) == 1);
  std::set<Code> sums;
  for (Code f = 0; f < chain.size(layer - 1); ++f) {
    for (Code b : t) {
      const Code s = chain.add(f, b);
      CHECK(chain.contains(layer, s));
      sums.insert(s);
    }
  }
  CHECK(sums.size() == chain.size(layer));
}

}  // namespace

TEST_SUITE("groups") {
  TEST_CASE("field tower transversals are monomial spans") {
    const auto chain = gf8_chain();
    CHECK(text(*chain, chain->transversal(1)) == std::vector<std::string>{"0", "1"});
    CHECK(text(*chain, chain->transversal(2)) == std::vector<std::string>{"0", "x"});
    CHECK(text(*chain, chain->transversal(3)) == std::vector<std::string>{"0", "x^2"});

    const auto wide = GroupChain::field_tower(2, {1, 2, 4});
    CHECK(text(*wide, wide->transversal(3)) == std::vector<std::string>{"0", "x^2", "x^3", "x^3+x^2"});
    for (std::size_t i = 1; i <= 3; ++i) check_direct_sum(*wide, i);

    const auto ternary = GroupChain::field_tower(3, {1, 2});
    CHECK(text(*ternary, ternary->transversal(2)) == std::vector<std::string>{"0", "x", "2x"});
    for (std::size_t i = 1; i <= 2; ++i) check_direct_sum(*ternary, i);
  }

  TEST_CASE("chain validation") {
    CHECK_THROWS_AS(GroupChain::field_tower(2, {2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(GroupChain::field_tower(2, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(GroupChain::field_tower(2, {}), std::invalid_argument);
    CHECK_THROWS_AS(GroupChain::field_tower(4, {1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(GroupChain::field_tower(2, {2, 3}, std::nullopt, TowerNesting::subfield), std::invalid_argument);
    CHECK_THROWS_AS(BaseGroup::cyclic(0), std::invalid_argument);
    CHECK_THROWS_AS(GroupChain::omega_ring({}), std::invalid_argument);
  }

  TEST_CASE("omega ring layers") {
    const auto z = GroupChain::omega_ring({BaseGroup::cyclic(6), BaseGroup::cyclic(2)});
    CHECK(z->size(1) == 6);
    CHECK(z->size(2) == 12);
    CHECK(text(*z, z->transversal(2)) == std::vector<std::string>{"0", "w"});
    // F_2 = Z_6 and w + Z_6.
    const auto all = z->enumerate(EnumerationOrder::outer_first);
    CHECK(z->format(all[6]) == "w");
    CHECK(z->format(all[11]) == "5+w");

    const auto e3 = omega_ndm_chain();
    CHECK(e3->order() == 24);
    CHECK(text(*e3, e3->transversal(2)) == std::vector<std::string>{"0", "w", "2w"});
    CHECK(text(*e3, e3->transversal(3)) == std::vector<std::string>{"0", "w2"});
    for (std::size_t i = 1; i <= 3; ++i) check_direct_sum(*e3, i);

    const auto trivial = GroupChain::omega_ring({BaseGroup::cyclic(1)});
    CHECK(trivial->order() == 1);
    CHECK(trivial->enumerate(EnumerationOrder::inner_first) == std::vector<Code>{0});
  }

  TEST_CASE("omega addition is component-wise") {
    const auto e3 = omega_ndm_chain();
    const Code a = e3->parse("x+1+2w+w2");
    const Code b = e3->parse("x+w+w2");
    CHECK(e3->format(e3->add(a, b)) == "1");
    CHECK(e3->format(e3->neg(e3->parse("w"))) == "2w");
    for (Code c = 0; c < e3->order(); ++c) CHECK(e3->add(c, e3->neg(c)) == 0);
  }

  TEST_CASE("decomposition examples") {
    const auto chain = gf8_chain();
    CHECK(text(*chain, chain->decompose(chain->parse("x^2+x+1"))) == std::vector<std::string>{"1", "x", "x^2"});
    CHECK(chain->decompose(0) == std::vector<Code>{0, 0, 0});
    const auto e3 = omega_ndm_chain();
    CHECK(text(*e3, e3->decompose(e3->parse("w^2+2w+x"))) == std::vector<std::string>{"x", "2w", "w2"});
    CHECK_THROWS_AS(chain->decompose(8), std::out_of_range);
  }

  TEST_CASE("decomposition sums back and lands in the transversals") {
    for (const auto& chain : {gf8_chain(), omega_ndm_chain(), GroupChain::field_tower(3, {1, 2, 3}),
                              GroupChain::field_tower(2, {2, 4}, std::nullopt, TowerNesting::subfield)}) {
      for (Code c = 0; c < chain->order(); ++c) {
        const auto beta = chain->decompose(c);
        Code sum = 0;
        for (std::size_t i = 0; i < beta.size(); ++i) {
          const auto t = chain->transversal(i + 1);
          CHECK(std::find(t.begin(), t.end(), beta[i]) != t.end());
          sum = chain->add(sum, beta[i]);
        }
        CHECK(sum == c);
      }
    }
  }

  TEST_CASE("projection examples") {
    const auto chain = gf8_chain();
    std::vector<std::string> rho1, rho2;
    for (Code c = 0; c < 8; ++c) {
      rho1.push_back(chain->format(chain->project(1, c)));
      rho2.push_back(chain->format(chain->project(2, c)));
      CHECK(chain->project(3, c) == c);
    }
    CHECK(rho1 == std::vector<std::string>{"0", "1", "0", "1", "0", "1", "0", "1"});
    CHECK(rho2 == std::vector<std::string>{"0", "1", "x", "x+1", "0", "1", "x", "x+1"});
    CHECK(chain->format(chain->project(2, chain->parse("x^2+x"))) == "x");
    CHECK_THROWS_AS(chain->project(0, 1), std::out_of_range);
    CHECK_THROWS_AS(chain->project(4, 1), std::out_of_range);
  }

  TEST_CASE("enumeration orders") {
    const auto chain = gf8_chain();
    CHECK(text(*chain, chain->enumerate(EnumerationOrder::outer_first)) ==
          std::vector<std::string>{"0", "1", "x", "x+1", "x^2", "x^2+1", "x^2+x", "x^2+x+1"});
    CHECK(text(*chain, chain->enumerate(EnumerationOrder::inner_first)) ==
          std::vector<std::string>{"0", "x^2", "x", "x^2+x", "1", "x^2+1", "x+1", "x^2+x+1"});
    const auto single = GroupChain::field_tower(3, {2});
    std::vector<Code> codes(9);
    for (Code c = 0; c < 9; ++c) codes[c] = c;
    CHECK(single->enumerate(EnumerationOrder::inner_first) == codes);
    CHECK(single->enumerate(EnumerationOrder::outer_first) == codes);
  }

  TEST_CASE("projection properties") {
    for (const auto& chain : {gf8_chain(), omega_ndm_chain(), GroupChain::field_tower(3, {1, 2, 3}),
                              GroupChain::field_tower(2, {1, 2, 4}, std::nullopt, TowerNesting::subfield),
                              testing::omega_z6_chain()}) {
      const auto n = chain->order();
      const auto layers = chain->layers();
      for (std::size_t i = 1; i <= layers; ++i) {
        for (Code a = 0; a < n; ++a) {
          const Code pa = chain->project(i, a);
          CHECK(chain->contains(i, pa));
          for (std::size_t j = 1; j <= layers; ++j)
            CHECK(chain->project(i, chain->project(j, a)) == chain->project(std::min(i, j), a));
          for (Code b = 0; b < n; ++b) {
            REQUIRE(chain->project(i, chain->add(a, b)) == chain->add(pa, chain->project(i, b)));
            if (pa == chain->project(i, b))
              for (std::size_t j = 1; j <= i; ++j) REQUIRE(chain->project(j, a) == chain->project(j, b));
          }
        }
        for (Code f = 0; f < chain->size(i); ++f) CHECK(chain->project(i, f) == f);

        // rho_i applied to the inner-first enumeration repeats each element of
        // F_i consecutively s_I / s_i times, in F_i's own inner-first order.
        const auto all = chain->enumerate(EnumerationOrder::inner_first);
        const auto rep = n / chain->size(i);
        std::vector<Code> inner;
        for (Code c : all)
          if (chain->contains(i, c)) inner.push_back(c);
        for (std::size_t r = 0; r < all.size(); ++r) CHECK(chain->project(i, all[r]) == inner[r / rep]);
      }
    }
  }

  TEST_CASE("modulus projection breaks refinement") {
    const auto f8 = make_field(2, 3);
    const std::vector<std::uint32_t> g1{1, 1}, g2{1, 1, 1};
    const Code x2 = f8->parse("x^2"), x1 = f8->parse("x+1");
    CHECK(residue_projection(*f8, x2, g2) == f8->parse("x+1"));
    CHECK(residue_projection(*f8, x1, g2) == f8->parse("x+1"));
    CHECK(residue_projection(*f8, x2, g1) == 1);
    CHECK(residue_projection(*f8, x1, g1) == 0);
    // The subgroup projection does not have this defect.
    const auto chain = gf8_chain();
    CHECK(chain->project(2, x2) != chain->project(2, x1));
  }

  TEST_CASE("subfield tower") {
    const auto chain = GroupChain::field_tower(2, {2, 4}, std::nullopt, TowerNesting::subfield);
    const auto& f = chain->field();
    CHECK(chain->size(1) == 4);
    // F_1 is the subfield: closed under multiplication and fixed by gamma -> gamma^4.
    for (Code a = 0; a < 4; ++a) {
      const Code fa = chain->to_field_code(a);
      CHECK(f.pow(fa, 4) == fa);
      for (Code b = 0; b < 4; ++b) CHECK(chain->contains(1, chain->mul(a, b)));
    }
    for (Code c = 0; c < 16; ++c) CHECK(chain->from_field_code(chain->to_field_code(c)) == c);
    CHECK(chain->to_field_code(chain->one()) == 1);
    // Field addition agrees with chain addition.
    for (Code a = 0; a < 16; ++a)
      for (Code b = 0; b < 16; ++b)
        CHECK(chain->to_field_code(chain->add(a, b)) == f.add(chain->to_field_code(a), chain->to_field_code(b)));
  }

  TEST_CASE("omega text forms") {
    const auto e3 = omega_ndm_chain();
    for (Code c = 0; c < e3->order(); ++c) CHECK(e3->parse(e3->format(c)) == c);
    CHECK(e3->parse("w2+x") == e3->parse("x+w^2"));
    CHECK(e3->parse("\xCF\x89") == e3->parse("w"));
    CHECK(e3->parse("2*w") == e3->parse("2w"));
    const auto z = testing::omega_z6_chain();
    CHECK(z->parse("w+5") == z->parse("5+w"));
    CHECK_THROWS_AS(z->parse("w3"), std::invalid_argument);
    CHECK_THROWS_AS(z->parse("q"), std::invalid_argument);
    CHECK_THROWS_AS(z->mul(1, 1), std::logic_error);
  }
}
