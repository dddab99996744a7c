#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nestfill/matrix.hpp"

namespace nestfill {

// Brute-force oracles. Everything here works on raw level matrices plus lookup
// tables and never calls construction code.

// Every failing report carries one. Structural failures (shape or divisibility)
// leave columns empty and compare the offending sizes in observed/expected.
struct Counterexample {
  std::vector<std::size_t> columns;   // 0-based column indices
  std::vector<std::uint32_t> levels;  // level tuple, group element, or value pair
  std::size_t observed = 0;
  std::size_t expected = 0;
};

struct VerificationReport {
  std::string check;
  bool pass = true;
  std::string detail;  // set on failure
  std::optional<Counterexample> counterexample;

  explicit operator bool() const noexcept { return pass; }
  static VerificationReport ok(std::string check) { return {std::move(check), true, {}, std::nullopt}; }
  static VerificationReport fail(std::string check, std::string detail,
                                 std::optional<Counterexample> cx = std::nullopt) {
    return {std::move(check), false, std::move(detail), std::move(cx)};
  }
};

/// Cayley table of a finite abelian group on [0, order).
class GroupTable {
 public:
  GroupTable(std::uint32_t order, const std::function<std::uint32_t(std::uint32_t, std::uint32_t)>& add);
  static GroupTable cyclic(std::uint32_t n);

  std::uint32_t order() const noexcept { return order_; }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return sum_[std::size_t{a} * order_ + b]; }
  std::uint32_t neg(std::uint32_t a) const { return neg_[a]; }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg(b)); }

 private:
  std::uint32_t order_;
  std::vector<std::uint32_t> sum_;
  std::vector<std::uint32_t> neg_;
};

/// Level collapsing map from the codes of the top alphabet onto [0, levels).
/// For difference matrices the image carries a group structure as well.
struct LevelProjection {
  std::vector<std::uint32_t> map;
  std::uint32_t levels = 0;
  std::optional<GroupTable> group;
  std::string name;  // used in report labels, e.g. "rho_2"

  static LevelProjection identity(std::uint32_t levels, std::optional<GroupTable> group = std::nullopt,
                                  std::string name = "id");
};

/// Throws std::out_of_range if an entry has no image.
LevelMatrix apply_projection(const LevelMatrix& a, const LevelProjection& projection);

/// Every t columns contain each of the s^t level tuples n / s^t times. The
/// counterexample is the lexicographically first failing column tuple with its
/// first failing level tuple. Throws std::invalid_argument if t == 0 or t > m.
VerificationReport check_oa_strength(const LevelMatrix& a, std::uint32_t s, std::uint32_t t);

/// For every ordered pair of distinct columns, the entry-wise differences cover
/// each group element r / s times.
VerificationReport check_difference_matrix(const LevelMatrix& d, const GroupTable& group);

/// Every column is a permutation of 0..n-1.
VerificationReport check_latin_hypercube(const LevelMatrix& l);

/// Two-dimensional stratification: for every pair of columns each of the g x g
/// cells (cell index floor(v g / range)) holds exactly rows / g^2 points.
VerificationReport check_stratification(const LevelMatrix& l, std::uint32_t range, std::uint32_t g);

/// rho_i(a) == rho_i(b) implies rho_j(a) == rho_j(b) for every j < i, where the
/// projections are listed coarse to fine.
VerificationReport check_projection_refinement(const std::vector<LevelProjection>& projections);

/// NOA conditions: family[i-1] is contained in family[i] (as a row multiset),
/// projections[j](family[i]) has strength t at projections[j].levels for all
/// j <= i, and the projections refine each other.
VerificationReport check_nested(const std::vector<LevelMatrix>& family,
                                const std::vector<LevelProjection>& projections, std::uint32_t t);

/// NDM analogue of check_nested; every projection must carry a group table.
VerificationReport check_nested_dm(const std::vector<LevelMatrix>& family,
                                   const std::vector<LevelProjection>& projections);

/// SOA: each consecutive block of slice_rows rows has strength t after
/// collapsing by the projection.
VerificationReport check_sliced(const LevelMatrix& top, std::size_t slice_rows, const LevelProjection& projection,
                                std::uint32_t t);

/// Each block of slice_rows rows is a difference matrix after collapsing.
VerificationReport check_sliced_dm(const LevelMatrix& top, std::size_t slice_rows,
                                   const LevelProjection& projection);

}  // namespace nestfill
