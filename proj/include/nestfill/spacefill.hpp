#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "nestfill/arrays.hpp"

namespace nestfill {

using Permutation = std::vector<std::uint32_t>;

/// splitmix64 finaliser of (seed, stream): one independent stream per column.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// mt19937_64 with portable bounded sampling (no std distributions, whose
/// output differs across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  /// Uniform on [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

/// Layer sizes s_1 < ... < s_I with s_i | s_I.
void check_layer_sizes(const std::vector<std::uint32_t>& sizes);

/// For every i the first s_i entries hit each block of s_I / s_i consecutive
/// values exactly once.
bool is_nested_permutation(const Permutation& perm, const std::vector<std::uint32_t>& sizes);
/// For every j < I each run of q = s_I / s_j consecutive positions maps onto
/// one block {dq, ..., dq + q - 1}.
bool is_sliced_permutation(const Permutation& perm, const std::vector<std::uint32_t>& sizes);

/// Sequential greedy draw: position t picks uniformly among the values in
/// still-empty blocks of the coarsest layer whose prefix covers t.
Permutation gen_nested_permutation(const std::vector<std::uint32_t>& sizes, std::uint64_t seed);
/// Independent uniform block permutations at every node of the block tree.
Permutation gen_sliced_permutation(const std::vector<std::uint32_t>& sizes, std::uint64_t seed);

/// In each column the q = n / s occurrences of level r (in row order) receive
/// a shuffled copy of {rq, ..., rq + q - 1}. Throws on unbalanced columns.
LevelMatrix oa_based_lh(const LevelMatrix& m, std::uint32_t s, std::uint64_t seed);

/// Every row block (or row prefix) of `rows` runs fills the grid x grid cells
/// evenly in every pair of dimensions.
struct StratificationClaim {
  enum class Mode { prefix, blocks };
  Mode mode = Mode::prefix;
  std::size_t rows = 0;
  std::uint32_t grid = 1;
};

enum class LiftStage { relabel_only, full };

struct LiftedDesign {
  LevelMatrix relabeled;              // integer design on [0, levels)
  std::uint32_t levels = 0;           // s_I
  std::optional<LevelMatrix> design;  // Latin hypercube (full stage)
  std::vector<StratificationClaim> claims;
  std::vector<Permutation> permutations;
  std::optional<std::uint64_t> seed;  // lifting seed (full stage)
};

/// Latin hypercube check (full stage) plus every stratification claim.
VerificationReport verify_lifted(const LiftedDesign& d);

/// Relabel each column through the outer-first enumeration: code -> pi[code
/// position], then lift. Layer i of the result stratifies s_i x s_i grids.
/// Throws std::invalid_argument if layer i has entries outside F_i.
LiftedDesign build_nsfd(const NestedArray& noa, const std::vector<Permutation>& perms, LiftStage stage,
                        std::uint64_t seed = 0);

/// Relabel through the inner-first enumeration with sliced permutations; the
/// slices of every family stratify s_j x s_j grids for all j <= i.
LiftedDesign build_ssfd_multi(const NoaFamily& family, const std::vector<Permutation>& perms, LiftStage stage,
                              std::uint64_t seed = 0);

/// Collapse layer j: the classes {gamma : rho_j(gamma) = alpha} are mapped onto
/// consecutive blocks of s_I / s_j labels. group_order lists the alpha in F_j
/// in the order their blocks are assigned (default ascending); members of a
/// class get labels in ascending code order.
LiftedDesign build_ssfd_grouped(const SlicedArray& soa, std::size_t j,
                                const std::optional<std::vector<Code>>& group_order, LiftStage stage,
                                std::uint64_t seed = 0);

/// Appends row l of qual to every run of slice l.
LevelMatrix compose_qual_quant(const LevelMatrix& design, std::size_t slice_rows, const LevelMatrix& qual);

}  // namespace nestfill
