#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nestfill/kronecker.hpp"
#include "nestfill/verify.hpp"

namespace nestfill {

/// Thrown when a constructed or supplied array fails its oracle.
class VerificationFailure : public std::runtime_error {
 public:
  explicit VerificationFailure(VerificationReport report)
      : std::runtime_error(report.check + ": " + report.detail), report_(std::move(report)) {}
  const VerificationReport& report() const noexcept { return report_; }

 private:
  VerificationReport report_;
};

enum class ArrayRole { orthogonal_array, difference_matrix };

/// k x m coefficient matrix with entries in the code range [0, base_order).
struct GeneratorMatrix {
  std::uint32_t base_order = 0;
  Matrix<Code> data;

  std::size_t k() const noexcept { return data.rows(); }
  std::size_t cols() const noexcept { return data.cols(); }
};

/// True when the codes [0, base_order) form a subfield of the chain's field
/// and every layer F_i is closed under multiplication by it.
bool scalars_act_on_layers(const GroupChain& chain, std::uint32_t base_order);

/// Columns with first nonzero entry 1. Default order: e_1..e_k, then the
/// remaining admissible vectors in lex order (first coordinate most
/// significant). Explicit columns are validated and kept in the given order.
GeneratorMatrix generator_matrix(const GroupChain& chain, std::uint32_t base_order, std::uint32_t k,
                                 const std::optional<std::vector<std::vector<Code>>>& columns = std::nullopt);

/// Columns (1, v, ..., v^{k-1})' for v in F_1 in code order, then e_k.
/// Throws std::invalid_argument unless s_1 >= k - 1.
GeneratorMatrix bush_matrix(const GroupChain& chain, std::uint32_t k);

/// H_1 = F_1^k (first coordinate slowest); H_i stacks H_{i-1} and
/// beta (+)_c H_{i-1} for the nonzero beta in T_i^k in lex order.
std::vector<GroupMatrix> build_h_tower(const ChainPtr& chain, std::uint32_t k);

/// All s^k rows of F^k over codes [0, s), first coordinate slowest.
GroupMatrix full_factorial(const ChainPtr& chain, std::uint32_t s, std::uint32_t k);

/// Row-by-generator product with chain arithmetic.
GroupMatrix multiply(const GroupMatrix& h, const GeneratorMatrix& c);

/// Rao-Hamming OA(s_I^k, (s_I^k-1)/(s_I-1), s_I, 2) over the whole top field.
GroupMatrix rao_hamming_oa(const ChainPtr& chain, std::uint32_t k);

/// A family of row-prefix layers. Layer L consists of the first layer_rows[L]
/// rows of top and is checked under rho_j for every projection_layers[j] with
/// j <= L.
struct NestedArray {
  GroupMatrix top;
  std::vector<std::size_t> layer_rows;
  std::vector<std::size_t> projection_layers;
  std::uint32_t strength = 2;
  ArrayRole role = ArrayRole::orthogonal_array;

  std::size_t layers() const noexcept { return layer_rows.size(); }
  /// 1-based.
  GroupMatrix layer(std::size_t i) const { return top.slice_rows(0, layer_rows.at(i - 1)); }
};

/// Consecutive row blocks of top; every block collapses to a strength-t OA
/// (or a difference matrix) under rho_j for all j <= layer.
struct SlicedArray {
  GroupMatrix top;
  std::size_t slice_rows = 0;
  std::size_t layer = 1;
  std::uint32_t strength = 2;
  ArrayRole role = ArrayRole::orthogonal_array;

  std::size_t slices() const noexcept { return slice_rows ? top.rows() / slice_rows : 0; }
  /// 1-based.
  GroupMatrix slice(std::size_t l) const { return top.slice_rows((l - 1) * slice_rows, l * slice_rows); }
};

/// Nested family plus the slice families Gamma^i (i = 1..I-1).
struct NoaFamily {
  NestedArray nested;
  std::vector<SlicedArray> sliced;
};

/// rho_j as a level map on chain codes; with_group attaches F_j's Cayley table.
LevelProjection chain_projection(const GroupChain& chain, std::size_t layer, bool with_group = false);
/// Projection onto the transversal T_i = Omega_i (codes divided by s_{i-1});
/// only defined on T_i.
LevelProjection transversal_projection(const GroupChain& chain, std::size_t layer, bool with_group = false);

VerificationReport verify_nested(const NestedArray& a);
VerificationReport verify_sliced(const SlicedArray& a);

/// H-tower construction A_i = H_i C with a generator over the prime field GF(p). Explicit columns
/// may raise the claimed strength; the result is always re-verified.
NoaFamily construct_noa_rh(const ChainPtr& chain, std::uint32_t k,
                           const std::optional<std::vector<std::vector<Code>>>& columns = std::nullopt,
                           std::uint32_t strength = 2);

/// As above with the generator over F_1 = GF(s_1); F_1 must act on all layers.
NoaFamily construct_noa_subfield(const ChainPtr& chain, std::uint32_t k,
                                 const std::optional<std::vector<std::vector<Code>>>& columns = std::nullopt,
                                 std::uint32_t strength = 2);

/// Bush matrix in place of the generator: strength k with s_1 + 1 columns.
NoaFamily construct_noa_bush(const ChainPtr& chain, std::uint32_t k);

/// Arrays derived from D = V V'_{T_1} with V the outer-first enumeration.
struct NdmProductFamily {
  GroupMatrix a;        // input OA(n, m, s_I, 2)
  GroupMatrix d;        // D(s_I, s_1, s_I)
  NestedArray ndm;      // (Delta^1_1, ..., Delta^{I-1}_1, D; rho_1, ..., rho_I)
  std::vector<SlicedArray> delta_slices;  // Delta^i_l, i = 1..I-1
  GroupMatrix product;  // A (+) D, a-major row order
  /// Row blocks A (+) Delta^1_l stacked in l order, so A (+) Delta^i_1 and
  /// A (+) Delta(i, k) are row prefixes and A (+) Delta^i_l are row blocks.
  NestedArray noa;
  std::vector<SlicedArray> sliced;  // A (+) Delta^i_l, i = 1..I-1

  /// (Delta(i, k), D; rho_j, rho_I).
  NestedArray two_layer_ndm(std::size_t i, std::size_t k, std::size_t j) const;
  /// (A (+) Delta(i, k), A (+) D; rho_j, rho_I), with A (+) D in stacked order.
  NestedArray two_layer_noa(std::size_t i, std::size_t k, std::size_t j) const;
};

/// Throws std::invalid_argument for omega rings, when F_1 does not act on the
/// layers, or when A is not a strength-2 OA over F_I.
NdmProductFamily construct_from_ndm(const ChainPtr& chain, const GroupMatrix& a);

/// Kronecker-sum family B_I = A_I (+)_c ... (+)_c A_1 with inputs[i-1] = A_i
/// over Omega_i. Layers are the prefixes of n_1...n_i rows of B_I.
NoaFamily construct_noa_kron_multi(const ChainPtr& chain, const std::vector<GroupMatrix>& inputs,
                                   std::uint32_t strength = 2);

/// Two-layer case: the sliced array (B_1, ..., B_{n_2}; rho_1) and the
/// prefix families (B^l, B; rho_1, rho_2) for l = 1..n_2-1.
struct KronSoa {
  SlicedArray sliced;
  std::vector<NestedArray> prefixes;
};
KronSoa construct_soa_kron(const ChainPtr& chain, const GroupMatrix& a2, const GroupMatrix& a1,
                           std::uint32_t strength = 2);

/// E_I = D_I (+)_c ... (+)_c D_1, its prefix NDM family, and the slices
/// Delta^i_l (i = 1..I-1).
NoaFamily construct_ndm_kron(const ChainPtr& chain, const std::vector<GroupMatrix>& inputs);

}  // namespace nestfill
