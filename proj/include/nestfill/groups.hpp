#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nestfill/galois.hpp"

namespace nestfill {

/// A finite abelian base group: Z_n, or the additive group of a field.
class BaseGroup {
 public:
  static BaseGroup cyclic(std::uint32_t n);
  static BaseGroup additive(FieldPtr field);

  std::uint32_t order() const noexcept { return order_; }
  bool is_field() const noexcept { return field_ != nullptr; }
  const FieldPtr& field() const noexcept { return field_; }

  Code add(Code a, Code b) const;
  Code neg(Code a) const;
  std::string format(Code a) const;
  Code parse(std::string_view text) const;

  bool operator==(const BaseGroup& other) const noexcept;

 private:
  BaseGroup(std::uint32_t order, FieldPtr field) : order_(order), field_(std::move(field)) {}

  std::uint32_t order_;
  FieldPtr field_;
};

enum class ChainKind { field_tower, omega_ring };

/// How the layers of a field tower sit inside GF(p^{u_I}).
enum class TowerNesting {
  degree,    // F_i = polynomials of degree < u_i, transversals spanned by monomials
  subfield,  // F_i = the subfield GF(p^{u_i}); requires u_i | u_{i+1}
};

enum class EnumerationOrder {
  inner_first,  // V_{T_1} (+) V_{T_2} (+) ... (+) V_{T_I}: T_1 varies slowest
  outer_first,  // V_{T_I} (+) ... (+) V_{T_1}: T_I varies slowest
};

class GroupChain;
using ChainPtr = std::shared_ptr<const GroupChain>;

/**
 * A tower F_1 < F_2 < ... < F_I of finite abelian groups together with its
 * transversal decomposition F_i = F_{i-1} (+) T_i.
 *
 * Elements of F_I are addressed by a chain code: the mixed-radix number whose
 * digits are the coordinates of the element in the decomposition, with the
 * T_1 digits least significant. Consequently F_i is exactly the code range
 * [0, s_i), T_i holds the multiples of s_{i-1} below s_i, and the subgroup
 * projection rho_i is code mod s_i.
 *
 * For a degree-nested field tower the chain code coincides with the field's
 * canonical code. For a subfield tower the coordinates are taken in a basis
 * adapted to the subfield chain (each layer extends the previous basis by the
 * smallest field codes outside its span).
 */
class GroupChain {
 public:
  /// Throws std::invalid_argument unless u_chain is strictly increasing with
  /// u_1 >= 1 (and, for subfield nesting, u_i | u_{i+1}).
  static ChainPtr field_tower(std::uint32_t p, std::vector<std::uint32_t> u_chain,
                              std::optional<std::vector<std::uint32_t>> modulus = std::nullopt,
                              TowerNesting nesting = TowerNesting::degree);
  /// Layer i adds Omega_i = Psi_i w^{i-1}.
  static ChainPtr omega_ring(std::vector<BaseGroup> bases);

  ChainKind kind() const noexcept { return kind_; }
  TowerNesting nesting() const noexcept { return nesting_; }
  std::size_t layers() const noexcept { return layer_sizes_.size(); }
  /// s_i for 1 <= i <= I; size(0) == 1.
  std::uint32_t size(std::size_t layer) const;
  std::uint32_t order() const noexcept { return layer_sizes_.back(); }
  const std::vector<std::uint32_t>& layer_sizes() const noexcept { return layer_sizes_; }

  /// Field tower parameters (empty for omega rings).
  std::uint32_t characteristic() const noexcept { return p_; }
  const std::vector<std::uint32_t>& degree_chain() const noexcept { return u_chain_; }
  /// Omega ring bases (empty for field towers).
  const std::vector<BaseGroup>& bases() const noexcept { return bases_; }

  Code add(Code a, Code b) const;
  Code neg(Code a) const;
  Code sub(Code a, Code b) const { return add(a, neg(b)); }
  bool contains(std::size_t layer, Code c) const { return c < size(layer); }

  /// T_i in ascending code order (zero first).
  std::vector<Code> transversal(std::size_t layer) const;
  /// (beta_1, ..., beta_I) with beta_i in T_i and sum beta_i == c.
  std::vector<Code> decompose(Code c) const;
  /// rho_i(c) = beta_1 + ... + beta_i.
  Code project(std::size_t layer, Code c) const;
  /// Kronecker-sum enumeration of F_I; the first element is 0.
  std::vector<Code> enumerate(EnumerationOrder order) const;

  /// True for field towers.
  bool has_multiplication() const noexcept { return field_ != nullptr; }
  /// Throws std::logic_error for omega rings.
  const Field& field() const;
  const FieldPtr& field_ptr() const noexcept { return field_; }
  Code mul(Code a, Code b) const;
  /// Chain code <-> canonical field code (field towers only).
  Code to_field_code(Code c) const;
  Code from_field_code(Code f) const;
  /// Chain code of the multiplicative identity.
  Code one() const;

  /// Field towers use polynomial text. Omega rings print psi_0 first, then the
  /// psi_b w^b terms by ascending b: "x+1+2w+w2". A multi-term field
  /// coefficient is parenthesised, "(x+1)w". Zero prints as "0".
  std::string format(Code c) const;
  /// Inverse of format. Also accepts any term order, "w^2" for "w2", and the
  /// Greek omega in place of w.
  Code parse(std::string_view text) const;

  bool operator==(const GroupChain& other) const noexcept;

 private:
  GroupChain() = default;
  void check(Code c) const;
  std::vector<std::uint32_t> digits(Code c) const;
  Code from_digits(const std::vector<std::uint32_t>& d) const;

  ChainKind kind_ = ChainKind::field_tower;
  TowerNesting nesting_ = TowerNesting::degree;
  std::uint32_t p_ = 0;
  std::vector<std::uint32_t> u_chain_;
  std::vector<BaseGroup> bases_;
  FieldPtr field_;
  // One entry per mixed-radix digit, least significant first.
  std::vector<BaseGroup> digit_groups_;
  std::vector<std::uint32_t> layer_sizes_;
  // Digit index where each layer starts, plus a final sentinel.
  std::vector<std::size_t> layer_digit_begin_;
  std::vector<Code> chain_to_field_;
  std::vector<Code> field_to_chain_;
};

bool same_chain(const ChainPtr& a, const ChainPtr& b) noexcept;

/// Modulus projection: residue of the polynomial of a GF(p^u) element modulo
/// another polynomial over Z_p, returned as a canonical code of the residue.
Code residue_projection(const Field& field, Code element, const std::vector<std::uint32_t>& divisor);

}  // namespace nestfill
