#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nestfill {

/// Integer code of a group or field element. For GF(p^u) the code of
/// c_0 + c_1 x + ... + c_{u-1} x^{u-1} is sum_j c_j p^j.
using Code = std::uint32_t;

bool is_prime(std::uint32_t n);

/**
 * Finite field GF(p^u) stored as polynomials over Z_p reduced modulo a monic
 * irreducible polynomial of degree u. Elements are exchanged as integer codes;
 * FieldElement wraps a code together with its owning field.
 *
 * Immutable after construction.
 */
class Field {
 public:
  /// Throws std::invalid_argument for non-prime p, u == 0, or a supplied
  /// modulus that is not monic, not of degree u, or reducible.
  Field(std::uint32_t p, std::uint32_t u,
        std::optional<std::vector<std::uint32_t>> modulus = std::nullopt);

  std::uint32_t characteristic() const noexcept { return p_; }
  std::uint32_t degree() const noexcept { return u_; }
  std::uint32_t order() const noexcept { return order_; }
  /// u+1 coefficients, lowest degree first; the last one is 1.
  const std::vector<std::uint32_t>& modulus() const noexcept { return modulus_; }

  Code zero() const noexcept { return 0; }
  Code one() const noexcept { return 1; }

  Code add(Code a, Code b) const;
  Code sub(Code a, Code b) const;
  Code neg(Code a) const;
  Code mul(Code a, Code b) const;
  Code pow(Code a, std::uint64_t e) const;
  /// Throws std::domain_error for a == 0.
  Code inv(Code a) const;

  std::vector<std::uint32_t> coefficients(Code a) const;
  Code from_coefficients(std::span<const std::uint32_t> coeffs) const;

  /// Polynomial text, highest degree first: "x^2+x+1", "2x+1", "0".
  std::string format(Code a) const;
  /// Accepts terms in any order ("1+x", "x^2+x+1", "2*x^2", "x+x^2").
  /// Throws std::invalid_argument on malformed input.
  Code parse(std::string_view text) const;

  bool operator==(const Field& other) const noexcept {
    return p_ == other.p_ && u_ == other.u_ && modulus_ == other.modulus_;
  }

 private:
  void check(Code a) const;

  std::uint32_t p_;
  std::uint32_t u_;
  std::uint32_t order_;
  std::vector<std::uint32_t> modulus_;
};

using FieldPtr = std::shared_ptr<const Field>;

FieldPtr make_field(std::uint32_t p, std::uint32_t u,
                    std::optional<std::vector<std::uint32_t>> modulus = std::nullopt);

/// Smallest monic irreducible of degree u with nonzero constant term, compared
/// by the integer code of its lower coefficients. For u >= 2 this is the
/// lexicographically smallest monic irreducible; for u == 1 it picks x+1.
std::vector<std::uint32_t> default_modulus(std::uint32_t p, std::uint32_t u);

/// Trial division by every monic polynomial of degree 1..deg/2.
bool is_irreducible(std::uint32_t p, std::span<const std::uint32_t> poly);

/// Remainder of poly modulo a monic divisor over Z_p (coefficients lowest first,
/// result trimmed to deg(divisor) entries).
std::vector<std::uint32_t> poly_mod(std::uint32_t p, std::vector<std::uint32_t> poly,
                                    std::span<const std::uint32_t> divisor);

class FieldElement {
 public:
  FieldElement(FieldPtr field, Code code);

  const FieldPtr& field() const noexcept { return field_; }
  Code code() const noexcept { return code_; }
  std::vector<std::uint32_t> coefficients() const { return field_->coefficients(code_); }
  std::string to_string() const { return field_->format(code_); }

  /// Mixing elements of different fields throws std::invalid_argument.
  friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
  FieldElement operator-() const { return {field_, field_->neg(code_)}; }
  FieldElement inverse() const { return {field_, field_->inv(code_)}; }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.code_ == b.code_ && (a.field_ == b.field_ || *a.field_ == *b.field_);
  }

 private:
  FieldPtr field_;
  Code code_;
};

FieldElement fe_add(const FieldElement& a, const FieldElement& b);
FieldElement fe_mul(const FieldElement& a, const FieldElement& b);
/// All elements in ascending code order; code 0 first.
std::vector<FieldElement> fe_enumerate(const FieldPtr& field);

}  // namespace nestfill
