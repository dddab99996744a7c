#include "nestfill/galois.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace nestfill {

namespace {

std::uint32_t checked_power(std::uint32_t p, std::uint32_t u) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < u; ++i) {
    r *= p;
    if (r > (1ULL << 31)) throw std::invalid_argument("field order too large");
  }
  return static_cast<std::uint32_t>(r);
}

void trim(std::vector<std::uint32_t>& poly) {
  while (!poly.empty() && poly.back() == 0) poly.pop_back();
}

std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) {
  for (std::uint32_t x = 1; x < p; ++x)
    if ((static_cast<std::uint64_t>(a) * x) % p == 1) return x;
  throw std::domain_error("no inverse modulo p");
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_uint(std::string_view s, std::string_view whole) {
  if (s.empty()) throw std::invalid_argument("malformed element '" + std::string(whole) + "'");
  std::uint64_t v = 0;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw std::invalid_argument("malformed element '" + std::string(whole) + "'");
    v = v * 10 + static_cast<std::uint64_t>(ch - '0');
    if (v > (1ULL << 40)) throw std::invalid_argument("number too large in '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::uint32_t> poly_mod(std::uint32_t p, std::vector<std::uint32_t> poly,
                                    std::span<const std::uint32_t> divisor) {
  std::vector<std::uint32_t> d(divisor.begin(), divisor.end());
  trim(d);
  if (d.empty()) throw std::invalid_argument("division by zero polynomial");
  const std::size_t dd = d.size() - 1;
  const std::uint32_t lead_inv = inv_mod(d.back(), p);
  trim(poly);
  while (poly.size() > dd) {
    const std::size_t shift = poly.size() - 1 - dd;
    const std::uint32_t factor = static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(poly.back()) * lead_inv) % p);
    for (std::size_t j = 0; j <= dd; ++j) {
      const std::uint64_t sub = static_cast<std::uint64_t>(factor) * d[j] % p;
      poly[shift + j] = static_cast<std::uint32_t>((poly[shift + j] + p - sub) % p);
    }
    trim(poly);
  }
  poly.resize(dd, 0);
  return poly;
}

bool is_irreducible(std::uint32_t p, std::span<const std::uint32_t> poly) {
  std::vector<std::uint32_t> f(poly.begin(), poly.end());
  trim(f);
  if (f.size() < 2) return false;
  const std::uint32_t deg = static_cast<std::uint32_t>(f.size() - 1);
  for (std::uint32_t dg = 1; dg <= deg / 2; ++dg) {
    const std::uint32_t count = checked_power(p, dg);
    for (std::uint32_t low = 0; low < count; ++low) {
      std::vector<std::uint32_t> divisor(dg + 1, 0);
      std::uint32_t rest = low;
      for (std::uint32_t j = 0; j < dg; ++j) {
        divisor[j] = rest % p;
        rest /= p;
      }
      divisor[dg] = 1;
      const auto r = poly_mod(p, f, divisor);
      if (std::all_of(r.begin(), r.end(), [](std::uint32_t c) { return c == 0; })) return false;
    }
  }
  return true;
}

std::vector<std::uint32_t> default_modulus(std::uint32_t p, std::uint32_t u) {
  if (!is_prime(p)) throw std::invalid_argument("characteristic " + std::to_string(p) + " is not prime");
  if (u == 0) throw std::invalid_argument("extension degree must be positive");
  const std::uint32_t count = checked_power(p, u);
  for (std::uint32_t low = 0; low < count; ++low) {
    if (low % p == 0) continue;  // constant term must be nonzero
    std::vector<std::uint32_t> poly(u + 1, 0);
    std::uint32_t rest = low;
    for (std::uint32_t j = 0; j < u; ++j) {
      poly[j] = rest % p;
      rest /= p;
    }
    poly[u] = 1;
    if (is_irreducible(p, poly)) return poly;
  }
  throw std::logic_error("no irreducible polynomial found");
}

Field::Field(std::uint32_t p, std::uint32_t u, std::optional<std::vector<std::uint32_t>> modulus)
    : p_(p), u_(u) {
  if (!is_prime(p)) throw std::invalid_argument("characteristic " + std::to_string(p) + " is not prime");
  if (u == 0) throw std::invalid_argument("extension degree must be positive");
  order_ = checked_power(p, u);
  if (modulus) {
    const auto& m = *modulus;
    if (m.size() != u + 1) throw std::invalid_argument("modulus must have u+1 coefficients");
    if (std::any_of(m.begin(), m.end(), [p](std::uint32_t c) { return c >= p; }))
      throw std::invalid_argument("modulus coefficient out of range");
    if (m.back() != 1) throw std::invalid_argument("modulus must be monic");
    if (!is_irreducible(p, m)) throw std::invalid_argument("modulus is reducible");
    modulus_ = m;
  } else {
    modulus_ = default_modulus(p, u);
  }
}

void Field::check(Code a) const {
  if (a >= order_) throw std::out_of_range("element code " + std::to_string(a) + " outside GF(" +
                                           std::to_string(order_) + ")");
}

std::vector<std::uint32_t> Field::coefficients(Code a) const {
  check(a);
  std::vector<std::uint32_t> c(u_, 0);
  for (std::uint32_t j = 0; j < u_; ++j) {
    c[j] = a % p_;
    a /= p_;
  }
  return c;
}

Code Field::from_coefficients(std::span<const std::uint32_t> coeffs) const {
  if (coeffs.size() > u_) throw std::invalid_argument("too many coefficients");
  Code code = 0;
  Code place = 1;
  for (std::uint32_t c : coeffs) {
    if (c >= p_) throw std::invalid_argument("coefficient out of range");
    code += c * place;
    place *= p_;
  }
  return code;
}

Code Field::add(Code a, Code b) const {
  check(a);
  check(b);
  Code r = 0;
  Code place = 1;
  for (std::uint32_t j = 0; j < u_; ++j) {
    r += ((a % p_ + b % p_) % p_) * place;
    a /= p_;
    b /= p_;
    place *= p_;
  }
  return r;
}

Code Field::neg(Code a) const {
  check(a);
  Code r = 0;
  Code place = 1;
  for (std::uint32_t j = 0; j < u_; ++j) {
    r += ((p_ - a % p_) % p_) * place;
    a /= p_;
    place *= p_;
  }
  return r;
}

Code Field::sub(Code a, Code b) const { return add(a, neg(b)); }

Code Field::mul(Code a, Code b) const {
  const auto ca = coefficients(a);
  const auto cb = coefficients(b);
  std::vector<std::uint32_t> prod(2 * u_ - 1, 0);
  for (std::uint32_t i = 0; i < u_; ++i) {
    if (ca[i] == 0) continue;
    for (std::uint32_t j = 0; j < u_; ++j)
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + static_cast<std::uint64_t>(ca[i]) * cb[j]) % p_);
  }
  return from_coefficients(poly_mod(p_, std::move(prod), modulus_));
}

Code Field::pow(Code a, std::uint64_t e) const {
  Code result = one();
  Code base = a;
  while (e > 0) {
    if (e & 1U) result = mul(result, base);
    base = mul(base, base);
    e >>= 1U;
  }
  return result;
}

Code Field::inv(Code a) const {
  check(a);
  if (a == 0) throw std::domain_error("zero has no multiplicative inverse");
  return pow(a, order_ - 2);
}

std::string Field::format(Code a) const {
  const auto c = coefficients(a);
  std::string out;
  for (std::uint32_t j = u_; j-- > 0;) {
    if (c[j] == 0) continue;
    if (!out.empty()) out += '+';
    if (j == 0) {
      out += std::to_string(c[j]);
      continue;
    }
    if (c[j] != 1) out += std::to_string(c[j]);
    out += 'x';
    if (j > 1) out += '^' + std::to_string(j);
  }
  return out.empty() ? "0" : out;
}

Code Field::parse(std::string_view text) const {
  const std::string_view whole = strip(text);
  if (whole.empty()) throw std::invalid_argument("empty element text");
  std::vector<std::uint64_t> acc(u_, 0);
  std::string_view rest = whole;
  while (true) {
    const auto plus = rest.find('+');
    std::string_view term = strip(rest.substr(0, plus));
    if (term.empty()) throw std::invalid_argument("malformed element '" + std::string(whole) + "'");
    const auto xpos = term.find('x');
    if (xpos == std::string_view::npos) {
      acc[0] += parse_uint(term, whole);
    } else {
      std::string_view coef = strip(term.substr(0, xpos));
      if (!coef.empty() && coef.back() == '*') coef = strip(coef.substr(0, coef.size() - 1));
      const std::uint64_t c = coef.empty() ? 1 : parse_uint(coef, whole);
      std::string_view expo = strip(term.substr(xpos + 1));
      std::uint64_t e = 1;
      if (!expo.empty()) {
        if (expo.front() != '^') throw std::invalid_argument("malformed element '" + std::string(whole) + "'");
        e = parse_uint(strip(expo.substr(1)), whole);
      }
      if (e >= u_) {
        // x^e with e >= u is reduced modulo the field polynomial; in GF(p) the
        // indeterminate is the root -modulus[0] of the linear modulus.
        const Code x = u_ > 1 ? p_ : (p_ - modulus_[0]) % p_;
        const auto ce = coefficients(pow(x, e));
        for (std::uint32_t j = 0; j < u_; ++j) acc[j] += c * ce[j];
      } else {
        acc[e] += c;
      }
    }
    if (plus == std::string_view::npos) break;
    rest = rest.substr(plus + 1);
  }
  std::vector<std::uint32_t> coeffs(u_);
  for (std::uint32_t j = 0; j < u_; ++j) coeffs[j] = static_cast<std::uint32_t>(acc[j] % p_);
  return from_coefficients(coeffs);
}

FieldPtr make_field(std::uint32_t p, std::uint32_t u, std::optional<std::vector<std::uint32_t>> modulus) {
  return std::make_shared<const Field>(p, u, std::move(modulus));
}

FieldElement::FieldElement(FieldPtr field, Code code) : field_(std::move(field)), code_(code) {
  if (!field_) throw std::invalid_argument("null field");
  if (code_ >= field_->order()) throw std::out_of_range("element code outside field");
}

namespace {
const Field& common_field(const FieldElement& a, const FieldElement& b) {
  if (a.field() != b.field() && !(*a.field() == *b.field()))
    throw std::invalid_argument("field elements belong to different fields");
  return *a.field();
}
}  // namespace

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
  return {a.field_, common_field(a, b).add(a.code_, b.code_)};
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) {
  return {a.field_, common_field(a, b).sub(a.code_, b.code_)};
}

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
  return {a.field_, common_field(a, b).mul(a.code_, b.code_)};
}

FieldElement fe_add(const FieldElement& a, const FieldElement& b) { return a + b; }
FieldElement fe_mul(const FieldElement& a, const FieldElement& b) { return a * b; }

std::vector<FieldElement> fe_enumerate(const FieldPtr& field) {
  std::vector<FieldElement> out;
  out.reserve(field->order());
  for (Code c = 0; c < field->order(); ++c) out.emplace_back(field, c);
  return out;
}

}  // namespace nestfill
