#include "nestfill/groups.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace nestfill {

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Split on '+' outside parentheses.
std::vector<std::string_view> split_terms(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (depth < 0) throw std::invalid_argument("unbalanced parentheses in '" + std::string(s) + "'");
    if (s[i] == '+' && depth == 0) {
      out.push_back(strip(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) throw std::invalid_argument("unbalanced parentheses in '" + std::string(s) + "'");
  out.push_back(strip(s.substr(start)));
  return out;
}

std::string replace_omega(std::string_view text) {
  // U+03C9 GREEK SMALL LETTER OMEGA is 0xCF 0x89 in UTF-8.
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 1 < text.size() && static_cast<unsigned char>(text[i]) == 0xCF &&
        static_cast<unsigned char>(text[i + 1]) == 0x89) {
      out += 'w';
      ++i;
    } else {
      out += text[i];
    }
  }
  return out;
}

std::uint32_t parse_small(std::string_view s, std::string_view whole) {
  if (s.empty() || s.size() > 9 ||
      !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw std::invalid_argument("malformed element '" + std::string(whole) + "'");
  return static_cast<std::uint32_t>(std::stoul(std::string(s)));
}

}  // namespace

BaseGroup BaseGroup::cyclic(std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("Z_0 is not a finite group");
  return BaseGroup(n, nullptr);
}

BaseGroup BaseGroup::additive(FieldPtr field) {
  if (!field) throw std::invalid_argument("null field");
  const auto order = field->order();
  return BaseGroup(order, std::move(field));
}

Code BaseGroup::add(Code a, Code b) const {
  if (field_) return field_->add(a, b);
  if (a >= order_ || b >= order_) throw std::out_of_range("element outside Z_n");
  return static_cast<Code>((static_cast<std::uint64_t>(a) + b) % order_);
}

Code BaseGroup::neg(Code a) const {
  if (field_) return field_->neg(a);
  if (a >= order_) throw std::out_of_range("element outside Z_n");
  return (order_ - a) % order_;
}

std::string BaseGroup::format(Code a) const {
  if (field_) return field_->format(a);
  if (a >= order_) throw std::out_of_range("element outside Z_n");
  return std::to_string(a);
}

Code BaseGroup::parse(std::string_view text) const {
  if (field_) return field_->parse(text);
  Code acc = 0;
  for (auto term : split_terms(strip(text))) acc = add(acc, parse_small(term, text) % order_);
  return acc;
}

bool BaseGroup::operator==(const BaseGroup& other) const noexcept {
  if (order_ != other.order_) return false;
  if (!field_ || !other.field_) return !field_ && !other.field_;
  return *field_ == *other.field_;
}

ChainPtr GroupChain::field_tower(std::uint32_t p, std::vector<std::uint32_t> u_chain,
                                 std::optional<std::vector<std::uint32_t>> modulus, TowerNesting nesting) {
  if (u_chain.empty()) throw std::invalid_argument("degree chain must not be empty");
  if (u_chain.front() == 0) throw std::invalid_argument("degree chain entries must be positive");
  for (std::size_t i = 1; i < u_chain.size(); ++i) {
    if (u_chain[i] <= u_chain[i - 1]) throw std::invalid_argument("degree chain must be strictly increasing");
    if (nesting == TowerNesting::subfield && u_chain[i] % u_chain[i - 1] != 0)
      throw std::invalid_argument("subfield tower requires u_i | u_{i+1}");
  }
  std::shared_ptr<GroupChain> chain(new GroupChain());
  chain->kind_ = ChainKind::field_tower;
  chain->nesting_ = nesting;
  chain->p_ = p;
  chain->u_chain_ = u_chain;
  chain->field_ = make_field(p, u_chain.back(), std::move(modulus));
  const Field& f = *chain->field_;
  chain->digit_groups_.assign(u_chain.back(), BaseGroup::cyclic(p));
  chain->layer_digit_begin_.push_back(0);
  for (auto u : u_chain) {
    chain->layer_digit_begin_.push_back(u);
    std::uint32_t size = 1;
    for (std::uint32_t j = 0; j < u; ++j) size *= p;
    chain->layer_sizes_.push_back(size);
  }

  if (nesting == TowerNesting::subfield) {
    if (f.order() > (1U << 20)) throw std::invalid_argument("subfield tower too large");
    // Adapted basis: extend the basis of F_{i-1} by the smallest field codes of
    // F_i = {g : g^{s_i} = g} lying outside the current span.
    std::vector<Code> basis;
    std::vector<char> in_span(f.order(), 0);
    std::vector<Code> span{0};
    in_span[0] = 1;
    for (std::size_t layer = 0; layer < u_chain.size(); ++layer) {
      const std::uint32_t s = chain->layer_sizes_[layer];
      for (Code g = 1; g < f.order() && basis.size() < u_chain[layer]; ++g) {
        if (in_span[g] || f.pow(g, s) != g) continue;
        basis.push_back(g);
        std::vector<Code> grown;
        grown.reserve(span.size() * p);
        for (Code v : span) {
          Code w = v;
          for (std::uint32_t c = 0; c < p; ++c) {
            grown.push_back(w);
            in_span[w] = 1;
            w = f.add(w, g);
          }
        }
        span = std::move(grown);
      }
      if (basis.size() != u_chain[layer]) throw std::logic_error("failed to build subfield basis");
    }
    // The span enumeration order above is exactly the mixed-radix chain order:
    // the newest basis vector varies fastest, so rebuild explicitly.
    chain->chain_to_field_.assign(f.order(), 0);
    chain->field_to_chain_.assign(f.order(), 0);
    for (Code c = 0; c < f.order(); ++c) {
      Code value = 0;
      Code rest = c;
      for (Code b : basis) {
        for (std::uint32_t k = 0; k < rest % p; ++k) value = f.add(value, b);
        rest /= p;
      }
      chain->chain_to_field_[c] = value;
      chain->field_to_chain_[value] = c;
    }
  }
  return chain;
}

ChainPtr GroupChain::omega_ring(std::vector<BaseGroup> bases) {
  if (bases.empty()) throw std::invalid_argument("omega ring needs at least one base group");
  std::shared_ptr<GroupChain> chain(new GroupChain());
  chain->kind_ = ChainKind::omega_ring;
  chain->bases_ = bases;
  chain->digit_groups_ = bases;
  std::uint64_t size = 1;
  chain->layer_digit_begin_.push_back(0);
  for (std::size_t i = 0; i < bases.size(); ++i) {
    size *= bases[i].order();
    if (size > (1ULL << 31)) throw std::invalid_argument("omega ring too large");
    chain->layer_sizes_.push_back(static_cast<std::uint32_t>(size));
    chain->layer_digit_begin_.push_back(i + 1);
  }
  return chain;
}

std::uint32_t GroupChain::size(std::size_t layer) const {
  if (layer == 0) return 1;
  if (layer > layers()) throw std::out_of_range("layer " + std::to_string(layer) + " out of range");
  return layer_sizes_[layer - 1];
}

void GroupChain::check(Code c) const {
  if (c >= order()) throw std::out_of_range("code " + std::to_string(c) + " outside F_I");
}

std::vector<std::uint32_t> GroupChain::digits(Code c) const {
  check(c);
  std::vector<std::uint32_t> d(digit_groups_.size());
  for (std::size_t j = 0; j < digit_groups_.size(); ++j) {
    d[j] = c % digit_groups_[j].order();
    c /= digit_groups_[j].order();
  }
  return d;
}

Code GroupChain::from_digits(const std::vector<std::uint32_t>& d) const {
  Code c = 0;
  for (std::size_t j = digit_groups_.size(); j-- > 0;) c = c * digit_groups_[j].order() + d[j];
  return c;
}

Code GroupChain::add(Code a, Code b) const {
  if (field_) {
    check(a);
    check(b);
    return field_->add(a, b);  // coordinates add digit-wise mod p in any basis
  }
  auto da = digits(a);
  const auto db = digits(b);
  for (std::size_t j = 0; j < da.size(); ++j) da[j] = digit_groups_[j].add(da[j], db[j]);
  return from_digits(da);
}

Code GroupChain::neg(Code a) const {
  if (field_) {
    check(a);
    return field_->neg(a);
  }
  auto da = digits(a);
  for (std::size_t j = 0; j < da.size(); ++j) da[j] = digit_groups_[j].neg(da[j]);
  return from_digits(da);
}

std::vector<Code> GroupChain::transversal(std::size_t layer) const {
  const std::uint32_t lo = size(layer - 1);
  const std::uint32_t hi = size(layer);
  std::vector<Code> out;
  out.reserve(hi / lo);
  for (Code k = 0; k < hi / lo; ++k) out.push_back(k * lo);
  return out;
}

std::vector<Code> GroupChain::decompose(Code c) const {
  check(c);
  std::vector<Code> beta(layers());
  for (std::size_t i = 1; i <= layers(); ++i) beta[i - 1] = c % size(i) - c % size(i - 1);
  return beta;
}

Code GroupChain::project(std::size_t layer, Code c) const {
  check(c);
  if (layer == 0 || layer > layers()) throw std::out_of_range("layer " + std::to_string(layer) + " out of range");
  return c % size(layer);
}

std::vector<Code> GroupChain::enumerate(EnumerationOrder order) const {
  std::vector<Code> acc{0};
  for (std::size_t step = 0; step < layers(); ++step) {
    const std::size_t layer = order == EnumerationOrder::inner_first ? step + 1 : layers() - step;
    const auto t = transversal(layer);
    std::vector<Code> next;
    next.reserve(acc.size() * t.size());
    for (Code a : acc)
      for (Code b : t) next.push_back(add(a, b));
    acc = std::move(next);
  }
  return acc;
}

const Field& GroupChain::field() const {
  if (!field_) throw std::logic_error("omega rings carry no multiplication");
  return *field_;
}

Code GroupChain::to_field_code(Code c) const {
  check(c);
  field();
  return chain_to_field_.empty() ? c : chain_to_field_[c];
}

Code GroupChain::from_field_code(Code f) const {
  check(f);
  field();
  return field_to_chain_.empty() ? f : field_to_chain_[f];
}

Code GroupChain::mul(Code a, Code b) const {
  return from_field_code(field().mul(to_field_code(a), to_field_code(b)));
}

Code GroupChain::one() const { return from_field_code(field().one()); }

std::string GroupChain::format(Code c) const {
  if (field_) return field_->format(to_field_code(c));
  const auto d = digits(c);
  std::string out;
  for (std::size_t b = 0; b < d.size(); ++b) {
    if (d[b] == 0) continue;
    if (!out.empty()) out += '+';
    std::string coef = bases_[b].format(d[b]);
    if (b == 0) {
      out += coef;
      continue;
    }
    if (coef == "1") {
      coef.clear();
    } else if (coef.find('+') != std::string::npos) {
      coef = "(" + coef + ")";
    }
    out += coef + "w";
    if (b >= 2) out += std::to_string(b);
  }
  return out.empty() ? "0" : out;
}

Code GroupChain::parse(std::string_view text) const {
  if (field_) return from_field_code(field_->parse(text));
  const std::string normalized = replace_omega(text);
  const std::string_view whole = strip(normalized);
  if (whole.empty()) throw std::invalid_argument("empty element text");
  std::vector<std::uint32_t> d(bases_.size(), 0);
  for (auto term : split_terms(whole)) {
    if (term.empty()) throw std::invalid_argument("malformed element '" + std::string(whole) + "'");
    // Locate the indeterminate outside any parenthesised coefficient.
    std::size_t wpos = std::string_view::npos;
    int depth = 0;
    for (std::size_t i = 0; i < term.size(); ++i) {
      if (term[i] == '(') ++depth;
      if (term[i] == ')') --depth;
      if (term[i] == 'w' && depth == 0) {
        wpos = i;
        break;
      }
    }
    if (wpos == std::string_view::npos) {
      d[0] = bases_[0].add(d[0], bases_[0].parse(term));
      continue;
    }
    std::string_view coef = strip(term.substr(0, wpos));
    if (!coef.empty() && coef.back() == '*') coef = strip(coef.substr(0, coef.size() - 1));
    if (coef.size() >= 2 && coef.front() == '(' && coef.back() == ')') coef = coef.substr(1, coef.size() - 2);
    std::string_view expo = strip(term.substr(wpos + 1));
    if (!expo.empty() && expo.front() == '^') expo = strip(expo.substr(1));
    const std::uint32_t b = expo.empty() ? 1 : parse_small(expo, whole);
    if (b == 0 || b >= bases_.size())
      throw std::invalid_argument("power of w out of range in '" + std::string(whole) + "'");
    const Code value = coef.empty() ? (bases_[b].is_field() ? bases_[b].field()->one() : 1 % bases_[b].order())
                                    : bases_[b].parse(coef);
    d[b] = bases_[b].add(d[b], value);
  }
  return from_digits(d);
}

bool GroupChain::operator==(const GroupChain& other) const noexcept {
  if (kind_ != other.kind_) return false;
  if (kind_ == ChainKind::omega_ring) return bases_ == other.bases_;
  return nesting_ == other.nesting_ && p_ == other.p_ && u_chain_ == other.u_chain_ && *field_ == *other.field_;
}

bool same_chain(const ChainPtr& a, const ChainPtr& b) noexcept {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

Code residue_projection(const Field& field, Code element, const std::vector<std::uint32_t>& divisor) {
  const auto r = poly_mod(field.characteristic(), field.coefficients(element), divisor);
  Code code = 0;
  for (std::size_t j = r.size(); j-- > 0;) code = code * field.characteristic() + r[j];
  return code;
}

}  // namespace nestfill
