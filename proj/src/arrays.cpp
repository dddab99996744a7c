#include "nestfill/arrays.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace nestfill {

namespace {

constexpr std::uint64_t kMaxRows = 1ULL << 24;

std::uint64_t checked_power(std::uint64_t base, std::uint32_t e) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < e; ++i) {
    r *= base;
    if (r > kMaxRows) throw std::invalid_argument("design too large: " + std::to_string(base) + "^" + std::to_string(e));
  }
  return r;
}

void require(const VerificationReport& report) {
  if (!report) throw VerificationFailure(report);
}

void require_field_tower(const GroupChain& chain) {
  if (chain.kind() != ChainKind::field_tower)
    throw std::invalid_argument("this construction needs a Galois field tower, not an omega ring");
}

LevelMatrix levels_of(const GroupMatrix& m) { return m.data; }

GroupMatrix row_vector(const ChainPtr& chain, const std::vector<Code>& v) {
  return {chain, Matrix<Code>::from_rows({v})};
}

std::vector<std::size_t> iota_layers(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i + 1;
  return out;
}

/// Common tail of the generator-based constructions: A_I = H_I C with prefix
/// layers of s_i^k rows and slice families of the same sizes.
NoaFamily family_from_generator(const ChainPtr& chain, std::uint32_t k, const GeneratorMatrix& c,
                                std::uint32_t strength) {
  const auto h = build_h_tower(chain, k);
  NoaFamily family;
  family.nested.top = multiply(h.back(), c);
  family.nested.strength = strength;
  family.nested.projection_layers = iota_layers(chain->layers());
  for (const auto& hi : h) family.nested.layer_rows.push_back(hi.rows());
  for (std::size_t i = 1; i < chain->layers(); ++i)
    family.sliced.push_back({family.nested.top, h[i - 1].rows(), i, strength, ArrayRole::orthogonal_array});
  require(verify_nested(family.nested));
  for (const auto& s : family.sliced) require(verify_sliced(s));
  return family;
}

void require_transversal_entries(const GroupChain& chain, const GroupMatrix& a, std::size_t layer,
                                 const std::string& name) {
  const Code below = chain.size(layer - 1);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (a(r, c) % below != 0 || a(r, c) >= chain.size(layer))
        throw std::invalid_argument(name + " entry '" + chain.format(a(r, c)) + "' at row " + std::to_string(r + 1) +
                                    " is not in Omega_" + std::to_string(layer));
}

void check_kron_inputs(const ChainPtr& chain, const std::vector<GroupMatrix>& inputs, const std::string& what) {
  if (inputs.empty()) throw std::invalid_argument("no input arrays");
  if (inputs.size() != chain->layers())
    throw std::invalid_argument("need one input per layer: " + std::to_string(chain->layers()) + " layers, " +
                                std::to_string(inputs.size()) + " " + what);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!same_chain(inputs[i].chain, chain)) throw std::invalid_argument("input over a different group chain");
    if (inputs[i].rows() == 0 || inputs[i].cols() != inputs.front().cols())
      throw std::invalid_argument("inputs must be non-empty with equal column counts");
    require_transversal_entries(*chain, inputs[i], i + 1, "input " + std::to_string(i + 1));
  }
}

GroupMatrix right_nested_sum(const std::vector<GroupMatrix>& inputs) {
  GroupMatrix b = inputs.front();
  for (std::size_t i = 1; i < inputs.size(); ++i) b = col_kron_sum(inputs[i], b);
  return b;
}

}  // namespace

bool scalars_act_on_layers(const GroupChain& chain, std::uint32_t base_order) {
  if (!chain.has_multiplication() || base_order < 2 || base_order > chain.order()) return false;
  if (base_order == chain.order()) return true;
  const auto p = chain.characteristic();
  if (chain.nesting() == TowerNesting::degree && base_order == p) return true;
  if (chain.nesting() == TowerNesting::subfield && (base_order == p || base_order == chain.size(1))) return true;
  if (std::uint64_t{chain.order()} * base_order > (1ULL << 26))
    throw std::invalid_argument("chain too large to check scalar closure exhaustively");
  if (chain.one() >= base_order) return false;
  for (std::size_t i = 1; i <= chain.layers(); ++i) {
    const auto bound = chain.size(i);
    for (Code a = 0; a < bound; ++a)
      for (Code b = 0; b < base_order; ++b)
        if (chain.mul(a, b) >= bound) return false;
  }
  // The base itself must be closed.
  for (Code a = 0; a < base_order; ++a)
    for (Code b = 0; b < base_order; ++b)
      if (chain.mul(a, b) >= base_order) return false;
  return true;
}

GeneratorMatrix generator_matrix(const GroupChain& chain, std::uint32_t base_order, std::uint32_t k,
                                 const std::optional<std::vector<std::vector<Code>>>& columns) {
  if (k < 1) throw std::invalid_argument("generator dimension k must be at least 1");
  if (!chain.has_multiplication()) throw std::invalid_argument("generator matrices need a field");
  const Code one = chain.one();
  if (one >= base_order) throw std::invalid_argument("scalar range does not contain 1");
  auto admissible = [&](const std::vector<Code>& v) {
    for (Code x : v) {
      if (x >= base_order) return false;
      if (x != 0) return x == one;
    }
    return false;
  };

  std::vector<std::vector<Code>> cols;
  if (columns) {
    std::set<std::vector<Code>> seen;
    for (const auto& col : *columns) {
      if (col.size() != k)
        throw std::invalid_argument("generator column has " + std::to_string(col.size()) + " entries, expected " +
                                    std::to_string(k));
      if (!admissible(col)) throw std::invalid_argument("generator column's first nonzero entry must be 1");
      if (!seen.insert(col).second) throw std::invalid_argument("duplicate generator column");
      cols.push_back(col);
    }
    if (cols.empty()) throw std::invalid_argument("no generator columns given");
  } else {
    for (std::uint32_t i = 0; i < k; ++i) {
      std::vector<Code> e(k, 0);
      e[i] = one;
      cols.push_back(e);
    }
    const auto total = checked_power(base_order, k);
    std::vector<Code> v(k);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::uint64_t rest = idx;
      for (std::size_t i = k; i-- > 0;) {
        v[i] = static_cast<Code>(rest % base_order);
        rest /= base_order;
      }
      const auto nonzero = std::count_if(v.begin(), v.end(), [](Code x) { return x != 0; });
      if (nonzero >= 2 && admissible(v)) cols.push_back(v);
    }
  }
  GeneratorMatrix g;
  g.base_order = base_order;
  g.data = Matrix<Code>(k, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::uint32_t r = 0; r < k; ++r) g.data(r, c) = cols[c][r];
  return g;
}

GeneratorMatrix bush_matrix(const GroupChain& chain, std::uint32_t k) {
  if (k < 1) throw std::invalid_argument("strength k must be at least 1");
  const std::uint32_t s1 = chain.size(1);
  if (s1 + 1 < k)
    throw std::invalid_argument("Bush construction needs s_1 >= k - 1 (s_1 = " + std::to_string(s1) +
                                ", k = " + std::to_string(k) + ")");
  if (!scalars_act_on_layers(chain, s1))
    throw std::invalid_argument("F_1 is not a subfield acting on every layer; use a subfield tower");
  GeneratorMatrix g;
  g.base_order = s1;
  g.data = Matrix<Code>(k, s1 + 1);
  for (Code v = 0; v < s1; ++v) {
    Code power = chain.one();  // v^0 = 1, also for v = 0
    for (std::uint32_t r = 0; r < k; ++r) {
      g.data(r, v) = power;
      power = chain.mul(power, v);
    }
  }
  g.data(k - 1, s1) = chain.one();
  return g;
}

GroupMatrix full_factorial(const ChainPtr& chain, std::uint32_t s, std::uint32_t k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  const auto n = checked_power(s, k);
  Matrix<Code> out(n, k);
  for (std::uint64_t r = 0; r < n; ++r) {
    std::uint64_t rest = r;
    for (std::size_t c = k; c-- > 0;) {
      out(r, c) = static_cast<Code>(rest % s);
      rest /= s;
    }
  }
  return {chain, std::move(out)};
}

std::vector<GroupMatrix> build_h_tower(const ChainPtr& chain, std::uint32_t k) {
  checked_power(chain->order(), k);
  std::vector<GroupMatrix> h{full_factorial(chain, chain->size(1), k)};
  for (std::size_t i = 2; i <= chain->layers(); ++i) {
    const auto t = chain->transversal(i);
    const auto tuples = full_factorial(chain, static_cast<std::uint32_t>(t.size()), k);
    std::vector<GroupMatrix> blocks{h.back()};
    for (std::size_t r = 1; r < tuples.rows(); ++r) {  // row 0 is the zero tuple
      std::vector<Code> beta(k);
      for (std::uint32_t c = 0; c < k; ++c) beta[c] = t[tuples(r, c)];
      blocks.push_back(col_kron_sum(row_vector(chain, beta), h.back()));
    }
    h.push_back(vstack(blocks));
  }
  return h;
}

GroupMatrix multiply(const GroupMatrix& h, const GeneratorMatrix& c) {
  if (h.cols() != c.k())
    throw std::invalid_argument("row length " + std::to_string(h.cols()) + " does not match generator dimension " +
                                std::to_string(c.k()));
  const GroupChain& g = *h.chain;
  Matrix<Code> out(h.rows(), c.cols());
  for (std::size_t r = 0; r < h.rows(); ++r)
    for (std::size_t col = 0; col < c.cols(); ++col) {
      Code acc = 0;
      for (std::size_t l = 0; l < c.k(); ++l) acc = g.add(acc, g.mul(h(r, l), c.data(l, col)));
      out(r, col) = acc;
    }
  return {h.chain, std::move(out)};
}

GroupMatrix rao_hamming_oa(const ChainPtr& chain, std::uint32_t k) {
  const auto s = chain->order();
  return multiply(full_factorial(chain, s, k), generator_matrix(*chain, s, k));
}

LevelProjection chain_projection(const GroupChain& chain, std::size_t layer, bool with_group) {
  LevelProjection p;
  p.levels = chain.size(layer);
  p.map.resize(chain.order());
  for (Code c = 0; c < chain.order(); ++c) p.map[c] = chain.project(layer, c);
  if (with_group) p.group = GroupTable(p.levels, [&chain](Code a, Code b) { return chain.add(a, b); });
  p.name = "rho_" + std::to_string(layer);
  return p;
}

LevelProjection transversal_projection(const GroupChain& chain, std::size_t layer, bool with_group) {
  const Code below = chain.size(layer - 1);
  LevelProjection p;
  p.levels = chain.size(layer) / below;
  p.map.resize(chain.order());
  for (Code c = 0; c < chain.order(); ++c)
    p.map[c] = (c % below == 0 && c < chain.size(layer)) ? c / below : p.levels;  // non-members fail the oracle
  if (with_group)
    p.group = GroupTable(p.levels, [&chain, below](Code a, Code b) { return chain.add(a * below, b * below) / below; });
  p.name = "Omega_" + std::to_string(layer);
  return p;
}

VerificationReport verify_nested(const NestedArray& a) {
  const bool dm = a.role == ArrayRole::difference_matrix;
  if (a.layer_rows.size() != a.projection_layers.size())
    throw std::invalid_argument("one projection layer per nested layer required");
  std::vector<LevelMatrix> family;
  std::vector<LevelProjection> projections;
  for (std::size_t i = 0; i < a.layer_rows.size(); ++i) {
    if (a.layer_rows[i] > a.top.rows()) throw std::invalid_argument("layer larger than the top array");
    family.push_back(levels_of(a.top.slice_rows(0, a.layer_rows[i])));
    projections.push_back(chain_projection(*a.top.chain, a.projection_layers[i], dm));
  }
  return dm ? check_nested_dm(family, projections) : check_nested(family, projections, a.strength);
}

VerificationReport verify_sliced(const SlicedArray& a) {
  const bool dm = a.role == ArrayRole::difference_matrix;
  const auto top = levels_of(a.top);
  for (std::size_t j = 1; j <= a.layer; ++j) {
    const auto rho = chain_projection(*a.top.chain, j, dm);
    auto r = dm ? check_sliced_dm(top, a.slice_rows, rho) : check_sliced(top, a.slice_rows, rho, a.strength);
    if (!r) return r;
  }
  return VerificationReport::ok(dm ? "sliced DM" : "sliced OA");
}

NoaFamily construct_noa_rh(const ChainPtr& chain, std::uint32_t k,
                           const std::optional<std::vector<std::vector<Code>>>& columns, std::uint32_t strength) {
  require_field_tower(*chain);
  const auto p = chain->characteristic();
  if (!scalars_act_on_layers(*chain, p)) throw std::logic_error("prime field does not act on the layers");
  return family_from_generator(chain, k, generator_matrix(*chain, p, k, columns), strength);
}

NoaFamily construct_noa_subfield(const ChainPtr& chain, std::uint32_t k,
                                 const std::optional<std::vector<std::vector<Code>>>& columns,
                                 std::uint32_t strength) {
  require_field_tower(*chain);
  const auto s1 = chain->size(1);
  if (!scalars_act_on_layers(*chain, s1))
    throw std::invalid_argument("F_1 is not a subfield acting on every layer (needs u_1 | u_i); use a subfield tower");
  return family_from_generator(chain, k, generator_matrix(*chain, s1, k, columns), strength);
}

NoaFamily construct_noa_bush(const ChainPtr& chain, std::uint32_t k) {
  require_field_tower(*chain);
  return family_from_generator(chain, k, bush_matrix(*chain, k), k);
}

NestedArray NdmProductFamily::two_layer_ndm(std::size_t i, std::size_t k, std::size_t j) const {
  const auto& chain = *d.chain;
  const std::size_t top = chain.layers();
  if (!(1 <= j && j <= i && i < top)) throw std::out_of_range("need 1 <= j <= i <= I-1");
  if (k < 1 || k >= chain.order() / chain.size(i)) throw std::out_of_range("k out of range");
  return {d, {k * chain.size(i), chain.order()}, {j, top}, 2, ArrayRole::difference_matrix};
}

NestedArray NdmProductFamily::two_layer_noa(std::size_t i, std::size_t k, std::size_t j) const {
  const auto& chain = *d.chain;
  const std::size_t top = chain.layers();
  if (!(1 <= j && j <= i && i < top)) throw std::out_of_range("need 1 <= j <= i <= I-1");
  if (k < 1 || k >= chain.order() / chain.size(i)) throw std::out_of_range("k out of range");
  return {noa.top, {a.rows() * k * chain.size(i), a.rows() * chain.order()}, {j, top}, 2,
          ArrayRole::orthogonal_array};
}

NdmProductFamily construct_from_ndm(const ChainPtr& chain, const GroupMatrix& a) {
  require_field_tower(*chain);
  if (!same_chain(a.chain, chain)) throw std::invalid_argument("input OA lives over a different chain");
  if (!scalars_act_on_layers(*chain, chain->size(1)))
    throw std::invalid_argument("F_1 is not a subfield acting on every layer; use a subfield tower");
  if (a.cols() < 2) throw std::invalid_argument("input OA needs at least two columns");
  require(check_oa_strength(levels_of(a), chain->order(), 2));

  NdmProductFamily f;
  f.a = a;
  const auto v = chain->enumerate(EnumerationOrder::outer_first);
  const auto t1 = chain->transversal(1);
  Matrix<Code> d(v.size(), t1.size());
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < t1.size(); ++c) d(r, c) = chain->mul(v[r], t1[c]);
  f.d = {chain, std::move(d)};

  const std::size_t layers = chain->layers();
  f.ndm = {f.d, {}, iota_layers(layers), 2, ArrayRole::difference_matrix};
  for (std::size_t i = 1; i <= layers; ++i) f.ndm.layer_rows.push_back(chain->size(i));
  for (std::size_t i = 1; i < layers; ++i)
    f.delta_slices.push_back({f.d, chain->size(i), i, 2, ArrayRole::difference_matrix});

  f.product = kron_sum(a, f.d);
  const std::size_t s1 = chain->size(1);
  std::vector<GroupMatrix> blocks;
  for (std::size_t l = 0; l < chain->order() / s1; ++l) blocks.push_back(kron_sum(a, f.d.slice_rows(l * s1, (l + 1) * s1)));
  f.noa = {vstack(blocks), {}, iota_layers(layers), 2, ArrayRole::orthogonal_array};
  for (std::size_t i = 1; i <= layers; ++i) f.noa.layer_rows.push_back(a.rows() * chain->size(i));
  for (std::size_t i = 1; i < layers; ++i)
    f.sliced.push_back({f.noa.top, a.rows() * chain->size(i), i, 2, ArrayRole::orthogonal_array});

  require(verify_nested(f.ndm));
  for (const auto& s : f.delta_slices) require(verify_sliced(s));
  require(check_oa_strength(levels_of(f.product), chain->order(), 2));
  require(verify_nested(f.noa));
  for (const auto& s : f.sliced) require(verify_sliced(s));
  return f;
}

NoaFamily construct_noa_kron_multi(const ChainPtr& chain, const std::vector<GroupMatrix>& inputs,
                                   std::uint32_t strength) {
  check_kron_inputs(chain, inputs, "arrays");
  if (strength < 1 || strength > inputs.front().cols()) throw std::invalid_argument("strength out of range");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto omega = transversal_projection(*chain, i + 1);
    auto r = check_oa_strength(apply_projection(levels_of(inputs[i]), omega), omega.levels, strength);
    if (!r) {
      r.check = "input " + std::to_string(i + 1) + " " + r.check;
      throw VerificationFailure(r);
    }
  }
  NoaFamily family;
  family.nested = {right_nested_sum(inputs), {}, iota_layers(chain->layers()), strength,
                   ArrayRole::orthogonal_array};
  std::size_t rows = 1;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    rows *= inputs[i].rows();
    family.nested.layer_rows.push_back(rows);
    if (i + 1 < inputs.size())
      family.sliced.push_back({family.nested.top, rows, i + 1, strength, ArrayRole::orthogonal_array});
  }
  require(verify_nested(family.nested));
  for (const auto& s : family.sliced) require(verify_sliced(s));
  return family;
}

KronSoa construct_soa_kron(const ChainPtr& chain, const GroupMatrix& a2, const GroupMatrix& a1,
                           std::uint32_t strength) {
  if (chain->layers() != 2) throw std::invalid_argument("the two-array construction needs a two-layer chain");
  auto family = construct_noa_kron_multi(chain, {a1, a2}, strength);
  KronSoa out;
  out.sliced = family.sliced.front();
  const auto n1 = a1.rows();
  for (std::size_t l = 1; l < a2.rows(); ++l) {
    out.prefixes.push_back(
        {family.nested.top, {l * n1, family.nested.top.rows()}, {1, 2}, strength, ArrayRole::orthogonal_array});
    require(verify_nested(out.prefixes.back()));
  }
  return out;
}

NoaFamily construct_ndm_kron(const ChainPtr& chain, const std::vector<GroupMatrix>& inputs) {
  check_kron_inputs(chain, inputs, "difference matrices");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto omega = transversal_projection(*chain, i + 1, true);
    auto r = check_difference_matrix(apply_projection(levels_of(inputs[i]), omega), *omega.group);
    if (!r) {
      r.check = "input " + std::to_string(i + 1) + " " + r.check;
      throw VerificationFailure(r);
    }
  }
  NoaFamily family;
  family.nested = {right_nested_sum(inputs), {}, iota_layers(chain->layers()), 2, ArrayRole::difference_matrix};
  std::size_t rows = 1;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    rows *= inputs[i].rows();
    family.nested.layer_rows.push_back(rows);
    if (i + 1 < inputs.size())
      family.sliced.push_back({family.nested.top, rows, i + 1, 2, ArrayRole::difference_matrix});
  }
  require(verify_nested(family.nested));
  for (const auto& s : family.sliced) require(verify_sliced(s));
  return family;
}

}  // namespace nestfill
