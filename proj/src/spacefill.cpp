#include "nestfill/spacefill.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nestfill {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(derive_seed(seed, 0)) {}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("empty sampling range");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;  // largest multiple of n, minus one
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return x % n;
}

void check_layer_sizes(const std::vector<std::uint32_t>& sizes) {
  if (sizes.empty()) throw std::invalid_argument("no layer sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0 || (i > 0 && sizes[i] <= sizes[i - 1]))
      throw std::invalid_argument("layer sizes must be positive and strictly increasing");
    if (sizes.back() % sizes[i] != 0) throw std::invalid_argument("every layer size must divide s_I");
  }
}

namespace {

bool is_permutation_of_range(const Permutation& perm, std::uint32_t n) {
  if (perm.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (auto v : perm) {
    if (v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

}  // namespace

bool is_nested_permutation(const Permutation& perm, const std::vector<std::uint32_t>& sizes) {
  check_layer_sizes(sizes);
  const std::uint32_t top = sizes.back();
  if (!is_permutation_of_range(perm, top)) return false;
  for (auto s : sizes) {
    const std::uint32_t block = top / s;
    std::vector<char> hit(s, 0);
    for (std::uint32_t t = 0; t < s; ++t) {
      auto& h = hit[perm[t] / block];
      if (h) return false;
      h = 1;
    }
  }
  return true;
}

bool is_sliced_permutation(const Permutation& perm, const std::vector<std::uint32_t>& sizes) {
  check_layer_sizes(sizes);
  const std::uint32_t top = sizes.back();
  if (!is_permutation_of_range(perm, top)) return false;
  for (std::size_t j = 0; j + 1 < sizes.size(); ++j) {
    const std::uint32_t q = top / sizes[j];
    for (std::uint32_t start = 0; start < top; start += q)
      for (std::uint32_t t = start; t < start + q; ++t)
        if (perm[t] / q != perm[start] / q) return false;
  }
  return true;
}

Permutation gen_nested_permutation(const std::vector<std::uint32_t>& sizes, std::uint64_t seed) {
  check_layer_sizes(sizes);
  const std::uint32_t top = sizes.back();
  Rng rng(seed);
  Permutation perm;
  perm.reserve(top);
  std::size_t layer = 0;
  std::vector<char> used(top, 0);
  for (std::uint32_t t = 0; t < top; ++t) {
    while (sizes[layer] <= t) ++layer;
    const std::uint32_t block = top / sizes[layer];
    std::vector<char> occupied(sizes[layer], 0);
    for (auto v : perm) occupied[v / block] = 1;
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t v = 0; v < top; ++v)
      if (!used[v] && !occupied[v / block]) candidates.push_back(v);
    const auto v = candidates[rng.below(candidates.size())];
    used[v] = 1;
    perm.push_back(v);
  }
  return perm;
}

Permutation gen_sliced_permutation(const std::vector<std::uint32_t>& sizes, std::uint64_t seed) {
  check_layer_sizes(sizes);
  const std::uint32_t top = sizes.back();
  Rng rng(seed);
  // Block tree: level j splits each block of top / s_{j-1} values into
  // s_j / s_{j-1} children; a level-j node permutes its children.
  Permutation perm(top, 0);
  std::vector<std::uint32_t> radices;
  std::uint32_t prev = 1;
  for (auto s : sizes) {
    radices.push_back(s / prev);
    prev = s;
  }
  // Per level, one child permutation for every node (in position order).
  std::vector<std::vector<Permutation>> node_perms(radices.size());
  std::uint32_t nodes = 1;
  for (std::size_t j = 0; j < radices.size(); ++j) {
    for (std::uint32_t n = 0; n < nodes; ++n) {
      Permutation p(radices[j]);
      std::iota(p.begin(), p.end(), 0U);
      rng.shuffle(p);
      node_perms[j].push_back(std::move(p));
    }
    nodes *= radices[j];
  }
  for (std::uint32_t pos = 0; pos < top; ++pos) {
    // Digits of the position, coarsest first.
    std::vector<std::uint32_t> digits(radices.size());
    std::uint32_t rest = pos;
    for (std::size_t j = radices.size(); j-- > 0;) {
      digits[j] = rest % radices[j];
      rest /= radices[j];
    }
    std::uint32_t node = 0;
    std::uint32_t value = 0;
    for (std::size_t j = 0; j < radices.size(); ++j) {
      value = value * radices[j] + node_perms[j][node][digits[j]];
      node = node * radices[j] + digits[j];
    }
    perm[pos] = value;
  }
  return perm;
}

LevelMatrix oa_based_lh(const LevelMatrix& m, std::uint32_t s, std::uint64_t seed) {
  const std::size_t n = m.rows();
  if (s == 0 || n == 0 || n % s != 0) throw std::invalid_argument("runs must be a positive multiple of the levels");
  const std::uint32_t q = static_cast<std::uint32_t>(n / s);
  LevelMatrix out(n, m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::vector<std::vector<std::uint32_t>> pools(s);
    for (std::size_t r = 0; r < n; ++r) {
      if (m(r, c) >= s) throw std::invalid_argument("level " + std::to_string(m(r, c)) + " out of range");
      pools[m(r, c)].push_back(static_cast<std::uint32_t>(r));
    }
    Rng rng(derive_seed(seed, c));
    for (std::uint32_t level = 0; level < s; ++level) {
      if (pools[level].size() != q)
        throw std::invalid_argument("column " + std::to_string(c + 1) + " is unbalanced: level " +
                                    std::to_string(level) + " occurs " + std::to_string(pools[level].size()) +
                                    " times, expected " + std::to_string(q));
      std::vector<std::uint32_t> values(q);
      std::iota(values.begin(), values.end(), level * q);
      rng.shuffle(values);
      for (std::uint32_t i = 0; i < q; ++i) out(pools[level][i], c) = values[i];
    }
  }
  return out;
}

VerificationReport verify_lifted(const LiftedDesign& d) {
  const LevelMatrix& points = d.design ? *d.design : d.relabeled;
  const std::uint32_t range = d.design ? static_cast<std::uint32_t>(points.rows()) : d.levels;
  if (d.design) {
    if (auto r = check_latin_hypercube(*d.design); !r) return r;
    // The lifted values must refine the relabeled levels.
    const std::size_t q = points.rows() / d.levels;
    for (std::size_t r = 0; r < points.rows(); ++r)
      for (std::size_t c = 0; c < points.cols(); ++c)
        if (points(r, c) / q != d.relabeled(r, c))
          return VerificationReport::fail("lift consistency", "row " + std::to_string(r + 1) + " column " +
                                                                  std::to_string(c + 1) +
                                                                  " does not refine its relabeled level");
  }
  for (const auto& claim : d.claims) {
    const bool blocks = claim.mode == StratificationClaim::Mode::blocks;
    const std::string name = std::string(blocks ? "slices of " : "first ") + std::to_string(claim.rows) + " runs";
    if (claim.rows == 0 || claim.rows > points.rows() || (blocks && points.rows() % claim.rows != 0))
      return VerificationReport::fail(name, "row count does not fit the design");
    const std::size_t count = blocks ? points.rows() / claim.rows : 1;
    for (std::size_t b = 0; b < count; ++b) {
      auto r = check_stratification(points.slice_rows(b * claim.rows, (b + 1) * claim.rows), range, claim.grid);
      if (!r) {
        r.detail = name + (blocks ? " (slice " + std::to_string(b + 1) + ")" : "") + ": " + r.detail;
        return r;
      }
    }
  }
  return VerificationReport::ok("lifted design");
}

namespace {

std::vector<std::uint32_t> positions(const GroupChain& chain, EnumerationOrder order) {
  const auto v = chain.enumerate(order);
  std::vector<std::uint32_t> pos(v.size());
  for (std::uint32_t r = 0; r < v.size(); ++r) pos[v[r]] = r;
  return pos;
}

LevelMatrix relabel(const GroupMatrix& top, const std::vector<std::uint32_t>& position,
                    const std::vector<Permutation>& perms) {
  LevelMatrix m(top.rows(), top.cols());
  for (std::size_t r = 0; r < top.rows(); ++r)
    for (std::size_t c = 0; c < top.cols(); ++c) m(r, c) = perms[c][position[top(r, c)]];
  return m;
}

void finish(LiftedDesign& d, LiftStage stage, std::uint64_t seed) {
  if (stage == LiftStage::full) {
    d.design = oa_based_lh(d.relabeled, d.levels, seed);
    d.seed = seed;
  }
  if (auto r = verify_lifted(d); !r) throw VerificationFailure(r);
}

void check_permutation_count(const std::vector<Permutation>& perms, std::size_t cols) {
  if (perms.size() != cols)
    throw std::invalid_argument("need one permutation per column: " + std::to_string(cols) + " columns, " +
                                std::to_string(perms.size()) + " permutations");
}

}  // namespace

LiftedDesign build_nsfd(const NestedArray& noa, const std::vector<Permutation>& perms, LiftStage stage,
                        std::uint64_t seed) {
  if (noa.role != ArrayRole::orthogonal_array || noa.strength < 2)
    throw std::invalid_argument("nested lifting needs an orthogonal array of strength >= 2");
  const GroupChain& chain = *noa.top.chain;
  check_permutation_count(perms, noa.top.cols());
  for (std::size_t c = 0; c < perms.size(); ++c)
    if (!is_nested_permutation(perms[c], chain.layer_sizes()))
      throw std::invalid_argument("permutation " + std::to_string(c + 1) + " is not a nested permutation");
  LiftedDesign d;
  d.levels = chain.order();
  d.permutations = perms;
  for (std::size_t l = 0; l < noa.layers(); ++l) {
    const auto layer = noa.projection_layers[l];
    for (std::size_t r = 0; r < noa.layer_rows[l]; ++r)
      for (std::size_t c = 0; c < noa.top.cols(); ++c)
        if (!chain.contains(layer, noa.top(r, c)))
          throw std::invalid_argument("nested layer " + std::to_string(l + 1) + " has entry '" +
                                      chain.format(noa.top(r, c)) + "' outside F_" + std::to_string(layer) +
                                      "; the nested lift needs layer entries inside their subgroup");
    d.claims.push_back({StratificationClaim::Mode::prefix, noa.layer_rows[l], chain.size(layer)});
  }
  d.relabeled = relabel(noa.top, positions(chain, EnumerationOrder::outer_first), perms);
  finish(d, stage, seed);
  return d;
}

LiftedDesign build_ssfd_multi(const NoaFamily& family, const std::vector<Permutation>& perms, LiftStage stage,
                              std::uint64_t seed) {
  const auto& top = family.nested.top;
  if (family.nested.role != ArrayRole::orthogonal_array || family.nested.strength < 2)
    throw std::invalid_argument("sliced lifting needs an orthogonal array of strength >= 2");
  const GroupChain& chain = *top.chain;
  check_permutation_count(perms, top.cols());
  for (std::size_t c = 0; c < perms.size(); ++c)
    if (!is_sliced_permutation(perms[c], chain.layer_sizes()))
      throw std::invalid_argument("permutation " + std::to_string(c + 1) + " is not a sliced permutation");
  LiftedDesign d;
  d.levels = chain.order();
  d.permutations = perms;
  for (const auto& s : family.sliced)
    for (std::size_t j = 1; j <= s.layer; ++j)
      d.claims.push_back({StratificationClaim::Mode::blocks, s.slice_rows, chain.size(j)});
  d.claims.push_back({StratificationClaim::Mode::prefix, top.rows(), chain.order()});
  d.relabeled = relabel(top, positions(chain, EnumerationOrder::inner_first), perms);
  finish(d, stage, seed);
  return d;
}

LiftedDesign build_ssfd_grouped(const SlicedArray& soa, std::size_t j,
                                const std::optional<std::vector<Code>>& group_order, LiftStage stage,
                                std::uint64_t seed) {
  if (soa.role != ArrayRole::orthogonal_array || soa.strength < 2)
    throw std::invalid_argument("sliced lifting needs an orthogonal array of strength >= 2");
  if (j < 1 || j > soa.layer)
    throw std::invalid_argument("collapse layer j must satisfy 1 <= j <= " + std::to_string(soa.layer));
  const GroupChain& chain = *soa.top.chain;
  const std::uint32_t sj = chain.size(j);
  const std::uint32_t q = chain.order() / sj;

  std::vector<Code> order;
  if (group_order) {
    order = *group_order;
    std::vector<char> seen(sj, 0);
    if (order.size() != sj) throw std::invalid_argument("group order must list every element of F_j once");
    for (Code a : order) {
      if (a >= sj || seen[a]) throw std::invalid_argument("group order must list every element of F_j once");
      seen[a] = 1;
    }
  } else {
    order.resize(sj);
    std::iota(order.begin(), order.end(), 0U);
  }
  std::vector<std::uint32_t> group_index(sj);
  for (std::uint32_t g = 0; g < sj; ++g) group_index[order[g]] = g;

  std::vector<std::uint32_t> label(chain.order());
  std::vector<std::uint32_t> filled(sj, 0);
  for (Code c = 0; c < chain.order(); ++c) {  // ascending code within each class
    const auto g = group_index[chain.project(j, c)];
    label[c] = g * q + filled[g]++;
  }
  const Permutation identity_label = label;
  LiftedDesign d;
  d.levels = chain.order();
  d.relabeled = LevelMatrix(soa.top.rows(), soa.top.cols());
  for (std::size_t r = 0; r < soa.top.rows(); ++r)
    for (std::size_t c = 0; c < soa.top.cols(); ++c) d.relabeled(r, c) = label[soa.top(r, c)];
  d.permutations.assign(soa.top.cols(), identity_label);
  d.claims.push_back({StratificationClaim::Mode::blocks, soa.slice_rows, sj});
  d.claims.push_back({StratificationClaim::Mode::prefix, soa.top.rows(), chain.order()});
  finish(d, stage, seed);
  return d;
}

LevelMatrix compose_qual_quant(const LevelMatrix& design, std::size_t slice_rows, const LevelMatrix& qual) {
  if (slice_rows == 0 || design.rows() % slice_rows != 0)
    throw std::invalid_argument("slice size does not divide the run count");
  if (design.rows() / slice_rows != qual.rows())
    throw std::invalid_argument("slice count " + std::to_string(design.rows() / slice_rows) +
                                " differs from the qualitative run count " + std::to_string(qual.rows()));
  LevelMatrix out(design.rows(), design.cols() + qual.cols());
  for (std::size_t r = 0; r < design.rows(); ++r) {
    for (std::size_t c = 0; c < design.cols(); ++c) out(r, c) = design(r, c);
    for (std::size_t c = 0; c < qual.cols(); ++c) out(r, design.cols() + c) = qual(r / slice_rows, c);
  }
  return out;
}

}  // namespace nestfill
