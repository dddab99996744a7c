#include "nestfill/verify.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace nestfill {

namespace {

std::string join(const std::vector<std::size_t>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + 1);
  return s + ")";
}

std::string join_levels(const std::vector<std::uint32_t>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

/// Advances a lex-ordered t-subset of {0..m-1}; false when exhausted.
bool next_subset(std::vector<std::size_t>& cols, std::size_t m) {
  const std::size_t t = cols.size();
  for (std::size_t i = t; i-- > 0;) {
    if (cols[i] < m - t + i) {
      ++cols[i];
      for (std::size_t j = i + 1; j < t; ++j) cols[j] = cols[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// First row of small that big cannot supply (as a multiset), if any.
std::optional<Counterexample> missing_row(const LevelMatrix& small, const LevelMatrix& big) {
  if (small.cols() != big.cols()) return Counterexample{{}, {}, big.cols(), small.cols()};
  if (small.rows() <= big.rows() && big.slice_rows(0, small.rows()) == small) return std::nullopt;
  std::map<std::vector<std::uint32_t>, std::size_t> counts;
  for (std::size_t r = 0; r < big.rows(); ++r) ++counts[{big.row(r).begin(), big.row(r).end()}];
  for (std::size_t r = 0; r < small.rows(); ++r) {
    std::vector<std::uint32_t> row(small.row(r).begin(), small.row(r).end());
    auto it = counts.find(row);
    if (it == counts.end() || it->second == 0) return Counterexample{{}, std::move(row), 0, 1};
    --it->second;
  }
  return std::nullopt;
}

VerificationReport relabel(VerificationReport report, const std::string& check) {
  if (!report.pass) report.detail = report.check + ": " + report.detail;
  report.check = check;
  return report;
}

}  // namespace

GroupTable::GroupTable(std::uint32_t order, const std::function<std::uint32_t(std::uint32_t, std::uint32_t)>& add)
    : order_(order), sum_(std::size_t{order} * order), neg_(order, order) {
  if (order == 0) throw std::invalid_argument("empty group");
  for (std::uint32_t a = 0; a < order; ++a)
    for (std::uint32_t b = 0; b < order; ++b) {
      const auto c = add(a, b);
      if (c >= order) throw std::invalid_argument("group operation leaves [0, order)");
      sum_[std::size_t{a} * order + b] = c;
      if (c == 0) neg_[a] = b;
    }
  for (std::uint32_t a = 0; a < order; ++a)
    if (neg_[a] == order) throw std::invalid_argument("element without inverse; is 0 the identity?");
}

GroupTable GroupTable::cyclic(std::uint32_t n) {
  return GroupTable(n, [n](std::uint32_t a, std::uint32_t b) { return (a + b) % n; });
}

LevelProjection LevelProjection::identity(std::uint32_t levels, std::optional<GroupTable> group, std::string name) {
  LevelProjection p;
  p.map.resize(levels);
  for (std::uint32_t i = 0; i < levels; ++i) p.map[i] = i;
  p.levels = levels;
  p.group = std::move(group);
  p.name = std::move(name);
  return p;
}

LevelMatrix apply_projection(const LevelMatrix& a, const LevelProjection& projection) {
  LevelMatrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const auto v = a(r, c);
      if (v >= projection.map.size())
        throw std::out_of_range("level " + std::to_string(v) + " outside the projection domain");
      out(r, c) = projection.map[v];
    }
  return out;
}

VerificationReport check_oa_strength(const LevelMatrix& a, std::uint32_t s, std::uint32_t t) {
  const std::string name = "OA(" + std::to_string(a.rows()) + "," + std::to_string(a.cols()) + "," +
                           std::to_string(s) + "," + std::to_string(t) + ")";
  if (t == 0 || t > a.cols())
    throw std::invalid_argument("strength " + std::to_string(t) + " needs 1 <= t <= m = " + std::to_string(a.cols()));
  if (s == 0) throw std::invalid_argument("zero levels");
  std::uint64_t cells = 1;
  for (std::uint32_t i = 0; i < t; ++i) {
    cells *= s;
    if (cells > (1ULL << 28)) throw std::invalid_argument("s^t too large for exhaustive counting");
  }
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (a(r, c) >= s)
        return VerificationReport::fail(name, "entry " + std::to_string(a(r, c)) + " at row " + std::to_string(r + 1) +
                                                  " is not one of the " + std::to_string(s) + " levels",
                                        Counterexample{{c}, {a(r, c)}, 1, 0});
  if (a.rows() == 0 || a.rows() % cells != 0) {
    // No tuple count can match a fractional n / s^t; report the first columns
    // and the all-zero level tuple against the rounded-down target.
    Counterexample cx{{}, std::vector<std::uint32_t>(t, 0), 0, a.rows() / cells};
    for (std::size_t i = 0; i < t; ++i) cx.columns.push_back(i);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      bool zero = true;
      for (std::size_t i = 0; i < t; ++i) zero = zero && a(r, i) == 0;
      cx.observed += zero ? 1 : 0;
    }
    return VerificationReport::fail(
        name, std::to_string(a.rows()) + " runs is not a positive multiple of s^t = " + std::to_string(cells), cx);
  }
  const std::size_t expected = a.rows() / cells;

  std::vector<std::size_t> cols(t);
  for (std::size_t i = 0; i < t; ++i) cols[i] = i;
  std::vector<std::size_t> hist(cells);
  do {
    std::fill(hist.begin(), hist.end(), 0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      std::size_t key = 0;
      for (auto c : cols) key = key * s + a(r, c);
      ++hist[key];
    }
    for (std::size_t key = 0; key < cells; ++key) {
      if (hist[key] == expected) continue;
      std::vector<std::uint32_t> levels(t);
      std::size_t rest = key;
      for (std::size_t i = t; i-- > 0;) {
        levels[i] = static_cast<std::uint32_t>(rest % s);
        rest /= s;
      }
      return VerificationReport::fail(name,
                                      "columns " + join(cols) + " show level tuple " + join_levels(levels) + " " +
                                          std::to_string(hist[key]) + " times, expected " + std::to_string(expected),
                                      Counterexample{cols, levels, hist[key], expected});
    }
  } while (next_subset(cols, a.cols()));
  return VerificationReport::ok(name);
}

VerificationReport check_difference_matrix(const LevelMatrix& d, const GroupTable& group) {
  const std::uint32_t s = group.order();
  const std::string name = "D(" + std::to_string(d.rows()) + "," + std::to_string(d.cols()) + "," + std::to_string(s) + ")";
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (std::size_t c = 0; c < d.cols(); ++c)
      if (d(r, c) >= s)
        return VerificationReport::fail(name, "entry " + std::to_string(d(r, c)) + " lies outside the group",
                                        Counterexample{{c}, {d(r, c)}, 1, 0});
  if (d.rows() == 0 || d.rows() % s != 0)
    return VerificationReport::fail(name, std::to_string(d.rows()) + " rows is not a positive multiple of the group order",
                                    Counterexample{{}, {}, d.rows(), s});
  const std::size_t expected = d.rows() / s;
  std::vector<std::size_t> hist(s);
  for (std::size_t a = 0; a < d.cols(); ++a)
    for (std::size_t b = 0; b < d.cols(); ++b) {
      if (a == b) continue;
      std::fill(hist.begin(), hist.end(), 0);
      for (std::size_t r = 0; r < d.rows(); ++r) ++hist[group.sub(d(r, a), d(r, b))];
      for (std::uint32_t e = 0; e < s; ++e)
        if (hist[e] != expected)
          return VerificationReport::fail(
              name,
              "difference of columns " + join({a, b}) + " hits element " + std::to_string(e) + " " +
                  std::to_string(hist[e]) + " times, expected " + std::to_string(expected),
              Counterexample{{a, b}, {e}, hist[e], expected});
    }
  return VerificationReport::ok(name);
}

VerificationReport check_latin_hypercube(const LevelMatrix& l) {
  const std::string name = "LH(" + std::to_string(l.rows()) + "," + std::to_string(l.cols()) + ")";
  const std::size_t n = l.rows();
  if (n == 0) return VerificationReport::fail(name, "empty design", Counterexample{{}, {}, 0, 1});
  std::vector<std::size_t> seen(n);
  for (std::size_t c = 0; c < l.cols(); ++c) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto v = l(r, c);
      if (v >= n)
        return VerificationReport::fail(name, "column " + std::to_string(c + 1) + " has out-of-range value " +
                                                  std::to_string(v),
                                        Counterexample{{c}, {v}, 1, 0});
      if (++seen[v] > 1)
        return VerificationReport::fail(name, "column " + std::to_string(c + 1) + " repeats value " + std::to_string(v),
                                        Counterexample{{c}, {v}, seen[v], 1});
    }
  }
  return VerificationReport::ok(name);
}

VerificationReport check_stratification(const LevelMatrix& l, std::uint32_t range, std::uint32_t g) {
  const std::string name = "grid " + std::to_string(g) + "x" + std::to_string(g);
  if (g == 0 || range == 0) throw std::invalid_argument("grid size and value range must be positive");
  const std::size_t cells = std::size_t{g} * g;
  if (l.rows() == 0 || l.rows() % cells != 0)
    return VerificationReport::fail(name,
                                    std::to_string(l.rows()) + " points cannot fill " + std::to_string(cells) +
                                        " cells evenly",
                                    Counterexample{{}, {}, l.rows(), cells});
  for (std::size_t r = 0; r < l.rows(); ++r)
    for (std::size_t c = 0; c < l.cols(); ++c)
      if (l(r, c) >= range)
        return VerificationReport::fail(name, "value " + std::to_string(l(r, c)) + " outside [0, " +
                                                  std::to_string(range) + ")",
                                        Counterexample{{c}, {l(r, c)}, 1, 0});
  const std::size_t expected = l.rows() / cells;
  auto cell = [&](std::uint32_t v) { return static_cast<std::size_t>(std::uint64_t{v} * g / range); };
  std::vector<std::size_t> hist(cells);
  for (std::size_t a = 0; a < l.cols(); ++a)
    for (std::size_t b = a + 1; b < l.cols(); ++b) {
      std::fill(hist.begin(), hist.end(), 0);
      for (std::size_t r = 0; r < l.rows(); ++r) ++hist[cell(l(r, a)) * g + cell(l(r, b))];
      for (std::size_t k = 0; k < cells; ++k)
        if (hist[k] != expected) {
          const std::vector<std::uint32_t> where{static_cast<std::uint32_t>(k / g), static_cast<std::uint32_t>(k % g)};
          return VerificationReport::fail(name,
                                          "columns " + join({a, b}) + " cell " + join_levels(where) + " holds " +
                                              std::to_string(hist[k]) + " points, expected " + std::to_string(expected),
                                          Counterexample{{a, b}, where, hist[k], expected});
        }
    }
  return VerificationReport::ok(name);
}

VerificationReport check_projection_refinement(const std::vector<LevelProjection>& projections) {
  const std::string name = "projection refinement";
  for (std::size_t i = 1; i < projections.size(); ++i) {
    const auto& fine = projections[i];
    for (std::size_t j = 0; j < i; ++j) {
      const auto& coarse = projections[j];
      if (coarse.map.size() != fine.map.size())
        return VerificationReport::fail(name, "projections have different domains",
                                        Counterexample{{j, i}, {}, fine.map.size(), coarse.map.size()});
      // First domain element seen for each fine image.
      std::vector<std::uint32_t> witness(fine.levels, UINT32_MAX);
      for (std::uint32_t a = 0; a < fine.map.size(); ++a) {
        auto& w = witness.at(fine.map[a]);
        if (w == UINT32_MAX) {
          w = a;
        } else if (coarse.map[w] != coarse.map[a]) {
          return VerificationReport::fail(name,
                                          fine.name + " identifies " + std::to_string(w) + " and " + std::to_string(a) +
                                              " but " + coarse.name + " separates them",
                                          Counterexample{{j, i}, {w, a}, 0, 0});
        }
      }
    }
  }
  return VerificationReport::ok(name);
}

namespace {

template <typename Check>
VerificationReport check_family(const std::vector<LevelMatrix>& family, const std::vector<LevelProjection>& projections,
                                const std::string& name, Check&& check) {
  if (family.size() != projections.size())
    throw std::invalid_argument("need one projection per nested layer");
  if (auto r = check_projection_refinement(projections); !r) return relabel(r, name);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const std::string layer = "A_" + std::to_string(i + 1);
    if (i > 0)
      if (auto cx = missing_row(family[i - 1], family[i]))
        return VerificationReport::fail(name, "A_" + std::to_string(i) + " is not contained in " + layer, cx);
    for (std::size_t j = 0; j <= i; ++j) {
      auto r = check(apply_projection(family[i], projections[j]), projections[j]);
      if (!r) return relabel(r, name + " " + projections[j].name + "(" + layer + ")");
    }
  }
  return VerificationReport::ok(name);
}

}  // namespace

VerificationReport check_nested(const std::vector<LevelMatrix>& family, const std::vector<LevelProjection>& projections,
                                std::uint32_t t) {
  return check_family(family, projections, "nested OA",
                      [t](const LevelMatrix& m, const LevelProjection& p) { return check_oa_strength(m, p.levels, t); });
}

VerificationReport check_nested_dm(const std::vector<LevelMatrix>& family,
                                   const std::vector<LevelProjection>& projections) {
  for (const auto& p : projections)
    if (!p.group) throw std::invalid_argument("difference-matrix projection " + p.name + " lacks a group table");
  return check_family(family, projections, "nested DM", [](const LevelMatrix& m, const LevelProjection& p) {
    return check_difference_matrix(m, *p.group);
  });
}

namespace {

template <typename Check>
VerificationReport check_blocks(const LevelMatrix& top, std::size_t slice_rows, const std::string& name,
                                Check&& check) {
  if (slice_rows == 0 || top.rows() % slice_rows != 0)
    return VerificationReport::fail(name,
                                    "slice size " + std::to_string(slice_rows) + " does not divide " +
                                        std::to_string(top.rows()) + " rows",
                                    Counterexample{{}, {}, top.rows(), slice_rows});
  for (std::size_t l = 0; l < top.rows() / slice_rows; ++l) {
    auto r = check(top.slice_rows(l * slice_rows, (l + 1) * slice_rows));
    if (!r) return relabel(r, name + " slice " + std::to_string(l + 1));
  }
  return VerificationReport::ok(name);
}

}  // namespace

VerificationReport check_sliced(const LevelMatrix& top, std::size_t slice_rows, const LevelProjection& projection,
                                std::uint32_t t) {
  return check_blocks(top, slice_rows, "sliced OA under " + projection.name, [&](const LevelMatrix& block) {
    return check_oa_strength(apply_projection(block, projection), projection.levels, t);
  });
}

VerificationReport check_sliced_dm(const LevelMatrix& top, std::size_t slice_rows, const LevelProjection& projection) {
  if (!projection.group) throw std::invalid_argument("difference-matrix projection lacks a group table");
  return check_blocks(top, slice_rows, "sliced DM under " + projection.name, [&](const LevelMatrix& block) {
    return check_difference_matrix(apply_projection(block, projection), *projection.group);
  });
}

}  // namespace nestfill
