#include "nestfill/kronecker.hpp"

#include <stdexcept>

namespace nestfill {

namespace {

void require_same_chain(const GroupMatrix& a, const GroupMatrix& b) {
  if (!a.chain || !b.chain) throw std::invalid_argument("matrix without a group chain");
  if (!same_chain(a.chain, b.chain)) throw std::invalid_argument("matrices live over different groups");
}

}  // namespace

std::vector<std::vector<std::string>> GroupMatrix::format() const {
  std::vector<std::vector<std::string>> out(rows(), std::vector<std::string>(cols()));
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c) out[r][c] = chain->format(data(r, c));
  return out;
}

GroupMatrix GroupMatrix::parse(ChainPtr chain, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::vector<Code>> codes(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& text : rows[r]) codes[r].push_back(chain->parse(text));
  return from_codes(std::move(chain), codes);
}

GroupMatrix GroupMatrix::from_codes(ChainPtr chain, const std::vector<std::vector<Code>>& rows) {
  if (!chain) throw std::invalid_argument("null chain");
  for (const auto& row : rows)
    for (Code c : row)
      if (c >= chain->order())
        throw std::invalid_argument("code " + std::to_string(c) + " outside a group of order " +
                                    std::to_string(chain->order()));
  // Build the throwing member first: GCC 11 leaks already-built members when
  // a later aggregate initializer throws.
  auto data = Matrix<Code>::from_rows(rows);
  return {std::move(chain), std::move(data)};
}

GroupMatrix kron_sum(const GroupMatrix& a, const GroupMatrix& b) {
  require_same_chain(a, b);
  const GroupChain& g = *a.chain;
  Matrix<Code> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c)
          out(i * b.rows() + r, j * b.cols() + c) = g.add(a(i, j), b(r, c));
  return {a.chain, std::move(out)};
}

GroupMatrix col_kron_sum(const GroupMatrix& a, const GroupMatrix& b) {
  require_same_chain(a, b);
  if (a.cols() != b.cols())
    throw std::invalid_argument("column-wise Kronecker sum needs equal column counts (" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
  const GroupChain& g = *a.chain;
  Matrix<Code> out(a.rows() * b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t r = 0; r < b.rows(); ++r)
      for (std::size_t c = 0; c < a.cols(); ++c) out(i * b.rows() + r, c) = g.add(a(i, c), b(r, c));
  return {a.chain, std::move(out)};
}

GroupMatrix project(const GroupMatrix& a, std::size_t layer) {
  Matrix<Code> out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a.chain->project(layer, a(r, c));
  return {a.chain, std::move(out)};
}

GroupMatrix vstack(const std::vector<GroupMatrix>& parts) {
  if (parts.empty()) throw std::invalid_argument("nothing to stack");
  std::vector<Matrix<Code>> data;
  for (const auto& p : parts) {
    require_same_chain(parts.front(), p);
    data.push_back(p.data);
  }
  auto stacked = nestfill::vstack(data);
  return {parts.front().chain, std::move(stacked)};
}

}  // namespace nestfill
