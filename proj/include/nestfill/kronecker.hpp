#pragma once

#include <string>
#include <vector>

#include "nestfill/groups.hpp"
#include "nestfill/matrix.hpp"

namespace nestfill {

/// Matrix of chain codes over one GroupChain.
struct GroupMatrix {
  ChainPtr chain;
  Matrix<Code> data;

  std::size_t rows() const noexcept { return data.rows(); }
  std::size_t cols() const noexcept { return data.cols(); }
  Code operator()(std::size_t r, std::size_t c) const { return data(r, c); }

  GroupMatrix slice_rows(std::size_t begin, std::size_t end) const {
    auto rows = data.slice_rows(begin, end);
    return {chain, std::move(rows)};
  }
  /// Entries in text form.
  std::vector<std::vector<std::string>> format() const;
  /// Parses text rows; throws std::invalid_argument on malformed entries.
  static GroupMatrix parse(ChainPtr chain, const std::vector<std::vector<std::string>>& rows);
  /// Checks every code lies in F_I.
  static GroupMatrix from_codes(ChainPtr chain, const std::vector<std::vector<Code>>& rows);

  friend bool operator==(const GroupMatrix& a, const GroupMatrix& b) {
    return same_chain(a.chain, b.chain) && a.data == b.data;
  }
};

/// A (+) B: block (i, j) is a_ij + B. Output is (r u) x (s v), blocks ordered
/// by A's rows, then A's columns.
GroupMatrix kron_sum(const GroupMatrix& a, const GroupMatrix& b);

/// Column-wise Kronecker sum: column j is a_j (+) b_j.
GroupMatrix col_kron_sum(const GroupMatrix& a, const GroupMatrix& b);

/// Entry-wise rho_i.
GroupMatrix project(const GroupMatrix& a, std::size_t layer);

/// Stack matrices over the same chain.
GroupMatrix vstack(const std::vector<GroupMatrix>& parts);

}  // namespace nestfill
