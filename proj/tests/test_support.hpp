#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nestfill/arrays.hpp"
#include "nestfill/spacefill.hpp"
#include "nestfill/verify.hpp"

namespace nestfill::testing {

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(NESTFILL_TEST_DATA) / name; }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nestfill_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline ChainPtr gf8_chain() { return GroupChain::field_tower(2, {1, 2, 3}); }

inline ChainPtr omega_ndm_chain() {
  return GroupChain::omega_ring({BaseGroup::additive(make_field(2, 2)), BaseGroup::cyclic(3), BaseGroup::cyclic(2)});
}

inline ChainPtr omega_z6_chain() { return GroupChain::omega_ring({BaseGroup::cyclic(6), BaseGroup::cyclic(2)}); }

inline LevelMatrix project_levels(const GroupMatrix& a, std::size_t layer) {
  return apply_projection(a.data, chain_projection(*a.chain, layer));
}

inline std::vector<Permutation> to_perms(const std::vector<std::vector<std::uint32_t>>& rows) {
  return {rows.begin(), rows.end()};
}

}  // namespace nestfill::testing
