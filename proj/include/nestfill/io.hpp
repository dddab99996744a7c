#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nestfill/spacefill.hpp"

namespace nestfill {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kDesignFormat = "nestfill-design";

using Json = nlohmann::ordered_json;

/// {"kind":"field","p":2,"u_chain":[1,2,3],"modulus":[1,1,0,1],"nesting":"degree"}
/// or {"kind":"omega","bases":[{"zn":6},{"field":{"p":2,"u":2}}]}.
Json chain_to_json(const GroupChain& chain);
ChainPtr chain_from_json(const Json& j);

struct SliceFamily {
  std::size_t slice_size = 0;
  std::size_t collapse_layer = 1;
};

/// In-memory form of a design file. Symbolic designs (OAs, DMs) store chain
/// codes; lifted designs (nsfd, ssfd) store integer levels or run values.
struct DesignFile {
  std::string type;  // oa, dm, noa, ndm, soa, sdm, nsfd, ssfd
  std::string method;
  ChainPtr chain;
  std::size_t layer = 0;  // chain layer holding the entries
  LevelMatrix rows;
  std::uint32_t s = 0;  // number of levels
  std::optional<std::uint32_t> t_claimed;
  std::vector<std::size_t> layer_prefixes;
  std::vector<std::size_t> projection_layers;
  std::vector<SliceFamily> slices;
  // Lifted designs only.
  std::string stage;  // relabel-only or full
  std::optional<LevelMatrix> relabeled;
  std::vector<StratificationClaim> claims;
  std::vector<Permutation> permutations;
  std::vector<std::uint64_t> permutation_seeds;
  std::optional<std::uint64_t> lift_seed;
  Json job = Json::object();

  bool symbolic() const { return type != "nsfd" && type != "ssfd"; }
  bool difference_matrix() const { return type == "dm" || type == "ndm" || type == "sdm"; }
};

DesignFile design_from_nested(const NestedArray& a, const std::vector<SlicedArray>& slices, std::string method);
DesignFile design_from_sliced(const SlicedArray& a, std::string method);
DesignFile design_from_lifted(const LiftedDesign& d, const ChainPtr& chain, std::string type, std::string method);

/// Rebuilds the constructions' structures for re-verification.
NestedArray nested_view(const DesignFile& d);
std::vector<SlicedArray> sliced_views(const DesignFile& d);
LiftedDesign lifted_view(const DesignFile& d);

/// Runs every oracle the file claims; one report per claim, in a fixed order.
std::vector<VerificationReport> verify_design(const DesignFile& d);
Json report_to_json(const VerificationReport& r);

Json design_to_json(const DesignFile& d);
/// Accepts codes or element text in rows. Throws std::invalid_argument on
/// malformed files.
DesignFile design_from_json(const Json& j);

/// `# meta: {...}` comment line, header x1..xm, integer rows.
std::string design_to_csv(const DesignFile& d);
DesignFile design_from_csv(const std::string& text);

/// Reads JSON or CSV (by extension, falling back to content sniffing).
DesignFile read_design(const std::filesystem::path& path);
void write_design(const DesignFile& d, const std::filesystem::path& path, const std::string& format);

/// Rows of a bare input array: {"rows": [[...]]} with codes or element text.
GroupMatrix read_group_matrix(const std::filesystem::path& path, const ChainPtr& chain);

/// One CSV per column pair (run, xa, xb, layer); returns the files written.
/// `layer` is the first nested layer containing the run, else its slice
/// number, else 1. Throws std::invalid_argument for an empty design.
std::vector<std::filesystem::path> write_scatter(const DesignFile& d, const std::filesystem::path& dir);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nestfill
