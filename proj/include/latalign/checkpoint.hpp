#pragma once

// Binary model checkpoint: magic, format version, a JSON header describing
// the configuration, baseline statistics, seed, epoch and every parameter
// group, then the parameter values and both ADAM moments as little-endian
// 64-bit doubles in header order.

#include <cstdint>
#include <filesystem>

#include "latalign/alignment_model.hpp"

namespace latalign {

inline constexpr char kCheckpointMagic[8] = {'L', 'A', 'T', 'A', 'L', 'G', 'N', '\0'};
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

void save_checkpoint(const ModelState& state, const std::filesystem::path& path);

/// Throws DataError on a missing, truncated or inconsistent file.
ModelState load_checkpoint(const std::filesystem::path& path);

/// Just the JSON header (for manifests and inspection).
nlohmann::json read_checkpoint_header(const std::filesystem::path& path);

}  // namespace latalign
