#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "nopt/vector.hpp"

namespace nopt {

inline constexpr char kCheckpointMagic[8] = {'N', 'E', 'U', 'M', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// On disk, all integers little-endian:
//   8 bytes   magic "NEUMCKPT"
//   u32       version (1)
//   u64       param_count
//   f64 x n   parameter values (IEEE-754 binary64)
//   u32       metadata length, then that many bytes of UTF-8
//             "optimizer=<tag>\nstep=<n>\n"
struct Checkpoint {
    std::uint32_t version = kCheckpointVersion;
    Vector values;
    std::string optimizer;
    std::uint64_t step = 0;

    bool operator==(const Checkpoint&) const = default;
};

// Writes to a temporary sibling and renames it into place.
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

// Throws FormatError with "not a checkpoint file", "unsupported checkpoint
// version N", "truncated header", "truncated payload" or "truncated
// metadata"; IoError when the file cannot be opened.
Checkpoint read_checkpoint(const std::filesystem::path& path);

} // namespace nopt
