#pragma once

// Binary model file, all integers and floats little-endian:
//
//   "NNRW"                      4 bytes magic
//   version                     u32, currently 1
//   N, M, N_A, P                u32 each
//   activation ids              N_A bytes (0 sigmoid, 1 gaussian, 2 leaky_relu)
//   init scheme                 1 byte (0 uniform, 1 shaped)
//   seed                        u64
//   lambda                      f64
//   A                           M*N f64, row-major
//   b                           M f64
//   beta                        (N_A*M)*P f64, column by column
//
// Nothing may follow beta.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nnrw/network.hpp"

namespace nnrw {

inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize_model(const Network& net);

/// Throws ModelFormatError; the reason distinguishes bad magic and bad version.
Network deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const Network& net, const std::filesystem::path& path);
Network load_model(const std::filesystem::path& path);

}  // namespace nnrw
