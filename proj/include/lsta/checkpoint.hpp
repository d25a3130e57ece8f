#pragma once

#include <cstdint>
#include <string>

#include "lsta/network.hpp"

namespace lsta {

// Checkpoint layout (all multi-byte integers little-endian):
//   magic "LSTA1"
//   u8 cell kind (0 lstm, 1 lsta, 2 gru), u8 direction (0 forward, 1 bidirectional)
//   u32 hidden, u32 input, u32 classes
//   u64 seed
//   u32 config-echo length, then that many bytes (flat key=value text)
//   u32 block count, then per block in param_blocks order:
//     u32 name length, name bytes, u64 scalar count, count f64 little-endian
struct Checkpoint {
    SequenceModel model;
    std::uint64_t seed = 0;
    std::string config_echo;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lsta
