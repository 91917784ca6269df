#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lienc/nn/sequential.hpp"

namespace lienc::nn {

/// How the stored network's input/output tensors map to images.
enum class Codec : std::uint32_t {
  Image = 0,        // [N, 3, H, W] channel tensors
  NibbleBlock = 1,  // [N, 96] nibble vectors of 4x4 blocks
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all integers and floats little-endian:
///   "LIEN" | u32 version | u32 codec | u32 layer_count
///   per layer: u32 kind | i32 in, out, kernel, stride, padding, height, width
///              | f64 slope | u32 param_count
///              per param: u32 rank | u64 dims[rank] | f64 values[prod(dims)]
std::vector<std::uint8_t> save_checkpoint(const Sequential& net, Codec codec = Codec::Image);

struct Checkpoint {
  Sequential net;
  Codec codec = Codec::Image;
};

/// Throws BadCheckpoint on malformed input.
Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint_file(const std::filesystem::path& path, const Sequential& net, Codec codec = Codec::Image);
Checkpoint read_checkpoint_file(const std::filesystem::path& path);

}  // namespace lienc::nn
