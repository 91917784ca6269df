#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace lienc {

using BigInt = boost::multiprecision::cpp_int;

/// Size of a key space, as log2 bits and (on demand) the exact count.
struct KeySpace {
  double log2_bits = 0.0;
  BigInt exact() const;
  std::string exact_decimal() const { return exact().str(); }

  // Exactly one of these describes the space.
  enum class Kind { Blockwise, Pixelwise } kind = Kind::Blockwise;
  std::uint64_t pixels = 0;
};

/// N = 96! * 2^96 for the 4x4-block nibble cipher.
KeySpace keyspace_blockwise();

/// N(n) = 2^(3n) * 6^n for the pixel-wise cipher over n pixels. n >= 1.
KeySpace keyspace_pixelwise(std::uint64_t n);

struct Crossover {
  double real_n;               // solution of log2 N_pix(n) = log2 N_block
  std::uint64_t smallest_int;  // least integer n with N_pix(n) >= N_block
};

Crossover keyspace_crossover();

}  // namespace lienc
