#pragma once

#include <utility>

#include "lienc/image.hpp"

namespace lienc {

/// Keyless feature reconstruction: every channel value whose bit L-1 differs
/// from the chosen leading bit is XORed with 2^L - 1. With L = 8 this folds
/// each byte onto the half of the range selected by `leading_bit`, undoing
/// negative-positive flips up to the lost sign.
struct FrParams {
  int bits = 8;
  int leading_bit = 1;
};

Image fr_attack(const Image& encrypted, const FrParams& params);

/// Both leading-bit variants: {b = 0, b = 1}.
std::pair<Image, Image> fr_attack_sweep(const Image& encrypted, int bits = 8);

}  // namespace lienc
