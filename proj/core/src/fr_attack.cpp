#include "lienc/fr_attack.hpp"

#include <string>

#include "lienc/error.hpp"

namespace lienc {

Image fr_attack(const Image& encrypted, const FrParams& params) {
  if (params.bits < 1 || params.bits > 8) {
    throw Error(ErrorCode::InvalidParams, "L must lie in [1, 8], got " + std::to_string(params.bits));
  }
  if (params.leading_bit != 0 && params.leading_bit != 1) {
    throw Error(ErrorCode::InvalidParams, "leading bit must be 0 or 1");
  }
  const unsigned shift = static_cast<unsigned>(params.bits - 1);
  const auto mask = static_cast<std::uint8_t>((1u << params.bits) - 1u);
  const auto b = static_cast<unsigned>(params.leading_bit);

  Image out = encrypted;
  for (auto& v : out.bytes()) {
    if (((v >> shift) & 1u) != b) v = static_cast<std::uint8_t>(v ^ mask);
  }
  return out;
}

std::pair<Image, Image> fr_attack_sweep(const Image& encrypted, int bits) {
  return {fr_attack(encrypted, {bits, 0}), fr_attack(encrypted, {bits, 1})};
}

}  // namespace lienc
