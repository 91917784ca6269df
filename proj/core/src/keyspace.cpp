#include "lienc/keyspace.hpp"

#include <cmath>

#include "lienc/error.hpp"

namespace lienc {

namespace {

constexpr unsigned kBlockPositions = 96;

BigInt factorial(unsigned n) {
  BigInt f = 1;
  for (unsigned k = 2; k <= n; ++k) f *= k;
  return f;
}

BigInt pow_big(unsigned base, std::uint64_t exp) {
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exp));
}

}  // namespace

BigInt KeySpace::exact() const {
  if (kind == Kind::Blockwise) {
    return factorial(kBlockPositions) * pow_big(2, kBlockPositions);
  }
  return pow_big(2, 3 * pixels) * pow_big(6, pixels);
}

KeySpace keyspace_blockwise() {
  double bits = kBlockPositions;
  for (unsigned k = 2; k <= kBlockPositions; ++k) bits += std::log2(static_cast<double>(k));
  return KeySpace{bits, KeySpace::Kind::Blockwise, 0};
}

KeySpace keyspace_pixelwise(std::uint64_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "pixel count must be >= 1");
  const double nn = static_cast<double>(n);
  return KeySpace{3.0 * nn + nn * std::log2(6.0), KeySpace::Kind::Pixelwise, n};
}

Crossover keyspace_crossover() {
  const double target = keyspace_blockwise().log2_bits;
  const double real_n = target / (3.0 + std::log2(6.0));
  // Confirm the integer answer exactly rather than trusting the float.
  const BigInt block = keyspace_blockwise().exact();
  auto n = static_cast<std::uint64_t>(std::floor(real_n));
  while (n > 1 && keyspace_pixelwise(n - 1).exact() >= block) --n;
  while (keyspace_pixelwise(n).exact() < block) ++n;
  return Crossover{real_n, n};
}

}  // namespace lienc
