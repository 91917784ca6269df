#include "lienc/keystream.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

#include "lienc/error.hpp"

namespace lienc {

std::uint64_t KeyStream::next_bounded(std::uint64_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidBound, "bound must be >= 1");
  // 2^64 mod m, computed without 128-bit arithmetic.
  const std::uint64_t rem = (0 - m) % m;
  if (rem == 0) return next_u64() % m;
  const std::uint64_t limit = 0 - rem;  // 2^64 - rem
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v < limit) return v % m;
  }
}

double KeyStream::next_normal() noexcept {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - next_unit();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> KeyStream::permutation(std::size_t k) {
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = k; i-- > 1;) {
    const auto j = static_cast<std::size_t>(next_bounded(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace lienc
