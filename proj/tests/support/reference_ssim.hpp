#pragma once

#include "lienc/image.hpp"

namespace lienc::testing {

/// Direct two-pass SSIM: explicit 11x11 Gaussian window (sigma 1.5), moments
/// computed around the local mean, valid positions only, channel mean.
/// Deliberately shares nothing with the library's separable filter.
double reference_ssim(const Image& a, const Image& b);

}  // namespace lienc::testing
