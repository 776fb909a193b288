#pragma once

#include "semisparse/field.hpp"

namespace semisparse {

/// Peak signal-to-noise ratio in dB over the region left after removing a
/// boundary margin of `crop` samples per side (columns are only cropped on
/// 2D fields). Identical inputs (MSE == 0) report the cap value 99 dB.
/// Symmetric in its arguments.
double psnr(const Field& a, const Field& b, int crop = 0, double peak = 1.0);

/// Mean absolute error over the same cropped region.
double mae(const Field& a, const Field& b, int crop = 0);

}  // namespace semisparse
