#include "semisparse/metrics.hpp"

#include <cmath>

namespace semisparse {

namespace {

struct Region {
  int y0, x0, h, w;
};

Region cropped_region(const Field& a, const Field& b, int crop, const char* name) {
  if (!a.same_shape(b)) throw ShapeError(std::string(name) + ": shape mismatch");
  if (crop < 0) throw ConfigError(std::string(name) + ": crop must be >= 0");
  const int cx = a.is_1d() ? 0 : crop;
  Region r{crop, cx, a.height() - 2 * crop, a.width() - 2 * cx};
  if (r.h < 1 || r.w < 1)
    throw ConfigError(std::string(name) + ": crop leaves no interior");
  return r;
}

}  // namespace

double psnr(const Field& a, const Field& b, int crop, double peak) {
  if (peak <= 0) throw ConfigError("psnr: peak must be > 0");
  const Region r = cropped_region(a, b, crop, "psnr");
  double sq = 0;
  for (int c = 0; c < a.channels(); ++c)
    sq += (a.plane(c).block(r.y0, r.x0, r.h, r.w) - b.plane(c).block(r.y0, r.x0, r.h, r.w))
              .square()
              .sum();
  const double mse = sq / (static_cast<double>(r.h) * r.w * a.channels());
  if (mse == 0) return 99.0;
  return 10.0 * std::log10(peak * peak / mse);
}

double mae(const Field& a, const Field& b, int crop) {
  const Region r = cropped_region(a, b, crop, "mae");
  double s = 0;
  for (int c = 0; c < a.channels(); ++c)
    s += (a.plane(c).block(r.y0, r.x0, r.h, r.w) - b.plane(c).block(r.y0, r.x0, r.h, r.w))
             .abs()
             .sum();
  return s / (static_cast<double>(r.h) * r.w * a.channels());
}

}  // namespace semisparse
