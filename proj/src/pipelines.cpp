#include "semisparse/pipelines.hpp"

#include <cmath>

namespace semisparse {

namespace {

constexpr double kLogOffset = 1e-4;   // detail_enhance log-domain offset
constexpr double kLumFloor = 1e-6;    // hdr luminance floor inside log10
constexpr double kInkStrength = 0.85; // color-pencil edge darkening

int reflect101(int i, int extent) {
  if (extent == 1) return 0;
  const int period = 2 * extent - 2;
  i = ((i % period) + period) % period;
  return (i < extent) ? i : period - i;
}

std::vector<double> gaussian_taps(double sigma, int radius) {
  std::vector<double> k(static_cast<size_t>(2 * radius + 1));
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (static_cast<double>(i) * i) / (sigma * sigma));
    k[static_cast<size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

Plane blur_axis(const Plane& p, const std::vector<double>& taps, bool along_rows) {
  const int radius = (static_cast<int>(taps.size()) - 1) / 2;
  const int h = static_cast<int>(p.rows());
  const int w = static_cast<int>(p.cols());
  const int extent = along_rows ? h : w;
  Plane out = Plane::Zero(h, w);
  for (int t = -radius; t <= radius; ++t) {
    const double c = taps[static_cast<size_t>(t + radius)];
    // Mirrored gather: offsets beyond the edge reflect without repeating it.
    if (along_rows) {
      for (int y = 0; y < h; ++y) out.row(y) += c * p.row(reflect101(y + t, extent));
    } else {
      for (int x = 0; x < w; ++x) out.col(x) += c * p.col(reflect101(x + t, extent));
    }
  }
  return out;
}

void require_display_range(const Field& image, const char* who) {
  if (image.min_value() < -1e-9 || image.max_value() > 1.0 + 1e-9)
    throw ConfigError(std::string(who) + ": input must lie in [0,1]");
}

Field log10_field(const Field& f, double offset) {
  Field out = f;
  for (int c = 0; c < out.channels(); ++c)
    out.plane(c) = (out.plane(c) + offset).log10();
  return out;
}

Field exp10_field(const Field& f, double offset) {
  Field out = f;
  for (int c = 0; c < out.channels(); ++c)
    out.plane(c) = Eigen::pow(10.0, out.plane(c)) - offset;
  return out;
}

}  // namespace

Field luminance(const Field& image) {
  if (image.channels() == 1) return image;
  if (image.channels() != 3)
    throw ShapeError("luminance: expected 1 or 3 channels, got " +
                     std::to_string(image.channels()));
  Field out(image.height(), image.width(), 1);
  out.plane(0) =
      0.2126 * image.plane(0) + 0.7152 * image.plane(1) + 0.0722 * image.plane(2);
  return out;
}

Field gaussian_blur(const Field& image, double sigma) {
  if (!(sigma > 0)) throw ConfigError("gaussian_blur: sigma must be > 0");
  const int radius_req = static_cast<int>(std::ceil(3.5 * sigma));
  Field out = image;
  const int ry = std::min(radius_req, image.height() - 1);
  const int rx = std::min(radius_req, image.width() - 1);
  const auto taps_y = gaussian_taps(sigma, ry);
  const auto taps_x = gaussian_taps(sigma, rx);
  for (int c = 0; c < image.channels(); ++c) {
    Plane p = blur_axis(image.plane(c), taps_y, true);
    if (image.width() > 1) p = blur_axis(p, taps_x, false);
    out.plane(c) = std::move(p);
  }
  return out;
}

Field detail_enhance(const Field& image, const SolverConfig& config, double boost,
                     bool log_domain) {
  if (!std::isfinite(boost)) throw ConfigError("detail_enhance: boost must be finite");
  image.assert_finite("detail_enhance: input");
  require_display_range(image, "detail_enhance");

  const Field work = log_domain ? log10_field(image, kLogOffset) : image;
  const Field base = smooth(work, config).output;
  Field boosted = base + boost * (work - base);
  if (log_domain) boosted = exp10_field(boosted, kLogOffset);
  return clamped(boosted, 0.0, 1.0);
}

std::vector<ScaleLevel> default_scale_levels() {
  auto cfg = [](double alpha, double lambda) {
    SolverConfig c;
    c.alpha = alpha;
    c.lambda = lambda;
    return c;
  };
  return {{"small", cfg(0.01, 0.001), 2.0},
          {"median", cfg(0.1, 0.005), 2.0},
          {"coarse", cfg(1.0, 0.02), 2.0}};
}

MultiscaleDecomposition multiscale_decompose(const Field& image,
                                             const std::vector<ScaleLevel>& levels) {
  if (levels.empty()) throw ConfigError("multiscale_decompose: no levels");
  for (size_t i = 0; i + 1 < levels.size(); ++i)
    if (levels[i].config.lambda > levels[i + 1].config.lambda)
      throw ConfigError("multiscale_decompose: levels must run fine to coarse "
                        "(non-decreasing lambda)");
  for (const auto& level : levels)
    if (!std::isfinite(level.gain)) throw ConfigError("multiscale_decompose: non-finite gain");
  image.assert_finite("multiscale_decompose: input");

  MultiscaleDecomposition out;
  Field current = image;
  for (const auto& level : levels) {
    Field next = smooth(current, level.config).output;
    out.details.push_back(current - next);
    out.labels.push_back(level.label);
    current = std::move(next);
  }
  out.base = std::move(current);
  return out;
}

Field multiscale_recombine(const Field& base, const std::vector<Field>& details,
                           const std::vector<double>& gains) {
  if (gains.size() != details.size())
    throw ConfigError("multiscale_recombine: gains length must match details");
  Field out = base;
  for (size_t i = 0; i < details.size(); ++i) {
    if (!std::isfinite(gains[i])) throw ConfigError("multiscale_recombine: non-finite gain");
    if (!details[i].same_shape(base)) throw ShapeError("multiscale_recombine: shape mismatch");
    out = out + gains[i] * details[i];
  }
  return clamped(out, 0.0, 1.0);
}

Field hdr_compress(const Field& radiance, const SolverConfig& config, double target_range,
                   double saturation, HdrDiagnostics* diagnostics) {
  if (!(target_range > 0)) throw ConfigError("hdr_compress: target_range must be > 0");
  if (!(saturation > 0) || saturation > 1)
    throw ConfigError("hdr_compress: saturation must be in (0, 1]");
  radiance.assert_finite("hdr_compress: input");
  if (radiance.min_value() < 0)
    throw NumericError("hdr_compress: negative radiance");
  if (radiance.channels() != 1 && radiance.channels() != 3)
    throw ShapeError("hdr_compress: expected 1 or 3 channels");

  const Field lum = luminance(radiance);
  Field log_lum(lum.height(), lum.width(), 1);
  log_lum.plane(0) = (lum.plane(0) + kLumFloor).log10();

  const Field base = smooth(log_lum, config).output;
  const Field detail = log_lum - base;

  const double hi = base.max_value();
  const double range = hi - base.min_value();
  // Compress only: a base already inside the target range is left alone.
  const double s = (range > 0) ? std::min(target_range / range, 1.0) : 1.0;

  Plane compressed = s * (base.plane(0) - hi) + detail.plane(0);
  Plane display = Eigen::pow(10.0, compressed);

  Field out(radiance.height(), radiance.width(), radiance.channels());
  // max() rather than an additive floor: any pixel with luminance above the
  // floor gets the exact documented ratio c / L, the floor only guards black.
  const Plane lum_floored = lum.plane(0).max(kLumFloor);
  for (int c = 0; c < radiance.channels(); ++c)
    out.plane(c) = (radiance.plane(c) / lum_floored).pow(saturation) * display;

  if (diagnostics != nullptr) {
    diagnostics->log_luminance = log_lum;
    diagnostics->base = base;
    diagnostics->detail = detail;
    diagnostics->scale = s;
  }
  return clamped(out, 0.0, 1.0);
}

Field stylize(const Field& image, const SolverConfig& config, double dog_sigma, double dog_k,
              double edge_tau, StylizeMode mode, bool soft_threshold) {
  if (!(dog_sigma > 0)) throw ConfigError("stylize: dog_sigma must be > 0");
  if (!(dog_k > 1)) throw ConfigError("stylize: dog_k must be > 1");
  if (!(edge_tau >= 0) || !std::isfinite(edge_tau))
    throw ConfigError("stylize: edge_tau must be >= 0");
  image.assert_finite("stylize: input");

  const Field s = smooth(image, config).output;
  const Field lum = luminance(s);
  const Plane dog =
      gaussian_blur(lum, dog_sigma).plane(0) - gaussian_blur(lum, dog_sigma * dog_k).plane(0);
  const Plane mag = dog.abs();

  // Soft mask ramps over [tau/2, 3 tau/2] with a smoothstep; the hard mask
  // inks everything at or above tau.
  auto soft_mask = [&]() -> Plane {
    if (edge_tau == 0) return (mag >= 0.0).cast<double>();
    Plane t = ((mag - 0.5 * edge_tau) / edge_tau).max(0.0).min(1.0);
    return t.square() * (3.0 - 2.0 * t);
  };
  auto hard_mask = [&]() -> Plane { return (mag >= edge_tau).cast<double>(); };

  Field out(image.height(), image.width(), image.channels());
  if (mode == StylizeMode::Pen) {
    const Plane ink = soft_threshold ? soft_mask() : hard_mask();
    for (int c = 0; c < out.channels(); ++c) out.plane(c) = 1.0 - ink;
  } else {
    const Plane ink = soft_mask();
    for (int c = 0; c < out.channels(); ++c)
      out.plane(c) = s.plane(c) * (1.0 - kInkStrength * ink);
  }
  return clamped(out, 0.0, 1.0);
}

}  // namespace semisparse
