#include "semisparse/priors.hpp"

#include <cmath>
#include <cstdio>

namespace semisparse {

namespace {

constexpr int kMaxOrder = 5;

// Signed binomial coefficients of the k-fold forward difference,
// offsets 0..k: (-1)^(k-j) C(k, j), scaled by 2^(1-k). The scale keeps the
// absolute-sum gain of every order equal to the plain first difference
// (whose taps stay exactly -1, +1), so near-zero mass is comparable across
// orders instead of being swamped by the binomial growth of the raw taps.
std::vector<double> forward_diff_coeffs(int k) {
  std::vector<double> c(static_cast<size_t>(k) + 1);
  double binom = 1.0;
  const double scale = std::ldexp(1.0, 1 - k);
  for (int j = 0; j <= k; ++j) {
    c[static_cast<size_t>(j)] = (((k - j) % 2 == 0) ? 1.0 : -1.0) * binom * scale;
    binom = binom * (k - j) / (j + 1);
  }
  return c;
}

// k-fold forward difference along one axis, evaluated on the interior block
// [m, h-1-m] x [m, w-1-m] where m >= k guarantees every sample is in range.
Plane interior_axis_diff(const Plane& p, int k, int margin, bool along_rows) {
  const int h = static_cast<int>(p.rows());
  const int w = static_cast<int>(p.cols());
  const int ih = h - 2 * margin;
  const int iw = w - 2 * margin;
  const auto coeffs = forward_diff_coeffs(k);
  Plane out = Plane::Zero(ih, iw);
  for (int j = 0; j <= k; ++j) {
    const int dy = along_rows ? j : 0;
    const int dx = along_rows ? 0 : j;
    out += coeffs[static_cast<size_t>(j)] * p.block(margin + dy, margin + dx, ih, iw);
  }
  return out;
}

void validate_order(int order) {
  if (order < 1 || order > kMaxOrder)
    throw ConfigError("difference order must be 1.." + std::to_string(kMaxOrder));
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Plane gradient_magnitude(const Field& image, int order) {
  validate_order(order);
  const int margin = order;
  const int ih = image.height() - 2 * margin;
  const int iw = image.is_1d() ? 1 : image.width() - 2 * margin;
  if (ih < 1 || iw < 1)
    throw ShapeError("gradient_magnitude: image too small for order " + std::to_string(order));

  Plane mean_mag = Plane::Zero(ih, iw);
  for (int c = 0; c < image.channels(); ++c) {
    const Plane& p = image.plane(c);
    if (image.is_1d()) {
      // Column margin does not apply to single-column signals.
      Plane d = Plane::Zero(ih, 1);
      const auto coeffs = forward_diff_coeffs(order);
      for (int j = 0; j <= order; ++j)
        d += coeffs[static_cast<size_t>(j)] * p.block(margin + j, 0, ih, 1);
      mean_mag += d.abs();
    } else {
      const Plane dx = interior_axis_diff(p, order, margin, false);
      const Plane dy = interior_axis_diff(p, order, margin, true);
      mean_mag += (dx.square() + dy.square()).sqrt();
    }
  }
  return mean_mag / image.channels();
}

Histogram gradient_histogram(const Field& image, int order, int bins, double hi) {
  if (bins < 2) throw ConfigError("gradient_histogram: bins must be >= 2");
  if (hi <= 0) throw ConfigError("gradient_histogram: hi must be > 0");
  const Plane mag = gradient_magnitude(image, order);
  Histogram h;
  h.hi = hi;
  h.probabilities.assign(static_cast<size_t>(bins), 0.0);
  const double scale = bins / hi;
  for (long i = 0; i < mag.size(); ++i) {
    int b = static_cast<int>(mag(i) * scale);
    if (b >= bins) b = bins - 1;  // top bin absorbs the tail
    h.probabilities[static_cast<size_t>(b)] += 1.0;
  }
  const double total = static_cast<double>(mag.size());
  for (auto& p : h.probabilities) p /= total;
  return h;
}

double sparsity_ratio(const Field& image, int order, double epsilon) {
  if (epsilon <= 0) throw ConfigError("sparsity_ratio: epsilon must be > 0");
  const Plane mag = gradient_magnitude(image, order);
  return static_cast<double>((mag <= epsilon).count()) / static_cast<double>(mag.size());
}

SparsityReport semisparsity_report(const std::vector<Field>& corpus, double epsilon, int bins,
                                   double hi, int max_order) {
  if (corpus.empty()) throw ConfigError("semisparsity_report: empty corpus");
  if (max_order < 1 || max_order > kMaxOrder)
    throw ConfigError("semisparsity_report: max_order must be 1.." + std::to_string(kMaxOrder));
  if (bins < 2) throw ConfigError("semisparsity_report: bins must be >= 2");
  if (epsilon <= 0) throw ConfigError("semisparsity_report: epsilon must be > 0");

  SparsityReport report;
  report.epsilon = epsilon;
  report.max_order = max_order;
  report.images_used = static_cast<int>(corpus.size());

  for (int k = 1; k <= max_order; ++k) {
    double below = 0, total = 0;
    std::vector<double> counts(static_cast<size_t>(bins), 0.0);
    for (const auto& image : corpus) {
      // Images whose interior vanishes at this order contribute nothing.
      if (image.height() <= 2 * k || (!image.is_1d() && image.width() <= 2 * k)) continue;
      const Plane mag = gradient_magnitude(image, k);
      below += static_cast<double>((mag <= epsilon).count());
      total += static_cast<double>(mag.size());
      const double scale = bins / hi;
      for (long i = 0; i < mag.size(); ++i) {
        int b = static_cast<int>(mag(i) * scale);
        if (b >= bins) b = bins - 1;
        counts[static_cast<size_t>(b)] += 1.0;
      }
    }
    if (total == 0)
      throw ConfigError("semisparsity_report: no image large enough for order " +
                        std::to_string(k));
    report.ratios.push_back(below / total);
    Histogram h;
    h.hi = hi;
    h.probabilities.resize(static_cast<size_t>(bins));
    for (int b = 0; b < bins; ++b) h.probabilities[static_cast<size_t>(b)] = counts[static_cast<size_t>(b)] / total;
    report.histograms.push_back(std::move(h));
  }
  return report;
}

std::string report_ratios_csv(const SparsityReport& report) {
  std::string out = "order,ratio,gap\n";
  for (size_t i = 0; i < report.ratios.size(); ++i) {
    const double gap = (i == 0) ? 0.0 : report.ratios[i] - report.ratios[i - 1];
    out += std::to_string(i + 1) + "," + format_g17(report.ratios[i]) + "," + format_g17(gap) +
           "\n";
  }
  return out;
}

std::string report_histograms_csv(const SparsityReport& report) {
  std::string out = "order,bin_center,probability\n";
  for (size_t i = 0; i < report.histograms.size(); ++i) {
    const auto& h = report.histograms[i];
    for (size_t b = 0; b < h.probabilities.size(); ++b)
      out += std::to_string(i + 1) + "," + format_g17(h.bin_center(static_cast<int>(b))) + "," +
             format_g17(h.probabilities[b]) + "\n";
  }
  return out;
}

}  // namespace semisparse
