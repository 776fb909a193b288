#pragma once

#include <string>
#include <vector>

#include "semisparse/field.hpp"

namespace semisparse {

/// Histogram of gradient magnitudes over [0, hi]; the last bin absorbs
/// values >= hi. Probabilities sum to 1 when any sample was counted.
struct Histogram {
  std::vector<double> probabilities;
  double hi = 1.0;
  double bin_center(int i) const {
    return (static_cast<double>(i) + 0.5) * hi / static_cast<double>(probabilities.size());
  }
};

/// Per-order sparsity statistics of a corpus: the fraction of interior sites
/// whose order-k difference magnitude falls below epsilon, for k = 1..max_order.
struct SparsityReport {
  std::vector<double> ratios;              // index k-1 -> order k
  std::vector<Histogram> histograms;       // same indexing
  double epsilon = 1e-3;
  int max_order = 5;
  int images_used = 0;

  /// Increase in the near-zero fraction from order k to k+1.
  double gap(int order) const { return ratios[static_cast<size_t>(order)] - ratios[static_cast<size_t>(order - 1)]; }
};

/// Magnitude of the order-k difference field, computed with k-fold forward
/// differences (no wrap) and a Euclidean reduction over axis components.
/// The order-k taps carry a 2^(1-k) scale so every order has the same
/// absolute-sum gain as the plain first difference (whose taps stay -1, +1);
/// without it the binomial growth of the raw taps would swamp the near-zero
/// statistics the report compares across orders.
/// Only interior sites survive: a border of k samples per side is excluded,
/// so no boundary rule contaminates the statistics. Channels are averaged
/// after the per-channel magnitude. Supports k = 1..5.
Plane gradient_magnitude(const Field& image, int order);

Histogram gradient_histogram(const Field& image, int order, int bins, double hi);

/// Fraction of interior magnitudes at or below epsilon (epsilon > 0).
double sparsity_ratio(const Field& image, int order, double epsilon);

/// Aggregated statistics over a corpus of already-loaded images.
/// epsilon is in intensity units (images are expected in [0, 1], so the
/// default 1e-3 is 0.1% of the dynamic range).
SparsityReport semisparsity_report(const std::vector<Field>& corpus, double epsilon = 1e-3,
                                   int bins = 64, double hi = 1.0, int max_order = 5);

/// Serializes ratios and gaps as CSV rows "order,ratio,gap".
std::string report_ratios_csv(const SparsityReport& report);

/// Serializes histograms as CSV rows "order,bin_center,probability".
std::string report_histograms_csv(const SparsityReport& report);

}  // namespace semisparse
