#pragma once

#include <string>
#include <vector>

#include "semisparse/field.hpp"
#include "semisparse/solver.hpp"

namespace semisparse {

/// Luminance of a 1- or 3-channel field (Rec. 709 weights
/// 0.2126 / 0.7152 / 0.0722 for color).
Field luminance(const Field& image);

/// Separable Gaussian blur, mirrored boundary, kernel radius ceil(3.5 sigma).
Field gaussian_blur(const Field& image, double sigma);

/// Base/detail boost. With log_domain (the default for photographs) the
/// decomposition runs on l = log10(x + 1e-4) and the result maps back
/// through the inverse before the final clamp to [0,1].
/// boost = 1 reproduces the input (pre-clamp); boost = 0 returns the base.
Field detail_enhance(const Field& image, const SolverConfig& config, double boost = 3.5,
                     bool log_domain = true);

/// One smoothing scale in a coarse-to-fine stack.
struct ScaleLevel {
  std::string label;  // "small" | "median" | "coarse" | "custom"
  SolverConfig config;
  double gain = 1.0;
};

/// Fine / medium / coarse defaults: (alpha 0.01, lambda 0.001),
/// (0.1, 0.005), (1.0, 0.02), each with a x2 detail gain.
std::vector<ScaleLevel> default_scale_levels();

struct MultiscaleDecomposition {
  Field base;                 // coarsest smoothing result
  std::vector<Field> details; // finest first; telescoping differences
  std::vector<std::string> labels;
};

/// Repeated smoothing, each level applied to the previous base. Levels must
/// run fine to coarse (non-decreasing lambda).
MultiscaleDecomposition multiscale_decompose(const Field& image,
                                             const std::vector<ScaleLevel>& levels);

/// base + sum_i gain_i * detail_i, clamped to [0,1]. Unit gains reproduce
/// the decomposed image exactly before the clamp.
Field multiscale_recombine(const Field& base, const std::vector<Field>& details,
                           const std::vector<double>& gains);

/// Optional inspection outputs of hdr_compress.
struct HdrDiagnostics {
  Field log_luminance;
  Field base;
  Field detail;
  double scale = 1.0;  // contrast factor applied to the base layer
};

/// Tone mapping by base-layer contrast compression in log10 luminance:
/// the base is rescaled to span target_range decades (never expanded),
/// detail survives unscaled, and color returns via (c / L)^saturation.
Field hdr_compress(const Field& radiance, const SolverConfig& config, double target_range = 2.5,
                   double saturation = 0.6, HdrDiagnostics* diagnostics = nullptr);

enum class StylizeMode { Pen, ColorPencil };

/// Difference-of-Gaussians line drawing over the smoothed image. Pen mode
/// inks |DoG| >= edge_tau on a white page (hard mask unless soft_threshold);
/// color-pencil mode darkens the smoothed colors by a soft edge mask.
Field stylize(const Field& image, const SolverConfig& config, double dog_sigma = 1.0,
              double dog_k = 1.6, double edge_tau = 0.02,
              StylizeMode mode = StylizeMode::Pen, bool soft_threshold = false);

}  // namespace semisparse
