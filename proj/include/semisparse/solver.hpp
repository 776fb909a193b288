#pragma once

#include <memory>
#include <vector>

#include "semisparse/fft.hpp"
#include "semisparse/field.hpp"
#include "semisparse/operators.hpp"

namespace semisparse {

/// How samples are grouped for the sparsity threshold and the nonzero count.
/// PerPixel couples all operator components and channels at each site (one
/// keep/kill decision per pixel); PerComponent decides each sample alone.
enum class Grouping { PerPixel, PerComponent };

/// Parameters of the smoothing objective
///   |u - f|^2 + alpha * sum_{k<n} |D_k u - D_k f|^2 + lambda * nnz(D_n u)
/// and of the alternating scheme that minimizes it. Negative sentinel values
/// resolve to defaults in `resolved()`.
struct SolverConfig {
  double lambda = 0.02;   // sparsity weight on the order-n differences, >= 0
  double alpha = 0.1;     // quadratic weight on lower-order differences, >= 0
  double kappa = 1.2;     // per-iteration growth of the coupling weight, > 1
  double tau = 0.95;      // per-iteration decay of alpha, in [0, 1)
  double beta0 = -1.0;    // initial coupling weight; < 0 means "use lambda"
  double beta_max = 1e5;  // loop runs while beta < beta_max
  int order = 2;          // highest difference order n, 1..3
  Grouping grouping = Grouping::PerPixel;
  int pad = -1;           // mirror margin; < 0 means 16 (images) / 8 (signals)
  int max_iter = 100;
  bool cross_terms = false;       // mixed components at orders 2 and 3
  bool scalar_laplacian = false;  // 5-point Laplacian instead of {xx, yy}

  /// Validates and fills sentinels for a field of the given rank.
  /// lambda == 0 is allowed (the quadratic-only limit; beta0 then falls back
  /// to 1e-4 so the schedule still terminates). Throws ConfigError.
  SolverConfig resolved(bool is_1d) const;
};

/// One iteration of diagnostics.
struct TraceRow {
  int iteration;
  double beta;
  double alpha;
  double energy;      // objective with the current auxiliary variables
  long nnz;           // nonzero groups in the auxiliary stack
  double millis;      // wall time of the iteration
};

struct SolverTrace {
  std::vector<TraceRow> rows;
  double total_millis = 0;
  int iterations() const { return static_cast<int>(rows.size()); }
};

struct SmoothResult {
  Field output;
  SolverTrace trace;
};

/// Spectra and FFT plans for one (shape, operator) pair, reused across
/// iterations and channels. The grid here is the solver's working grid
/// (already padded when smoothing with mirror margins). With fft_lanes > 1
/// the workspace carries that many independent plan/buffer sets so channels
/// can transform concurrently; lane count never changes the arithmetic.
class SolverWorkspace {
 public:
  SolverWorkspace(int height, int width, const SolverConfig& resolved_config, int fft_lanes = 1);

  const OperatorSpec& high_spec() const { return high_; }
  const std::vector<OperatorSpec>& low_specs() const { return lows_; }
  const SpectralWorkspace& fft() const { return *lanes_.front(); }
  const SpectralWorkspace& fft(int lane) const { return *lanes_[static_cast<size_t>(lane)]; }
  int fft_lanes() const { return static_cast<int>(lanes_.size()); }
  const Plane& transfer_high() const { return t_high_; }  // half-spectrum layout
  const Plane& transfer_low_sum() const { return t_low_; }
  /// Multiplicity of each half-spectrum bin in the full spectrum (1 for
  /// self-conjugate bins, 2 for bins standing in for a conjugate pair), for
  /// Parseval sums over the half layout.
  const Plane& spectrum_weight() const { return spec_weight_; }
  const SolverConfig& config() const { return config_; }

 private:
  SolverConfig config_;
  OperatorSpec high_;
  std::vector<OperatorSpec> lows_;
  std::vector<std::unique_ptr<SpectralWorkspace>> lanes_;
  Plane t_high_;
  Plane t_low_;
  Plane spec_weight_;
};

/// Elementwise/groupwise hard shrink of the difference stack:
/// a group is zeroed when beta * |group|^2 < lambda, kept exactly otherwise
/// (ties keep). This is the exact minimizer of
///   lambda * nnz(w) + beta * |w - du|^2  over w.
StackedField w_step(const StackedField& du, double lambda, double beta, Grouping grouping);

/// Number of groups with any nonzero sample, under the given grouping.
long nnz_groups(const StackedField& w, Grouping grouping);

/// Exact spectral solve of the quadratic subproblem on the periodic grid:
///   (I + alpha * sum_k Dk^T Dk + beta * L^T L) u = (I + alpha * sum_k Dk^T Dk) f + beta * L^T w
/// The denominator 1 + alpha*T_low + beta*T_high is >= 1 everywhere.
Field u_step(const Field& f, const StackedField& w, double alpha, double beta,
             const SolverWorkspace& ws);

/// Same solve with the spectrum of f precomputed (one forward FFT per channel
/// saved per iteration inside smooth()).
Field u_step_spectral(const std::vector<CPlane>& f_hat, const StackedField& w, double alpha,
                      double beta, const SolverWorkspace& ws);

/// Objective value with explicit auxiliary variables:
///   |u-f|^2 + alpha * sum_{k<n} |D_k(u-f)|^2 + lambda * nnz(w) + beta * |D_n u - w|^2
/// alpha is passed explicitly because the loop decays it away from
/// config.alpha; nnz counting follows config.grouping.
double energy(const Field& f, const Field& u, const StackedField& w, const SolverConfig& config,
              double beta, double alpha);

/// Full smoothing pass: mirror-pad, alternate w_step / u_step while the
/// coupling weight grows geometrically, crop back. Deterministic: identical
/// inputs produce identical outputs.
SmoothResult smooth(const Field& f, const SolverConfig& config);

}  // namespace semisparse
