#include "semisparse/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "parallel.hpp"

namespace semisparse {

namespace {

bool is_smooth_235(int n) {
  for (int p : {2, 3, 5})
    while (n % p == 0) n /= p;
  return n == 1;
}

// Smallest 5-smooth integer >= n; FFT sizes with only factors 2, 3, 5 keep
// the transform on fast code paths.
int next_smooth_235(int n) {
  while (!is_smooth_235(n)) ++n;
  return n;
}

void check_positive_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
}

double energy_with_du(const Field& f, const Field& u, const StackedField& w,
                      const StackedField& du_high, const SolverConfig& cfg, double beta,
                      double alpha) {
  double e = (u - f).squared_norm();
  if (alpha > 0 && cfg.order > 1) {
    const Field diff = u - f;
    const int rank = f.is_1d() ? 1 : 2;
    for (int k = 1; k < cfg.order; ++k) {
      const auto spec = OperatorSpec::make(k, rank, cfg.cross_terms, cfg.scalar_laplacian && k == 2);
      e += alpha * apply_diff(diff, spec).squared_norm();
    }
  }
  e += cfg.lambda * static_cast<double>(nnz_groups(w, cfg.grouping));
  double coupling = 0;
  for (int l = 0; l < du_high.layer_count(); ++l)
    coupling += (du_high.layer(l) - w.layer(l)).squared_norm();
  return e + beta * coupling;
}

}  // namespace

SolverConfig SolverConfig::resolved(bool is_1d) const {
  SolverConfig r = *this;
  check_positive_finite(r.lambda, "lambda");
  check_positive_finite(r.alpha, "alpha");
  check_positive_finite(r.kappa, "kappa");
  check_positive_finite(r.tau, "tau");
  check_positive_finite(r.beta_max, "beta_max");
  if (r.lambda < 0) throw ConfigError("lambda must be >= 0");
  if (r.alpha < 0) throw ConfigError("alpha must be >= 0");
  if (r.kappa <= 1) throw ConfigError("kappa must be > 1");
  if (r.tau < 0 || r.tau >= 1) throw ConfigError("tau must be in [0, 1)");
  if (r.beta_max <= 0) throw ConfigError("beta_max must be > 0");
  if (r.order < 1 || r.order > 3) throw ConfigError("order must be 1..3");
  if (r.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (r.scalar_laplacian && r.order != 2)
    throw ConfigError("scalar_laplacian requires order 2");
  if (r.scalar_laplacian && r.cross_terms)
    throw ConfigError("scalar_laplacian excludes cross_terms");
  if (r.beta0 < 0) {
    // Default start equals lambda; with lambda == 0 any positive start works
    // (the threshold is 0 and the output is the quadratic limit), so pick a
    // small one that still terminates.
    r.beta0 = (r.lambda > 0) ? r.lambda : 1e-4;
  }
  check_positive_finite(r.beta0, "beta0");
  if (r.beta0 <= 0) throw ConfigError("beta0 must be > 0");
  if (r.pad < 0) r.pad = is_1d ? 8 : 16;
  return r;
}

SolverWorkspace::SolverWorkspace(int height, int width, const SolverConfig& resolved_config,
                                 int fft_lanes)
    : config_(resolved_config) {
  if (fft_lanes < 1) throw ConfigError("fft_lanes must be >= 1");
  for (int i = 0; i < fft_lanes; ++i)
    lanes_.push_back(std::make_unique<SpectralWorkspace>(height, width));
  const int rank = (width == 1) ? 1 : 2;
  const auto& cfg = config_;
  high_ = OperatorSpec::make(cfg.order, rank, cfg.cross_terms, cfg.scalar_laplacian && cfg.order == 2);
  for (int k = 1; k < cfg.order; ++k)
    lows_.push_back(OperatorSpec::make(k, rank, cfg.cross_terms, cfg.scalar_laplacian && k == 2));

  const auto& fft0 = fft();
  t_high_ = fft0.sample_half_spectrum(transfer_magnitude(high_, height, width));
  t_low_ = Plane::Zero(fft0.spectrum_rows(), fft0.spectrum_cols());
  for (const auto& low : lows_)
    t_low_ += fft0.sample_half_spectrum(transfer_magnitude(low, height, width));

  // The half layout folds conjugate pairs along columns (2D) or rows (1D);
  // the folded extent is the one whose transform length was halved.
  spec_weight_ = Plane::Constant(fft0.spectrum_rows(), fft0.spectrum_cols(), 2.0);
  if (width == 1) {
    spec_weight_(0, 0) = 1.0;
    if (height % 2 == 0) spec_weight_(fft0.spectrum_rows() - 1, 0) = 1.0;
  } else {
    spec_weight_.col(0) = 1.0;
    if (width % 2 == 0) spec_weight_.col(fft0.spectrum_cols() - 1) = 1.0;
  }
}

StackedField w_step(const StackedField& du, double lambda, double beta, Grouping grouping) {
  if (du.layer_count() == 0) throw ShapeError("w_step: empty stack");
  if (lambda < 0) throw ConfigError("w_step: lambda must be >= 0");
  if (beta <= 0) throw ConfigError("w_step: beta must be > 0");
  const double threshold = lambda / beta;

  StackedField w = du;
  if (grouping == Grouping::PerComponent) {
    for (auto& layer : w.layers)
      for (int c = 0; c < layer.channels(); ++c) {
        Plane& p = layer.plane(c);
        p *= (p.square() >= threshold).cast<double>();
      }
    return w;
  }

  // Per-pixel: one decision over all components and channels at each site.
  const Field& first = du.layer(0);
  Plane sumsq = Plane::Zero(first.height(), first.width());
  for (const auto& layer : du.layers)
    for (int c = 0; c < layer.channels(); ++c) sumsq += layer.plane(c).square();
  const Plane keep = (sumsq >= threshold).cast<double>();
  for (auto& layer : w.layers)
    for (int c = 0; c < layer.channels(); ++c) layer.plane(c) *= keep;
  return w;
}

long nnz_groups(const StackedField& w, Grouping grouping) {
  if (w.layer_count() == 0) return 0;
  if (grouping == Grouping::PerComponent) {
    long n = 0;
    for (const auto& layer : w.layers)
      for (int c = 0; c < layer.channels(); ++c)
        n += (layer.plane(c) != 0.0).count();
    return n;
  }
  const Field& first = w.layer(0);
  Plane sumsq = Plane::Zero(first.height(), first.width());
  for (const auto& layer : w.layers)
    for (int c = 0; c < layer.channels(); ++c) sumsq += layer.plane(c).square();
  return (sumsq > 0.0).count();
}

namespace {

// Shared body of the spectral solve. When quad_out is non-null it also
// evaluates the quadratic part of the objective,
//   |u - f|^2 + alpha * sum_k |D_k (u - f)|^2,
// by Parseval on the half spectrum while u_hat is in hand: the same value as
// the spatial sums up to transform roundoff, for two cheap passes instead of
// another round of stencils.
Field u_step_impl(const std::vector<CPlane>& f_hat, const StackedField& w, double alpha,
                  double beta, const SolverWorkspace& ws, double* quad_out) {
  const auto& fft = ws.fft();
  if (w.layer_count() == 0) throw ShapeError("u_step: empty auxiliary stack");
  const Field& first = w.layer(0);
  if (first.height() != fft.height() || first.width() != fft.width())
    throw ShapeError("u_step: auxiliary stack does not match workspace grid");
  const int channels = first.channels();
  if (static_cast<int>(f_hat.size()) != channels)
    throw ShapeError("u_step: channel count mismatch");
  if (alpha < 0 || beta < 0) throw ConfigError("u_step: weights must be >= 0");

  const Plane inv_denom =
      (1.0 + alpha * ws.transfer_low_sum() + beta * ws.transfer_high()).inverse();
  // Both gains are real, so the complex solve splits into two real ones.
  const Plane g_data = (1.0 + alpha * ws.transfer_low_sum()) * inv_denom;
  const Plane g_adj = beta * inv_denom;
  const Plane quad_weight =
      quad_out ? Plane(ws.spectrum_weight() * (1.0 + alpha * ws.transfer_low_sum())) : Plane();
  const Field adj = apply_adjoint(w, ws.high_spec());

  Field u(fft.height(), fft.width(), channels);
  std::vector<double> quad_parts(static_cast<size_t>(channels), 0.0);
  // One plan/buffer lane per concurrent channel; short on lanes, go serial.
  const bool fan_out = ws.fft_lanes() >= channels;
  const long work = fan_out ? static_cast<long>(fft.height()) * fft.width() : 0;
  detail::parallel_items(channels, work, [&](int c) {
    const SpectralWorkspace& lane = ws.fft(fan_out ? c : 0);
    const CPlane a_hat = lane.forward(adj.plane(c));
    const CPlane& fc = f_hat[static_cast<size_t>(c)];
    CPlane u_hat(lane.spectrum_rows(), lane.spectrum_cols());
    u_hat.real() = fc.real() * g_data + a_hat.real() * g_adj;
    u_hat.imag() = fc.imag() * g_data + a_hat.imag() * g_adj;
    if (quad_out) quad_parts[static_cast<size_t>(c)] = (quad_weight * (u_hat - fc).abs2()).sum();
    u.plane(c) = lane.inverse(u_hat);
  });
  if (quad_out) {
    double quad = 0;
    for (double part : quad_parts) quad += part;
    *quad_out = quad / (static_cast<double>(fft.height()) * fft.width());
  }
  return u;
}

}  // namespace

Field u_step_spectral(const std::vector<CPlane>& f_hat, const StackedField& w, double alpha,
                      double beta, const SolverWorkspace& ws) {
  return u_step_impl(f_hat, w, alpha, beta, ws, nullptr);
}

Field u_step(const Field& f, const StackedField& w, double alpha, double beta,
             const SolverWorkspace& ws) {
  const auto& fft = ws.fft();
  if (f.height() != fft.height() || f.width() != fft.width())
    throw ShapeError("u_step: field does not match workspace grid");
  std::vector<CPlane> f_hat;
  f_hat.reserve(static_cast<size_t>(f.channels()));
  for (int c = 0; c < f.channels(); ++c) f_hat.push_back(fft.forward(f.plane(c)));
  return u_step_spectral(f_hat, w, alpha, beta, ws);
}

double energy(const Field& f, const Field& u, const StackedField& w, const SolverConfig& config,
              double beta, double alpha) {
  if (!f.same_shape(u)) throw ShapeError("energy: u and f shapes differ");
  const SolverConfig cfg = config.resolved(f.is_1d());
  const int rank = f.is_1d() ? 1 : 2;
  const auto high = OperatorSpec::make(cfg.order, rank, cfg.cross_terms, cfg.scalar_laplacian);
  if (!w.shaped_like(f) ||
      w.layer_count() != static_cast<int>(high.components().size()))
    throw ShapeError("energy: auxiliary stack does not match operator layout");
  return energy_with_du(f, u, w, apply_diff(u, high), cfg, beta, alpha);
}

SmoothResult smooth(const Field& f, const SolverConfig& config) {
  f.assert_finite("smooth: input");
  const SolverConfig cfg = config.resolved(f.is_1d());

  // Mirror margins, optionally stretched so the padded extents are 5-smooth.
  // pad == 0 is the strict periodic contract: no padding, no size rounding.
  int top = std::min(cfg.pad, f.height() - 1), bottom = top;
  int left = f.is_1d() ? 0 : std::min(cfg.pad, f.width() - 1), right = left;
  if (top > 0) {
    const int target = next_smooth_235(f.height() + top + bottom);
    int extra = target - (f.height() + top + bottom);
    if (top + extra - extra / 2 < f.height()) {
      top += extra - extra / 2;
      bottom += extra / 2;
    }
  }
  if (left > 0) {
    const int target = next_smooth_235(f.width() + left + right);
    int extra = target - (f.width() + left + right);
    if (left + extra - extra / 2 < f.width()) {
      left += extra - extra / 2;
      right += extra / 2;
    }
  }

  const bool padded = (top | bottom | left | right) != 0;
  const Field fp = padded ? mirror_pad(f, top, bottom, left, right) : f;
  const int lanes = std::min(fp.channels(), 8);
  SolverWorkspace ws(fp.height(), fp.width(), cfg, lanes);

  std::vector<CPlane> f_hat(static_cast<size_t>(fp.channels()));
  const bool fan_out = lanes >= fp.channels();
  detail::parallel_items(fp.channels(),
                         fan_out ? static_cast<long>(fp.height()) * fp.width() : 0,
                         [&](int c) {
                           f_hat[static_cast<size_t>(c)] = ws.fft(fan_out ? c : 0).forward(fp.plane(c));
                         });

  Field u = fp;
  StackedField du = apply_diff(u, ws.high_spec());
  double beta = cfg.beta0;
  double alpha = cfg.alpha;
  const double alpha_floor = std::min(1e-8, cfg.alpha);

  SolverTrace trace;
  const auto run_start = std::chrono::steady_clock::now();
  int iter = 0;
  while (beta < cfg.beta_max && iter < cfg.max_iter) {
    const auto t0 = std::chrono::steady_clock::now();
    const StackedField w = w_step(du, cfg.lambda, beta, cfg.grouping);
    double quad = 0;
    u = u_step_impl(f_hat, w, alpha, beta, ws, &quad);
    du = apply_diff(u, ws.high_spec());
    const long nnz = nnz_groups(w, cfg.grouping);
    double coupling = 0;
    for (int l = 0; l < du.layer_count(); ++l)
      for (int c = 0; c < fp.channels(); ++c)
        coupling += (du.layer(l).plane(c) - w.layer(l).plane(c)).matrix().squaredNorm();
    const double e = quad + cfg.lambda * static_cast<double>(nnz) + beta * coupling;
    const auto t1 = std::chrono::steady_clock::now();
    trace.rows.push_back({iter, beta, alpha,
                          e, nnz,
                          std::chrono::duration<double, std::milli>(t1 - t0).count()});
    alpha = std::max(alpha * cfg.tau, alpha_floor);
    beta *= cfg.kappa;
    ++iter;
  }
  const auto run_end = std::chrono::steady_clock::now();
  trace.total_millis = std::chrono::duration<double, std::milli>(run_end - run_start).count();

  Field out = padded ? crop(u, top, bottom, left, right) : u;
  out.assert_finite("smooth: output");
  return {std::move(out), std::move(trace)};
}

}  // namespace semisparse
