#include "semisparse/synth.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "semisparse/rng.hpp"

namespace semisparse {

Segment Segment::constant(int length, double level) {
  Segment s;
  s.kind = Kind::Constant;
  s.length = length;
  s.level = level;
  return s;
}

Segment Segment::ramp(int length, double start, double slope) {
  Segment s;
  s.kind = Kind::Ramp;
  s.length = length;
  s.level = start;
  s.slope = slope;
  return s;
}

Segment Segment::spike(int length, double base, double amplitude) {
  Segment s;
  s.kind = Kind::Spike;
  s.length = length;
  s.level = base;
  s.amplitude = amplitude;
  return s;
}

SignalPair gen_signal(const SignalSpec& spec) {
  if (spec.length < 1) throw ConfigError("gen_signal: length must be >= 1");
  if (spec.sigma < 0) throw ConfigError("gen_signal: sigma must be >= 0");
  if (spec.segments.empty()) throw ConfigError("gen_signal: no segments");
  long total = 0;
  for (const auto& seg : spec.segments) {
    if (seg.length < 1) throw ConfigError("gen_signal: segment length must be >= 1");
    if (!std::isfinite(seg.level) || !std::isfinite(seg.slope) || !std::isfinite(seg.amplitude))
      throw ConfigError("gen_signal: non-finite segment parameter");
    total += seg.length;
  }
  if (total != spec.length)
    throw ConfigError("gen_signal: segment lengths sum to " + std::to_string(total) +
                      ", expected " + std::to_string(spec.length));

  Field clean(spec.length, 1, 1);
  int pos = 0;
  for (const auto& seg : spec.segments) {
    for (int i = 0; i < seg.length; ++i) {
      double v = seg.level;
      switch (seg.kind) {
        case Segment::Kind::Constant:
          break;
        case Segment::Kind::Ramp:
          v += seg.slope * i;
          break;
        case Segment::Kind::Spike:
          if (i == seg.length / 2) v += seg.amplitude;
          break;
      }
      clean.at(pos++, 0, 0) = v;
    }
  }
  SignalPair pair;
  pair.noisy = add_gaussian_noise(clean, spec.sigma, spec.seed);
  pair.clean = std::move(clean);
  return pair;
}

RampStepsImage gen_ramp_steps_image(const RampStepsSpec& spec) {
  if (spec.height < 16 || spec.width < 16)
    throw ConfigError("gen_ramp_steps_image: extent must be >= 16");
  if (spec.sigma < 0) throw ConfigError("gen_ramp_steps_image: sigma must be >= 0");

  const int h = spec.height, w = spec.width;
  const int half_w = w / 2, half_h = h / 2;
  RampStepsImage out;
  out.clean = Field(h, w, 1);
  Plane& p = out.clean.plane(0);

  p.block(0, 0, half_h, half_w).setConstant(0.25);
  p.block(half_h, 0, h - half_h, half_w).setConstant(0.65);
  const double span = static_cast<double>(w - half_w - 1) + static_cast<double>(h - 1);
  for (int y = 0; y < h; ++y)
    for (int x = half_w; x < w; ++x)
      p(y, x) = 0.1 + 0.8 * (static_cast<double>(x - half_w) + y) / span;

  out.constant_regions = {{0, 0, half_h, half_w}, {half_h, 0, h - half_h, half_w}};
  out.ramp_region = {0, half_w, h, w - half_w};
  out.noisy = add_gaussian_noise(out.clean, spec.sigma, spec.seed);
  return out;
}

Field add_gaussian_noise(const Field& clean, double sigma, uint64_t seed) {
  if (sigma < 0) throw ConfigError("add_gaussian_noise: sigma must be >= 0");
  Field noisy = clean;
  if (sigma == 0) return noisy;
  CounterRng rng(seed);
  for (int c = 0; c < noisy.channels(); ++c) {
    Plane& p = noisy.plane(c);
    for (long i = 0; i < p.size(); ++i) p(i) += sigma * rng.gaussian();
  }
  return noisy;
}

Field uniform_field(int height, int width, int channels, uint64_t seed) {
  Field f(height, width, channels);
  CounterRng rng(seed);
  for (int c = 0; c < channels; ++c) {
    Plane& p = f.plane(c);
    for (long i = 0; i < p.size(); ++i) p(i) = rng.uniform();
  }
  return f;
}

namespace {

// Dense matrix of one stencil under periodic wrap, rows indexed like the
// row-major flattening of the grid.
Eigen::MatrixXd stencil_matrix(const Stencil& s, int h, int w) {
  const int n = h * w;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int row = y * w + x;
      for (const auto& tap : s.taps) {
        const int yy = ((y + tap.dy) % h + h) % h;
        const int xx = ((x + tap.dx) % w + w) % w;
        m(row, yy * w + xx) += tap.coeff;
      }
    }
  return m;
}

Eigen::VectorXd flatten(const Plane& p) {
  return Eigen::Map<const Eigen::VectorXd>(p.data(), p.size());
}

Plane unflatten(const Eigen::VectorXd& v, int h, int w) {
  Plane p(h, w);
  Eigen::Map<Eigen::VectorXd>(p.data(), p.size()) = v;
  return p;
}

}  // namespace

Field dense_oracle_solve(const Field& f, const StackedField& w, double alpha, double beta,
                         const SolverConfig& config) {
  const SolverConfig cfg = config.resolved(f.is_1d());
  const long n = static_cast<long>(f.height()) * f.width();
  if (n > 4096) throw ConfigError("dense_oracle_solve: grid larger than 4096 samples");
  const int rank = f.is_1d() ? 1 : 2;
  const auto high = OperatorSpec::make(cfg.order, rank, cfg.cross_terms, cfg.scalar_laplacian);
  const auto high_comps = high.components();
  if (!w.shaped_like(f) || w.layer_count() != static_cast<int>(high_comps.size()))
    throw ShapeError("dense_oracle_solve: auxiliary stack does not match operator layout");

  const int h = f.height(), wd = f.width();
  Eigen::MatrixXd data_op = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k < cfg.order; ++k) {
    const auto low = OperatorSpec::make(k, rank, cfg.cross_terms, cfg.scalar_laplacian && k == 2);
    for (const auto& comp : low.components()) {
      const Eigen::MatrixXd d = stencil_matrix(comp, h, wd);
      data_op += alpha * d.transpose() * d;
    }
  }
  std::vector<Eigen::MatrixXd> l_mats;
  Eigen::MatrixXd system = data_op;
  for (const auto& comp : high_comps) {
    l_mats.push_back(stencil_matrix(comp, h, wd));
    system += beta * l_mats.back().transpose() * l_mats.back();
  }

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  Field u(h, wd, f.channels());
  for (int c = 0; c < f.channels(); ++c) {
    Eigen::VectorXd rhs = data_op * flatten(f.plane(c));
    for (size_t j = 0; j < l_mats.size(); ++j)
      rhs += beta * l_mats[j].transpose() * flatten(w.layer(static_cast<int>(j)).plane(c));
    u.plane(c) = unflatten(ldlt.solve(rhs), h, wd);
  }
  return u;
}

SupportEnumResult support_enum_oracle(const Field& f, double lambda, double alpha, double beta,
                                      int order) {
  if (!f.is_1d() || f.channels() != 1)
    throw ConfigError("support_enum_oracle: single-channel 1D signals only");
  const int n = f.height();
  if (n > 12) throw ConfigError("support_enum_oracle: length must be <= 12");
  if (lambda < 0 || alpha < 0 || beta <= 0)
    throw ConfigError("support_enum_oracle: invalid weights");
  if (order < 1 || order > 3) throw ConfigError("support_enum_oracle: order must be 1..3");

  Eigen::MatrixXd data_op = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k < order; ++k) {
    const auto comps = OperatorSpec::make(k, 1).components();
    for (const auto& comp : comps) {
      const Eigen::MatrixXd d = stencil_matrix(comp, n, 1);
      data_op += alpha * d.transpose() * d;
    }
  }
  const Eigen::MatrixXd l = stencil_matrix(OperatorSpec::make(order, 1).components()[0], n, 1);
  const Eigen::VectorXd fv = flatten(f.plane(0));
  const Eigen::VectorXd rhs = data_op * fv;

  double best_energy = std::numeric_limits<double>::infinity();
  uint32_t best_support = 0;
  Eigen::VectorXd best_u;

  const uint32_t limit = 1u << n;
  for (uint32_t s = 0; s < limit; ++s) {
    // Off-support rows of L stay quadratically penalized; on-support rows
    // are absorbed by the free auxiliary values at zero cost.
    Eigen::MatrixXd system = data_op;
    for (int i = 0; i < n; ++i)
      if ((s & (1u << i)) == 0) system += beta * l.row(i).transpose() * l.row(i);
    const Eigen::VectorXd u = system.ldlt().solve(rhs);

    // data_op already contains the identity, so this is
    // |u-f|^2 + alpha * sum_k |D_k(u-f)|^2 in one quadratic form.
    const Eigen::VectorXd diff = u - fv;
    double e = (data_op * diff).dot(diff);
    const Eigen::VectorXd lu = l * u;
    for (int i = 0; i < n; ++i)
      if ((s & (1u << i)) == 0) e += beta * lu(i) * lu(i);
    e += lambda * static_cast<double>(std::popcount(s));

    if (e < best_energy) {
      best_energy = e;
      best_support = s;
      best_u = u;
    }
  }

  SupportEnumResult out;
  out.u = Field(n, 1, 1);
  out.u.plane(0) = unflatten(best_u, n, 1);
  Field wlayer(n, 1, 1);
  const Eigen::VectorXd lu = l * best_u;
  for (int i = 0; i < n; ++i)
    wlayer.at(i, 0, 0) = (best_support & (1u << i)) ? lu(i) : 0.0;
  out.w = StackedField({wlayer});
  out.energy_value = best_energy;
  out.support = best_support;
  return out;
}

}  // namespace semisparse
