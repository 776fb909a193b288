#include <doctest.h>

#include <semisparse/operators.hpp>
#include <semisparse/rng.hpp>
#include <semisparse/solver.hpp>
#include <semisparse/synth.hpp>

#include <cmath>
#include <vector>

using namespace semisparse;

namespace {

Field random_field(int h, int w, int channels, uint64_t seed) {
  Field f(h, w, channels);
  CounterRng rng(seed);
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) f.at(y, x, c) = rng.uniform();
  return f;
}

StackedField random_stack(const Field& base, int layer_count, uint64_t seed) {
  StackedField s;
  for (int l = 0; l < layer_count; ++l)
    s.layers.push_back(random_field(base.height(), base.width(), base.channels(),
                                    seed + static_cast<uint64_t>(l)));
  return s;
}

StackedField one_sample_stack(const std::vector<double>& components) {
  StackedField s;
  for (double v : components) s.layers.push_back(Field::constant(1, 1, 1, v));
  return s;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0;
  for (int c = 0; c < a.channels(); ++c)
    m = std::max(m, (a.plane(c) - b.plane(c)).abs().maxCoeff());
  return m;
}

double rel_err(const Field& got, const Field& want) {
  double num = 0, den = 0;
  for (int c = 0; c < got.channels(); ++c) {
    num += (got.plane(c) - want.plane(c)).matrix().squaredNorm();
    den += want.plane(c).matrix().squaredNorm();
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

TEST_CASE("threshold keeps large components and kills small ones") {
  // threshold lambda / beta = 0.01; squares are 0.0025, 0.04, 0.0225
  Field du(3, 1, 1);
  du.at(0, 0, 0) = 0.05;
  du.at(1, 0, 0) = 0.2;
  du.at(2, 0, 0) = -0.15;
  StackedField s;
  s.layers.push_back(du);
  StackedField w = w_step(s, 0.02, 2.0, Grouping::PerComponent);
  CHECK(w.layer(0).at(0, 0, 0) == 0.0);
  CHECK(w.layer(0).at(1, 0, 0) == 0.2);
  CHECK(w.layer(0).at(2, 0, 0) == -0.15);
}

TEST_CASE("threshold tie keeps the value") {
  // |du|^2 == lambda / beta exactly: 0.25 == 0.5 / 2
  for (Grouping g : {Grouping::PerComponent, Grouping::PerPixel}) {
    StackedField w = w_step(one_sample_stack({0.5}), 0.5, 2.0, g);
    CHECK(w.layer(0).at(0, 0, 0) == 0.5);
    StackedField w2 = w_step(one_sample_stack({std::nextafter(0.5, 0.0)}), 0.5, 2.0, g);
    CHECK(w2.layer(0).at(0, 0, 0) == 0.0);
  }
}

TEST_CASE("threshold above every sample zeroes the stack") {
  Field base(4, 5, 2);
  StackedField s = random_stack(base, 2, 9);
  StackedField w = w_step(s, 1e6, 1.0, Grouping::PerPixel);
  CHECK(w.squared_norm() == 0.0);
  CHECK(nnz_groups(w, Grouping::PerPixel) == 0);
}

TEST_CASE("threshold is idempotent") {
  Field base(6, 7, 3);
  for (Grouping g : {Grouping::PerComponent, Grouping::PerPixel}) {
    StackedField s = random_stack(base, 2, 31);
    StackedField once = w_step(s, 0.8, 1.7, g);
    StackedField twice = w_step(once, 0.8, 1.7, g);
    for (int l = 0; l < s.layer_count(); ++l)
      CHECK(max_abs_diff(once.layer(l), twice.layer(l)) == 0.0);
  }
}

TEST_CASE("threshold matches a scalar oracle on a dense value grid") {
  // one sample per field; the oracle below shares nothing with w_step
  const double lambda = 0.02, beta = 2.0;
  const double thr = lambda / beta;
  int mismatches = 0;
  for (int i = -1500; i <= 1500; ++i) {
    const double v = static_cast<double>(i) * 1e-3;
    StackedField w = w_step(one_sample_stack({v}), lambda, beta, Grouping::PerComponent);
    const double want = (v * v >= thr) ? v : 0.0;
    if (w.layer(0).at(0, 0, 0) != want) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("pixel grouping pools components, component grouping does not") {
  // components (0.3, 0.05): jointly 0.0925 passes a 0.05 threshold,
  // separately only 0.3 does
  StackedField s = one_sample_stack({0.3, 0.05});
  StackedField joint = w_step(s, 0.1, 2.0, Grouping::PerPixel);
  CHECK(joint.layer(0).at(0, 0, 0) == 0.3);
  CHECK(joint.layer(1).at(0, 0, 0) == 0.05);
  CHECK(nnz_groups(joint, Grouping::PerPixel) == 1);

  StackedField solo = w_step(s, 0.1, 2.0, Grouping::PerComponent);
  CHECK(solo.layer(0).at(0, 0, 0) == 0.3);
  CHECK(solo.layer(1).at(0, 0, 0) == 0.0);
  CHECK(nnz_groups(solo, Grouping::PerComponent) == 1);
}

TEST_CASE("pixel grouping pools channels too") {
  Field du(1, 1, 2);
  du.at(0, 0, 0) = 0.2;
  du.at(0, 0, 1) = 0.2;
  StackedField s;
  s.layers.push_back(du);
  // per channel 0.04 < 0.05 dies alone, 0.08 jointly survives
  StackedField joint = w_step(s, 0.1, 2.0, Grouping::PerPixel);
  CHECK(joint.layer(0).at(0, 0, 0) == 0.2);
  CHECK(joint.layer(0).at(0, 0, 1) == 0.2);
  StackedField solo = w_step(s, 0.1, 2.0, Grouping::PerComponent);
  CHECK(solo.squared_norm() == 0.0);
}

TEST_CASE("threshold argument validation") {
  StackedField s = one_sample_stack({1.0});
  CHECK_THROWS_AS(w_step(StackedField{}, 0.1, 1.0, Grouping::PerPixel), ShapeError);
  CHECK_THROWS_AS(w_step(s, -0.1, 1.0, Grouping::PerPixel), ConfigError);
  CHECK_THROWS_AS(w_step(s, 0.1, 0.0, Grouping::PerPixel), ConfigError);
}

TEST_CASE("spectral solve matches the dense reference") {
  struct Case {
    int h, w, channels;
    double alpha, beta;
    SolverConfig cfg;
  };
  std::vector<Case> cases;
  {
    Case a{16, 16, 1, 0.5, 3.0, {}};
    a.cfg.order = 2;
    cases.push_back(a);
    Case b{64, 1, 1, 0.2, 10.0, {}};
    b.cfg.order = 1;
    cases.push_back(b);
    Case c{12, 10, 2, 1.0, 0.5, {}};
    c.cfg.order = 3;
    c.cfg.cross_terms = true;
    cases.push_back(c);
    Case d{9, 11, 1, 0.0, 2.0, {}};
    d.cfg.order = 2;
    d.cfg.scalar_laplacian = true;
    cases.push_back(d);
  }
  uint64_t seed = 1000;
  for (auto& tc : cases) {
    tc.cfg.pad = 0;
    const SolverConfig cfg = tc.cfg.resolved(tc.w == 1);
    SolverWorkspace ws(tc.h, tc.w, cfg);
    Field f = random_field(tc.h, tc.w, tc.channels, seed++);
    StackedField w = random_stack(f, static_cast<int>(ws.high_spec().components().size()), seed++);
    Field fast = u_step(f, w, tc.alpha, tc.beta, ws);
    Field slow = dense_oracle_solve(f, w, tc.alpha, tc.beta, cfg);
    CHECK(rel_err(fast, slow) < 1e-8);
  }
}

TEST_CASE("solve with matching auxiliary stack returns the input") {
  SolverConfig cfg;
  cfg.order = 2;
  cfg.pad = 0;
  const SolverConfig r = cfg.resolved(false);
  SolverWorkspace ws(14, 11, r);
  Field f = random_field(14, 11, 2, 4);
  StackedField w = apply_diff(f, ws.high_spec());
  Field u = u_step(f, w, 0.7, 42.0, ws);
  CHECK(max_abs_diff(u, f) < 1e-10);
}

TEST_CASE("solve of a constant with zero auxiliary returns the constant") {
  SolverConfig cfg;
  cfg.pad = 0;
  const SolverConfig r = cfg.resolved(false);
  SolverWorkspace ws(8, 8, r);
  Field f = Field::constant(8, 8, 1, 0.42);
  StackedField w;
  w.layers.assign(2, Field(8, 8, 1));
  Field u = u_step(f, w, 0.5, 1e5, ws);
  CHECK(max_abs_diff(u, f) < 1e-10);
}

TEST_CASE("solve rejects mismatched shapes") {
  SolverConfig cfg;
  cfg.pad = 0;
  const SolverConfig r = cfg.resolved(false);
  SolverWorkspace ws(8, 8, r);
  Field f = random_field(8, 8, 1, 5);
  StackedField w;
  w.layers.assign(2, Field(8, 8, 1));
  CHECK_THROWS_AS(u_step(random_field(8, 7, 1, 6), w, 0.1, 1.0, ws), ShapeError);
  StackedField short_stack;
  short_stack.layers.assign(1, Field(8, 8, 1));
  CHECK_THROWS_AS(u_step(f, short_stack, 0.1, 1.0, ws), ShapeError);
  CHECK_THROWS_AS(u_step(f, w, -0.1, 1.0, ws), ConfigError);
}

TEST_CASE("energy value with explicit auxiliary variables") {
  SolverConfig cfg;
  cfg.lambda = 0.3;
  cfg.order = 2;
  cfg.grouping = Grouping::PerComponent;

  Field f = random_field(9, 8, 1, 60);
  const OperatorSpec high = OperatorSpec::make(2, 2);

  // u = f with w equal to the exact differences: only the sparsity term is left
  StackedField w = apply_diff(f, high);
  const long nnz = nnz_groups(w, cfg.grouping);
  CHECK(energy(f, f, w, cfg, 7.0, cfg.alpha) ==
        doctest::Approx(0.3 * static_cast<double>(nnz)).epsilon(1e-12));

  // constant everything: exactly zero
  Field c = Field::constant(6, 6, 1, 1.0);
  StackedField zero;
  zero.layers.assign(2, Field(6, 6, 1));
  CHECK(energy(c, c, zero, cfg, 7.0, cfg.alpha) == 0.0);
}

TEST_CASE("energy matches a hand-assembled evaluation") {
  SolverConfig cfg;
  cfg.lambda = 0.05;
  cfg.alpha = 0.4;
  cfg.order = 2;
  Field f = random_field(10, 7, 2, 71);
  Field u = random_field(10, 7, 2, 72);
  StackedField w = w_step(apply_diff(u, OperatorSpec::make(2, 2)), 0.05, 3.0, cfg.grouping);

  const double beta = 3.0;
  const Field diff = u - f;
  double expect = diff.squared_norm();
  expect += 0.4 * apply_diff(diff, OperatorSpec::make(1, 2)).squared_norm();
  expect += 0.05 * static_cast<double>(nnz_groups(w, cfg.grouping));
  StackedField du = apply_diff(u, OperatorSpec::make(2, 2));
  for (int l = 0; l < du.layer_count(); ++l)
    expect += beta * (du.layer(l) - w.layer(l)).squared_norm();

  CHECK(energy(f, u, w, cfg, beta, 0.4) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("one threshold-solve pair never raises the energy") {
  SolverConfig cfg;
  cfg.lambda = 0.02;
  cfg.alpha = 0.1;
  cfg.pad = 0;
  const SolverConfig r = cfg.resolved(false);
  SolverWorkspace ws(12, 10, r);

  uint64_t seed = 500;
  for (int run = 0; run < 5; ++run) {
    Field f = random_field(12, 10, 1, seed++);
    Field u = f;
    StackedField w = apply_diff(u, ws.high_spec());
    double beta = r.beta0;
    for (int it = 0; it < 12; ++it) {
      const double before = energy(f, u, w, r, beta, r.alpha);
      w = w_step(apply_diff(u, ws.high_spec()), r.lambda, beta, r.grouping);
      u = u_step(f, w, r.alpha, beta, ws);
      const double after = energy(f, u, w, r, beta, r.alpha);
      CHECK(after <= before * (1.0 + 1e-10) + 1e-12);
      beta *= r.kappa;
    }
  }
}

TEST_CASE("zero sparsity weight returns the input") {
  SolverConfig cfg;
  cfg.lambda = 0.0;
  Field f = random_field(40, 30, 3, 81);
  SmoothResult res = smooth(f, cfg);
  CHECK(max_abs_diff(res.output, f) < 1e-10);

  Field sig = random_field(50, 1, 1, 82);
  cfg.order = 1;
  CHECK(max_abs_diff(smooth(sig, cfg).output, sig) < 1e-10);
}

TEST_CASE("periodic triangle wave is a fixed point away from the folds") {
  // period 32, slope 1: second differences vanish except at the fold points,
  // where the magnitude 2 response survives any threshold the schedule visits
  const int n = 64, period = 32;
  Field f(n, 1, 1);
  for (int i = 0; i < n; ++i) {
    const int ph = i % period;
    f.at(i, 0, 0) = static_cast<double>(ph < period / 2 ? ph : period - ph);
  }
  SolverConfig cfg;
  cfg.lambda = 0.05;
  cfg.order = 2;
  cfg.pad = 0;  // the signal is exactly periodic
  SmoothResult res = smooth(f, cfg);

  double worst = 0;
  for (int i = 0; i < n; ++i) {
    const int ph = i % (period / 2);
    const int dist = std::min(ph, period / 2 - ph);
    if (dist > 2) worst = std::max(worst, std::abs(res.output.at(i, 0, 0) - f.at(i, 0, 0)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("smoothing commutes with constant shifts") {
  Field f = random_field(24, 18, 1, 90);
  SolverConfig cfg;
  cfg.lambda = 0.05;
  SmoothResult base = smooth(f, cfg);
  SmoothResult shifted = smooth(f + Field::constant(24, 18, 1, 0.35), cfg);
  Field expect = base.output + Field::constant(24, 18, 1, 0.35);
  CHECK(max_abs_diff(shifted.output, expect) < 1e-10);
}

TEST_CASE("channels separate under component grouping") {
  Field f = random_field(20, 16, 3, 95);
  SolverConfig cfg;
  cfg.grouping = Grouping::PerComponent;
  SmoothResult joint = smooth(f, cfg);
  for (int c = 0; c < 3; ++c) {
    Field mono(20, 16, 1);
    mono.plane(0) = f.plane(c);
    SmoothResult solo = smooth(mono, cfg);
    CHECK(max_abs_diff(solo.output,
                       [&] {
                         Field g(20, 16, 1);
                         g.plane(0) = joint.output.plane(c);
                         return g;
                       }()) == 0.0);
  }
}

TEST_CASE("trace follows the geometric schedule") {
  Field f = random_field(16, 12, 1, 99);
  SolverConfig cfg;
  cfg.lambda = 0.02;
  cfg.kappa = 1.5;
  cfg.max_iter = 100;
  SmoothResult res = smooth(f, cfg);
  const auto& rows = res.trace.rows;
  REQUIRE(!rows.empty());
  CHECK(rows.front().beta == doctest::Approx(0.02));
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].beta == doctest::Approx(rows[i - 1].beta * 1.5).epsilon(1e-12));
    CHECK(rows[i].alpha == doctest::Approx(rows[i - 1].alpha * 0.95).epsilon(1e-12));
    CHECK(rows[i].iteration == static_cast<int>(i));
  }
  // the loop runs exactly while beta < beta_max
  const int expected_iters =
      static_cast<int>(std::ceil(std::log(1e5 / 0.02) / std::log(1.5) - 1e-12));
  CHECK(res.trace.iterations() == expected_iters);
  CHECK(rows.back().beta * 1.5 >= 1e5);
}

TEST_CASE("max_iter caps the schedule") {
  Field f = random_field(12, 9, 1, 101);
  SolverConfig cfg;
  cfg.max_iter = 7;
  SmoothResult res = smooth(f, cfg);
  CHECK(res.trace.iterations() == 7);
}

TEST_CASE("smoothing never adds sparse-order structure") {
  RampStepsSpec spec;
  spec.height = 64;
  spec.width = 64;
  spec.seed = 7;
  RampStepsImage img = gen_ramp_steps_image(spec);

  SolverConfig cfg;
  cfg.lambda = 0.005;
  SmoothResult res = smooth(img.noisy, cfg);

  const OperatorSpec high = OperatorSpec::make(2, 2);
  auto nnz_at = [&](const Field& x) {
    StackedField d = apply_diff(x, high);
    long count = 0;
    for (int l = 0; l < d.layer_count(); ++l)
      count += (d.layer(l).plane(0).abs() > 1e-3).count();
    return count;
  };
  CHECK(nnz_at(res.output) <= nnz_at(img.noisy));
  // and it actually denoises
  CHECK((res.output - img.clean).squared_norm() < (img.noisy - img.clean).squared_norm());
}

TEST_CASE("solver config validation") {
  Field f = random_field(8, 8, 1, 1);
  auto expect_throw = [&](auto mutate) {
    SolverConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(cfg.resolved(false), ConfigError);
  };
  expect_throw([](SolverConfig& c) { c.lambda = -1; });
  expect_throw([](SolverConfig& c) { c.alpha = -0.5; });
  expect_throw([](SolverConfig& c) { c.kappa = 1.0; });
  expect_throw([](SolverConfig& c) { c.tau = 1.0; });
  expect_throw([](SolverConfig& c) { c.order = 4; });
  expect_throw([](SolverConfig& c) { c.max_iter = 0; });
  expect_throw([](SolverConfig& c) { c.beta_max = 0; });
  expect_throw([](SolverConfig& c) { c.scalar_laplacian = true; c.order = 3; });

  SolverConfig ok;
  const SolverConfig r1 = ok.resolved(false);
  CHECK(r1.beta0 == 0.02);  // defaults to lambda
  CHECK(r1.pad == 16);
  CHECK(ok.resolved(true).pad == 8);
  SolverConfig zero;
  zero.lambda = 0;
  CHECK(zero.resolved(false).beta0 == 1e-4);

  Field bad = f;
  bad.at(0, 0, 0) = std::nan("");
  CHECK_THROWS_AS(smooth(bad, SolverConfig{}), NumericError);
}
