#include <doctest.h>

#include <semisparse/metrics.hpp>
#include <semisparse/rng.hpp>

#include <cmath>

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

}  // namespace

TEST_CASE("identical fields report the capped value") {
  Field f = random_field(10, 10, 3, 1);
  CHECK(psnr(f, f) == 99.0);
  CHECK(mae(f, f) == 0.0);
}

TEST_CASE("uniform differences give closed-form values") {
  Field a = Field::constant(8, 8, 1, 0.5);
  Field b = Field::constant(8, 8, 1, 0.6);
  // MSE = 0.01, peak 1 -> 10 log10(1 / 0.01) = 20 dB
  CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(mae(a, b) == doctest::Approx(0.1).epsilon(1e-12));
  // doubling the peak adds 20 log10(2)
  CHECK(psnr(a, b, 0, 2.0) == doctest::Approx(20.0 + 20.0 * std::log10(2.0)).epsilon(1e-12));
}

TEST_CASE("metrics are symmetric") {
  Field a = random_field(9, 7, 2, 2);
  Field b = random_field(9, 7, 2, 3);
  CHECK(psnr(a, b) == psnr(b, a));
  CHECK(mae(a, b) == mae(b, a));
}

TEST_CASE("mae satisfies the triangle inequality") {
  Field a = random_field(6, 6, 1, 4);
  Field b = random_field(6, 6, 1, 5);
  Field c = random_field(6, 6, 1, 6);
  CHECK(mae(a, c) <= mae(a, b) + mae(b, c) + 1e-15);
}

TEST_CASE("crop excludes the boundary") {
  Field a = Field::constant(10, 10, 1, 0.5);
  Field b = a;
  // corrupt only the outer two rings
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x)
      if (y < 2 || y >= 8 || x < 2 || x >= 8) b.at(y, x, 0) = 0.9;
  CHECK(psnr(a, b, 0) < 99.0);
  CHECK(psnr(a, b, 2) == 99.0);
  CHECK(mae(a, b, 2) == 0.0);

  // 1D fields crop rows only
  Field s1 = Field::constant(10, 1, 1, 0.1);
  Field s2 = s1;
  s2.at(0, 0, 0) = 0.7;
  s2.at(9, 0, 0) = 0.7;
  CHECK(mae(s1, s2, 1) == 0.0);
}

TEST_CASE("psnr decreases as the error grows") {
  Field ref = Field::constant(12, 12, 1, 0.5);
  double last = 1e300;
  for (double amp : {0.01, 0.02, 0.05, 0.1}) {
    Field noisy = ref;
    CounterRng rng(7);
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 12; ++x) noisy.at(y, x, 0) += amp * (rng.uniform() - 0.5);
    const double db = psnr(ref, noisy);
    CHECK(db < last);
    last = db;
  }
}

TEST_CASE("metric argument validation") {
  Field a = Field::constant(6, 6, 1, 0.0);
  CHECK_THROWS_AS(psnr(a, Field(6, 5, 1)), ShapeError);
  CHECK_THROWS_AS(psnr(a, Field(6, 6, 2)), ShapeError);
  CHECK_THROWS_AS(psnr(a, a, 3), ConfigError);   // no interior left
  CHECK_THROWS_AS(psnr(a, a, -1), ConfigError);
  CHECK_THROWS_AS(psnr(a, a, 0, 0.0), ConfigError);
  CHECK_THROWS_AS(mae(a, Field(5, 6, 1)), ShapeError);
}
