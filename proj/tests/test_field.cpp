#include <doctest.h>

#include <semisparse/field.hpp>

#include <cmath>
#include <limits>

using namespace semisparse;

TEST_CASE("field shape validation") {
  CHECK_THROWS_AS(Field(0, 3, 1), ShapeError);
  CHECK_THROWS_AS(Field(3, 0, 1), ShapeError);
  CHECK_THROWS_AS(Field(3, 3, 0), ShapeError);
  CHECK_THROWS_AS(Field(-1, 3, 1), ShapeError);

  Field f(4, 5, 3);
  CHECK(f.height() == 4);
  CHECK(f.width() == 5);
  CHECK(f.channels() == 3);
  CHECK(f.samples() == 60);
  CHECK_FALSE(f.is_1d());
  CHECK(Field(7, 1, 1).is_1d());
}

TEST_CASE("field constant factory and fill") {
  Field f = Field::constant(3, 2, 2, 0.75);
  CHECK(f.min_value() == 0.75);
  CHECK(f.max_value() == 0.75);
  f.fill(-1.5);
  CHECK(f.at(2, 1, 1) == -1.5);
  CHECK(f.squared_norm() == doctest::Approx(2.25 * 12).epsilon(1e-15));
}

TEST_CASE("field planar sample access") {
  Field f(2, 3, 2);
  f.at(0, 2, 0) = 1.0;
  f.at(1, 0, 1) = 2.0;
  CHECK(f.plane(0)(0, 2) == 1.0);
  CHECK(f.plane(1)(1, 0) == 2.0);
  CHECK(f.plane(0)(1, 0) == 0.0);
  // zero-filled on construction
  CHECK(f.squared_norm() == doctest::Approx(5.0));
}

TEST_CASE("field arithmetic") {
  Field a = Field::constant(2, 2, 1, 3.0);
  Field b = Field::constant(2, 2, 1, 1.0);
  b.at(1, 1, 0) = -2.0;

  Field sum = a + b;
  CHECK(sum.at(0, 0, 0) == 4.0);
  CHECK(sum.at(1, 1, 0) == 1.0);

  Field diff = a - b;
  CHECK(diff.at(0, 0, 0) == 2.0);
  CHECK(diff.at(1, 1, 0) == 5.0);

  Field scaled = 0.5 * a;
  CHECK(scaled.at(0, 1, 0) == 1.5);

  CHECK_THROWS_AS(a + Field(2, 3, 1), ShapeError);
  CHECK_THROWS_AS(a - Field(2, 2, 2), ShapeError);
}

TEST_CASE("clamped limits every sample") {
  Field f(1, 4, 1);
  f.at(0, 0, 0) = -0.2;
  f.at(0, 1, 0) = 0.4;
  f.at(0, 2, 0) = 1.7;
  f.at(0, 3, 0) = 1.0;
  Field c = clamped(f, 0.0, 1.0);
  CHECK(c.at(0, 0, 0) == 0.0);
  CHECK(c.at(0, 1, 0) == 0.4);
  CHECK(c.at(0, 2, 0) == 1.0);
  CHECK(c.at(0, 3, 0) == 1.0);
}

TEST_CASE("subregion extracts and bounds-checks") {
  Field f(4, 5, 2);
  for (int c = 0; c < 2; ++c)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 5; ++x) f.at(y, x, c) = 100 * c + 10 * y + x;

  Field r = subregion(f, 1, 2, 2, 3);
  CHECK(r.height() == 2);
  CHECK(r.width() == 3);
  CHECK(r.channels() == 2);
  CHECK(r.at(0, 0, 0) == 12.0);
  CHECK(r.at(1, 2, 1) == 124.0);

  CHECK_THROWS_AS(subregion(f, 3, 0, 2, 2), ShapeError);
  CHECK_THROWS_AS(subregion(f, 0, 4, 1, 2), ShapeError);
  CHECK_THROWS_AS(subregion(f, 0, 0, 0, 1), ShapeError);
}

TEST_CASE("finiteness checks") {
  Field f = Field::constant(2, 2, 1, 1.0);
  CHECK(f.all_finite());
  CHECK_NOTHROW(f.assert_finite("test"));

  f.at(0, 1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(f.all_finite());
  CHECK_THROWS_AS(f.assert_finite("test"), NumericError);

  f.at(0, 1, 0) = std::numeric_limits<double>::infinity();
  CHECK_FALSE(f.all_finite());
}

TEST_CASE("stacked field shape and norm") {
  Field base(3, 4, 2);
  StackedField s;
  s.layers.push_back(Field::constant(3, 4, 2, 1.0));
  s.layers.push_back(Field::constant(3, 4, 2, -2.0));
  CHECK(s.layer_count() == 2);
  CHECK(s.shaped_like(base));
  CHECK(s.squared_norm() == doctest::Approx(24.0 * 1.0 + 24.0 * 4.0));

  s.layers.push_back(Field(3, 3, 2));
  CHECK_FALSE(s.shaped_like(base));

  StackedField empty;
  CHECK(empty.layer_count() == 0);
  CHECK(empty.squared_norm() == 0.0);
}
