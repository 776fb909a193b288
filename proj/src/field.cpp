#include "semisparse/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace semisparse {

Field::Field(int height, int width, int channels) : height_(height), width_(width) {
  if (height < 1 || width < 1 || channels < 1)
    throw ShapeError("field shape must be positive, got " + std::to_string(height) + "x" +
                     std::to_string(width) + "x" + std::to_string(channels));
  planes_.resize(static_cast<size_t>(channels));
  for (auto& p : planes_) p = Plane::Zero(height, width);
}

Field Field::constant(int height, int width, int channels, double value) {
  Field f(height, width, channels);
  f.fill(value);
  return f;
}

bool Field::all_finite() const {
  for (const auto& p : planes_)
    if (!p.isFinite().all()) return false;
  return true;
}

void Field::assert_finite(const std::string& what) const {
  if (!all_finite()) throw NumericError(what + ": non-finite samples");
}

double Field::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : planes_) m = std::min(m, p.minCoeff());
  return m;
}

double Field::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& p : planes_) m = std::max(m, p.maxCoeff());
  return m;
}

double Field::squared_norm() const {
  double s = 0;
  for (const auto& p : planes_) s += p.square().sum();
  return s;
}

void Field::fill(double value) {
  for (auto& p : planes_) p.setConstant(value);
}

namespace {

void require_same_shape(const Field& a, const Field& b, const char* op) {
  if (!a.same_shape(b)) throw ShapeError(std::string(op) + ": shape mismatch");
}

}  // namespace

Field operator+(const Field& a, const Field& b) {
  require_same_shape(a, b, "field add");
  Field out = a;
  for (int c = 0; c < a.channels(); ++c) out.plane(c) += b.plane(c);
  return out;
}

Field operator-(const Field& a, const Field& b) {
  require_same_shape(a, b, "field subtract");
  Field out = a;
  for (int c = 0; c < a.channels(); ++c) out.plane(c) -= b.plane(c);
  return out;
}

Field operator*(double s, const Field& a) {
  Field out = a;
  for (int c = 0; c < a.channels(); ++c) out.plane(c) *= s;
  return out;
}

Field clamped(const Field& f, double lo, double hi) {
  Field out = f;
  for (int c = 0; c < f.channels(); ++c)
    out.plane(c) = out.plane(c).max(lo).min(hi);
  return out;
}

Field subregion(const Field& f, int y0, int x0, int height, int width) {
  if (y0 < 0 || x0 < 0 || height < 1 || width < 1 || y0 + height > f.height() ||
      x0 + width > f.width())
    throw ShapeError("subregion out of bounds");
  Field out(height, width, f.channels());
  for (int c = 0; c < f.channels(); ++c)
    out.plane(c) = f.plane(c).block(y0, x0, height, width);
  return out;
}

bool StackedField::shaped_like(const Field& base) const {
  if (layers.empty()) return false;
  for (const auto& l : layers)
    if (!l.same_shape(base)) return false;
  return true;
}

double StackedField::squared_norm() const {
  double s = 0;
  for (const auto& l : layers) s += l.squared_norm();
  return s;
}

}  // namespace semisparse
