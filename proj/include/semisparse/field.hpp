#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "semisparse/errors.hpp"

namespace semisparse {

/// One channel of samples, row-major so rows are contiguous in memory.
using Plane = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Multi-channel grid of real samples. Images are height x width with 1..4
/// channels; 1D signals use width == 1. Storage is planar, double precision.
class Field {
 public:
  Field() = default;

  /// Zero-filled field of the given shape. Throws ShapeError on empty axes.
  Field(int height, int width, int channels);

  static Field constant(int height, int width, int channels, double value);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return static_cast<int>(planes_.size()); }
  long samples() const { return static_cast<long>(height_) * width_ * channels(); }

  /// 1D signals are stored as a single column.
  bool is_1d() const { return width_ == 1; }

  Plane& plane(int c) { return planes_[static_cast<size_t>(c)]; }
  const Plane& plane(int c) const { return planes_[static_cast<size_t>(c)]; }

  double& at(int y, int x, int c) { return planes_[static_cast<size_t>(c)](y, x); }
  double at(int y, int x, int c) const { return planes_[static_cast<size_t>(c)](y, x); }

  bool same_shape(const Field& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels() == other.channels();
  }

  bool all_finite() const;

  /// Throws NumericError naming `what` if any sample is NaN or infinite.
  void assert_finite(const std::string& what) const;

  double min_value() const;
  double max_value() const;

  /// Sum of squared samples over all channels.
  double squared_norm() const;

  void fill(double value);

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<Plane> planes_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);

/// Elementwise clamp into [lo, hi].
Field clamped(const Field& f, double lo, double hi);

/// Rectangular region extraction; the rectangle must lie inside the field.
Field subregion(const Field& f, int y0, int x0, int height, int width);

/// A bundle of fields sharing one base shape, one layer per operator
/// component (e.g. d/dx and d/dy layers for a first-order operator).
struct StackedField {
  std::vector<Field> layers;

  StackedField() = default;
  explicit StackedField(std::vector<Field> l) : layers(std::move(l)) {}

  int layer_count() const { return static_cast<int>(layers.size()); }
  Field& layer(int i) { return layers[static_cast<size_t>(i)]; }
  const Field& layer(int i) const { return layers[static_cast<size_t>(i)]; }

  /// All layers present and shaped like `base`.
  bool shaped_like(const Field& base) const;

  double squared_norm() const;
};

}  // namespace semisparse
