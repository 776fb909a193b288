#pragma once

#include <string>
#include <vector>

#include "semisparse/field.hpp"

namespace semisparse {

/// One finite-difference component: a small stencil over (row, col) offsets.
/// Taps already include the sqrt of the component weight, so stacking layers
/// built from these taps reproduces weighted quadratic forms exactly.
struct Stencil {
  struct Tap {
    int dy;
    int dx;
    double coeff;
  };
  std::string name;  // "x", "yy", "xy", "lap", ...
  std::vector<Tap> taps;
};

/// Discrete difference operator of a given order on a 1D or 2D grid.
/// Components are per-axis difference factors (x = columns, y = rows):
///   order 1: {x, y}            order 2: {xx, yy}        order 3: {xxx, yyy}
/// with optional mixed components carrying multinomial weights
/// (xy twice, xxy / xyy three times each), and an optional 5-point scalar
/// Laplacian replacing the order-2 set. 1D grids use the y axis only.
/// Boundary handling is periodic wrap; callers wanting mirror boundaries
/// pad first (see mirror_pad).
struct OperatorSpec {
  int order = 2;           // 1..3
  int rank = 2;            // 1 for signals, 2 for images
  bool cross_terms = false;
  bool scalar_laplacian = false;  // order 2 only
  int pad = 16;            // mirror-margin suggestion for non-periodic use

  /// Component stencils in a fixed, documented order (x-major, mixed last).
  std::vector<Stencil> components() const;

  /// Validates ranges and flag compatibility; throws ConfigError.
  void validate() const;

  static OperatorSpec make(int order, int rank, bool cross_terms = false,
                           bool scalar_laplacian = false);
};

/// Forward differences: one layer per component, periodic wrap.
/// Example: field [0,1,2,3] (4x1), order 1 -> layer [1,1,1,-3].
StackedField apply_diff(const Field& field, const OperatorSpec& spec);

/// Exact adjoint of apply_diff under the wrap convention:
/// <apply_diff(u), v> == <u, apply_adjoint(v)> for all u, v.
Field apply_adjoint(const StackedField& stack, const OperatorSpec& spec);

/// Squared frequency response |A(k)|^2 summed over components, on the full
/// h x w DFT grid. For a 1D order-1 operator of length N the value at
/// index k is 4 sin^2(pi k / N). Always 0 at the zero frequency.
Plane transfer_magnitude(const OperatorSpec& spec, int height, int width);

/// Mirror padding without repeating the edge sample:
/// [1,2,3] with pad 2 -> [3,2,1,2,3,2,1]. Requires pad < extent per padded
/// axis; 1D fields pad rows only. pad == 0 returns the input.
Field mirror_pad(const Field& field, int pad);

/// Per-side mirror padding (rows before/after, cols before/after).
Field mirror_pad(const Field& field, int top, int bottom, int left, int right);

/// Inverse of mirror_pad for matching pad sizes.
Field crop(const Field& field, int pad);
Field crop(const Field& field, int top, int bottom, int left, int right);

}  // namespace semisparse
