#pragma once

#include <complex>

#include <Eigen/Dense>

#include "semisparse/field.hpp"

namespace semisparse {

using CPlane =
    Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Real-to-complex FFT plans plus aligned scratch buffers for one grid shape.
/// Transforms use the half-spectrum layout: h x (w/2 + 1) for 2D grids,
/// (h/2 + 1) x 1 for single-column signals. Plans are created with the
/// estimate-only planner so results are bit-reproducible run to run.
/// Not thread-safe per instance; plan creation/destruction is globally locked.
class SpectralWorkspace {
 public:
  SpectralWorkspace(int height, int width);
  ~SpectralWorkspace();

  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  int height() const { return height_; }
  int width() const { return width_; }
  int spectrum_rows() const { return spec_rows_; }
  int spectrum_cols() const { return spec_cols_; }

  CPlane forward(const Plane& in) const;

  /// Inverse transform, normalized so inverse(forward(p)) == p up to
  /// floating-point roundoff.
  Plane inverse(const CPlane& in) const;

  /// Samples a full h x w spectrum (e.g. transfer_magnitude output) at the
  /// frequencies retained by the half-spectrum layout.
  Plane sample_half_spectrum(const Plane& full) const;

 private:
  int height_;
  int width_;
  int spec_rows_;
  int spec_cols_;
  double* real_buf_ = nullptr;
  void* cplx_buf_ = nullptr;  // fftw_complex*
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
};

}  // namespace semisparse
