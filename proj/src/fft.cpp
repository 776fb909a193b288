#include "semisparse/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace semisparse {

namespace {

// FFTW's planner mutates global state; serialize plan create/destroy.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SpectralWorkspace::SpectralWorkspace(int height, int width) : height_(height), width_(width) {
  if (height < 1 || width < 1) throw ShapeError("SpectralWorkspace: empty grid");
  const bool column = (width == 1);
  spec_rows_ = column ? height / 2 + 1 : height;
  spec_cols_ = column ? 1 : width / 2 + 1;

  const size_t n_real = static_cast<size_t>(height) * static_cast<size_t>(width);
  const size_t n_cplx = static_cast<size_t>(spec_rows_) * static_cast<size_t>(spec_cols_);
  real_buf_ = fftw_alloc_real(n_real);
  fftw_complex* cbuf = fftw_alloc_complex(n_cplx);
  cplx_buf_ = cbuf;
  if (real_buf_ == nullptr || cbuf == nullptr) throw NumericError("fftw allocation failed");

  std::lock_guard<std::mutex> lock(planner_mutex());
  if (column) {
    plan_fwd_ = fftw_plan_dft_r2c_1d(height, real_buf_, cbuf, FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_c2r_1d(height, cbuf, real_buf_, FFTW_ESTIMATE);
  } else {
    plan_fwd_ = fftw_plan_dft_r2c_2d(height, width, real_buf_, cbuf, FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_c2r_2d(height, width, cbuf, real_buf_, FFTW_ESTIMATE);
  }
  if (plan_fwd_ == nullptr || plan_inv_ == nullptr) throw NumericError("fftw planning failed");
}

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_inv_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(real_buf_);
  fftw_free(cplx_buf_);
}

CPlane SpectralWorkspace::forward(const Plane& in) const {
  if (in.rows() != height_ || in.cols() != width_)
    throw ShapeError("SpectralWorkspace::forward: shape mismatch");
  std::memcpy(real_buf_, in.data(), sizeof(double) * static_cast<size_t>(height_) * width_);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  CPlane out(spec_rows_, spec_cols_);
  std::memcpy(out.data(), cplx_buf_,
              sizeof(std::complex<double>) * static_cast<size_t>(spec_rows_) * spec_cols_);
  return out;
}

Plane SpectralWorkspace::inverse(const CPlane& in) const {
  if (in.rows() != spec_rows_ || in.cols() != spec_cols_)
    throw ShapeError("SpectralWorkspace::inverse: spectrum shape mismatch");
  std::memcpy(cplx_buf_, in.data(),
              sizeof(std::complex<double>) * static_cast<size_t>(spec_rows_) * spec_cols_);
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  Plane out(height_, width_);
  const double scale = 1.0 / (static_cast<double>(height_) * static_cast<double>(width_));
  Eigen::Map<const Eigen::ArrayXd> buf(real_buf_, static_cast<long>(height_) * width_);
  Eigen::Map<Eigen::ArrayXd>(out.data(), out.size()) = buf * scale;
  return out;
}

Plane SpectralWorkspace::sample_half_spectrum(const Plane& full) const {
  if (full.rows() != height_ || full.cols() != width_)
    throw ShapeError("sample_half_spectrum: expected full grid spectrum");
  return full.block(0, 0, spec_rows_, spec_cols_);
}

}  // namespace semisparse
