#pragma once

#include <cstdint>
#include <vector>

#include "semisparse/field.hpp"
#include "semisparse/solver.hpp"

namespace semisparse {

/// Piecewise signal segment. Segments tile the domain exactly; each one
/// carries its own base level so discontinuities are explicit.
struct Segment {
  enum class Kind { Constant, Ramp, Spike };
  Kind kind = Kind::Constant;
  int length = 0;
  double level = 0;      // base value of the segment
  double slope = 0;      // per-sample increment (Ramp)
  double amplitude = 0;  // added at the segment midpoint (Spike)

  static Segment constant(int length, double level);
  static Segment ramp(int length, double start, double slope);
  static Segment spike(int length, double base, double amplitude);
};

struct SignalSpec {
  int length = 0;
  std::vector<Segment> segments;
  double sigma = 0;
  uint64_t seed = 0;
};

struct SignalPair {
  Field clean;  // length x 1, one channel
  Field noisy;
};

/// Deterministic piecewise-constant / ramp / spike signal with optional
/// Gaussian noise. Segment lengths must sum to the spec length.
SignalPair gen_signal(const SignalSpec& spec);

struct Rect {
  int y0 = 0, x0 = 0, height = 0, width = 0;
};

struct RampStepsSpec {
  int height = 256;
  int width = 256;
  double sigma = 0.0431;  // -20 log10(sigma) = 27.3 dB against the clean image
  uint64_t seed = 1;
};

struct RampStepsImage {
  Field clean;  // grayscale, values in [0.1, 0.9]
  Field noisy;  // unclamped; may exceed [0, 1] slightly
  std::vector<Rect> constant_regions;
  Rect ramp_region;
};

/// Piecewise-constant left half (two flat blocks) and a planar ramp right
/// half: flat regions exercise first-order sparsity, the ramp has zero
/// second-order differences but a nonzero gradient.
RampStepsImage gen_ramp_steps_image(const RampStepsSpec& spec);

/// clean + sigma * N(0,1), drawn channel-major then row-major from the
/// counter generator, so a (seed, shape) pair always yields the same noise.
Field add_gaussian_noise(const Field& clean, double sigma, uint64_t seed);

/// Uniform [0,1) samples, same deterministic layout.
Field uniform_field(int height, int width, int channels, uint64_t seed);

/// Reference solve of the screened linear system
///   (I + alpha * sum_k Dk^T Dk + beta * L^T L) u = (I + alpha * sum_k Dk^T Dk) f + beta * L^T w
/// by explicit matrix assembly (periodic wrap) and a dense LDLT
/// factorization. Shares no solver code with the spectral path; intended as
/// a test oracle for grids up to 4096 samples.
Field dense_oracle_solve(const Field& f, const StackedField& w, double alpha, double beta,
                         const SolverConfig& config);

struct SupportEnumResult {
  Field u;
  StackedField w;      // order-n differences of u restricted to the support
  double energy_value; // global optimum of the auxiliary objective
  uint32_t support;    // bitmask of sites where w is free
};

/// Exhaustive global minimizer of
///   |u-f|^2 + alpha * sum_k |D_k(u-f)|^2 + lambda * nnz(w) + beta * |D_n u - w|^2
/// over all 2^N supports of w, for single-channel 1D signals of length
/// N <= 12. Each support's quadratic is solved densely; the best support
/// (ties: lowest bitmask) is returned.
SupportEnumResult support_enum_oracle(const Field& f, double lambda, double alpha, double beta,
                                      int order);

}  // namespace semisparse
