#include "semisparse/operators.hpp"

#include <cmath>
#include <complex>

#include "parallel.hpp"

namespace semisparse {

namespace {

// Signed binomial taps of an m-fold forward difference, anchored so the
// stencil stays centered: offsets run from -floor(m/2) to m - floor(m/2).
// m = 1: [-1 +1], m = 2: [+1 -2 +1], m = 3: [-1 +3 -3 +1].
std::vector<std::pair<int, double>> axis_taps(int m) {
  std::vector<std::pair<int, double>> taps;
  if (m == 0) {
    taps.emplace_back(0, 1.0);
    return taps;
  }
  double binom = 1.0;
  const int anchor = m / 2;
  for (int j = 0; j <= m; ++j) {
    const double sign = ((m - j) % 2 == 0) ? 1.0 : -1.0;
    taps.emplace_back(j - anchor, sign * binom);
    binom = binom * (m - j) / (j + 1);
  }
  return taps;
}

Stencil tensor_stencil(const std::string& name, int order_y, int order_x, double weight) {
  Stencil s;
  s.name = name;
  const double scale = std::sqrt(weight);
  for (const auto& [dy, cy] : axis_taps(order_y))
    for (const auto& [dx, cx] : axis_taps(order_x))
      s.taps.push_back({dy, dx, scale * cy * cx});
  return s;
}

Stencil laplacian_stencil() {
  Stencil s;
  s.name = "lap";
  s.taps = {{-1, 0, 1.0}, {1, 0, 1.0}, {0, -1, 1.0}, {0, 1, 1.0}, {0, 0, -4.0}};
  return s;
}

// dst(y, x) += c * src((y + dy) mod h, (x + dx) mod w)
void add_shifted(Plane& dst, const Plane& src, int dy, int dx, double c) {
  const int h = static_cast<int>(src.rows());
  const int w = static_cast<int>(src.cols());
  dy = ((dy % h) + h) % h;
  dx = ((dx % w) + w) % w;
  const int h1 = h - dy;
  const int w1 = w - dx;
  dst.block(0, 0, h1, w1) += c * src.block(dy, dx, h1, w1);
  if (dx > 0) dst.block(0, w1, h1, dx) += c * src.block(dy, 0, h1, dx);
  if (dy > 0) dst.block(h1, 0, dy, w1) += c * src.block(0, dx, dy, w1);
  if (dy > 0 && dx > 0) dst.block(h1, w1, dy, dx) += c * src.block(0, 0, dy, dx);
}

int reflect_index(int i, int extent) {
  if (extent == 1) return 0;
  const int period = 2 * extent - 2;
  i = ((i % period) + period) % period;
  return (i < extent) ? i : period - i;
}

void require_rank_match(const Field& field, const OperatorSpec& spec, const char* op) {
  const int field_rank = field.is_1d() ? 1 : 2;
  if (field_rank != spec.rank)
    throw ShapeError(std::string(op) + ": operator rank " + std::to_string(spec.rank) +
                     " does not match field rank " + std::to_string(field_rank));
}

}  // namespace

void OperatorSpec::validate() const {
  if (order < 1 || order > 3)
    throw ConfigError("operator order must be 1..3, got " + std::to_string(order));
  if (rank != 1 && rank != 2)
    throw ConfigError("operator rank must be 1 or 2");
  if (scalar_laplacian && order != 2)
    throw ConfigError("scalar_laplacian requires order 2");
  if (scalar_laplacian && cross_terms)
    throw ConfigError("scalar_laplacian excludes cross_terms");
  if (pad < 0) throw ConfigError("pad must be >= 0");
}

OperatorSpec OperatorSpec::make(int order, int rank, bool cross_terms, bool scalar_laplacian) {
  OperatorSpec spec;
  spec.order = order;
  spec.rank = rank;
  spec.cross_terms = cross_terms;
  spec.scalar_laplacian = scalar_laplacian;
  spec.pad = (rank == 1) ? 8 : 16;
  spec.validate();
  return spec;
}

std::vector<Stencil> OperatorSpec::components() const {
  validate();
  std::vector<Stencil> comps;
  if (rank == 1) {
    comps.push_back(tensor_stencil(std::string(static_cast<size_t>(order), 'y'), order, 0, 1.0));
    return comps;
  }
  switch (order) {
    case 1:
      comps.push_back(tensor_stencil("x", 0, 1, 1.0));
      comps.push_back(tensor_stencil("y", 1, 0, 1.0));
      break;
    case 2:
      if (scalar_laplacian) {
        comps.push_back(laplacian_stencil());
      } else {
        comps.push_back(tensor_stencil("xx", 0, 2, 1.0));
        comps.push_back(tensor_stencil("yy", 2, 0, 1.0));
        if (cross_terms) comps.push_back(tensor_stencil("xy", 1, 1, 2.0));
      }
      break;
    case 3:
      comps.push_back(tensor_stencil("xxx", 0, 3, 1.0));
      comps.push_back(tensor_stencil("yyy", 3, 0, 1.0));
      if (cross_terms) {
        comps.push_back(tensor_stencil("xxy", 1, 2, 3.0));
        comps.push_back(tensor_stencil("xyy", 2, 1, 3.0));
      }
      break;
  }
  return comps;
}

StackedField apply_diff(const Field& field, const OperatorSpec& spec) {
  require_rank_match(field, spec, "apply_diff");
  const auto comps = spec.components();
  StackedField out;
  out.layers.reserve(comps.size());
  for (size_t i = 0; i < comps.size(); ++i)
    out.layers.emplace_back(field.height(), field.width(), field.channels());
  const long work = static_cast<long>(field.height()) * field.width() *
                    static_cast<long>(comps.size());
  detail::parallel_items(field.channels(), work, [&](int c) {
    for (size_t i = 0; i < comps.size(); ++i)
      for (const auto& tap : comps[i].taps)
        add_shifted(out.layers[i].plane(c), field.plane(c), tap.dy, tap.dx, tap.coeff);
  });
  return out;
}

Field apply_adjoint(const StackedField& stack, const OperatorSpec& spec) {
  const auto comps = spec.components();
  if (stack.layer_count() != static_cast<int>(comps.size()))
    throw ShapeError("apply_adjoint: stack has " + std::to_string(stack.layer_count()) +
                     " layers, operator has " + std::to_string(comps.size()) + " components");
  const Field& first = stack.layer(0);
  if (!stack.shaped_like(first)) throw ShapeError("apply_adjoint: ragged stack");
  require_rank_match(first, spec, "apply_adjoint");

  Field out(first.height(), first.width(), first.channels());
  const long work = static_cast<long>(first.height()) * first.width() *
                    static_cast<long>(comps.size());
  detail::parallel_items(first.channels(), work, [&](int c) {
    for (size_t i = 0; i < comps.size(); ++i)
      for (const auto& tap : comps[i].taps)
        add_shifted(out.plane(c), stack.layer(static_cast<int>(i)).plane(c), -tap.dy, -tap.dx,
                    tap.coeff);
  });
  return out;
}

Plane transfer_magnitude(const OperatorSpec& spec, int height, int width) {
  if (height < 1 || width < 1) throw ShapeError("transfer_magnitude: empty grid");
  if (spec.rank == 1 && width != 1)
    throw ShapeError("transfer_magnitude: rank-1 operator on a 2D grid");
  const auto comps = spec.components();
  Plane t = Plane::Zero(height, width);
  const double two_pi = 6.283185307179586476925286766559;
  for (const auto& comp : comps) {
    for (int ky = 0; ky < height; ++ky) {
      for (int kx = 0; kx < width; ++kx) {
        std::complex<double> a(0, 0);
        for (const auto& tap : comp.taps) {
          const double phase = -two_pi * (static_cast<double>(ky) * tap.dy / height +
                                          static_cast<double>(kx) * tap.dx / width);
          a += tap.coeff * std::polar(1.0, phase);
        }
        t(ky, kx) += std::norm(a);
      }
    }
  }
  return t;
}

Field mirror_pad(const Field& field, int pad) {
  if (pad == 0) return field;
  if (field.is_1d()) return mirror_pad(field, pad, pad, 0, 0);
  return mirror_pad(field, pad, pad, pad, pad);
}

Field mirror_pad(const Field& field, int top, int bottom, int left, int right) {
  if (top < 0 || bottom < 0 || left < 0 || right < 0)
    throw ConfigError("mirror_pad: negative margin");
  if (top >= field.height() || bottom >= field.height())
    throw ConfigError("mirror_pad: row margin must be < height");
  if ((left > 0 || right > 0) && field.is_1d())
    throw ConfigError("mirror_pad: 1D fields pad rows only");
  if (left >= field.width() || right >= field.width())
    throw ConfigError("mirror_pad: column margin must be < width");

  const int h = field.height(), w = field.width();
  Field out(h + top + bottom, w + left + right, field.channels());
  std::vector<int> row_map(static_cast<size_t>(h + top + bottom));
  std::vector<int> col_map(static_cast<size_t>(w + left + right));
  for (int y = 0; y < h + top + bottom; ++y) row_map[static_cast<size_t>(y)] = reflect_index(y - top, h);
  for (int x = 0; x < w + left + right; ++x) col_map[static_cast<size_t>(x)] = reflect_index(x - left, w);
  for (int c = 0; c < field.channels(); ++c) {
    const Plane& src = field.plane(c);
    Plane& dst = out.plane(c);
    for (int y = 0; y < static_cast<int>(dst.rows()); ++y)
      for (int x = 0; x < static_cast<int>(dst.cols()); ++x)
        dst(y, x) = src(row_map[static_cast<size_t>(y)], col_map[static_cast<size_t>(x)]);
  }
  return out;
}

Field crop(const Field& field, int pad) {
  if (pad == 0) return field;
  if (field.is_1d()) return crop(field, pad, pad, 0, 0);
  return crop(field, pad, pad, pad, pad);
}

Field crop(const Field& field, int top, int bottom, int left, int right) {
  if (top < 0 || bottom < 0 || left < 0 || right < 0) throw ConfigError("crop: negative margin");
  const int h = field.height() - top - bottom;
  const int w = field.width() - left - right;
  if (h < 1 || w < 1) throw ShapeError("crop: margins exceed field extent");
  return subregion(field, top, left, h, w);
}

}  // namespace semisparse
