#pragma once

#include <string>

#include "semisparse/field.hpp"

namespace semisparse {

/// Supported on-disk formats:
///  Png         .png   8/16-bit gray, gray+alpha, RGB, RGBA; loads to [0,1]
///  RadianceHdr .hdr   shared-exponent RGBE radiance, RLE or flat scanlines
///  RawF64      .ssf   "SSF1" magic, u32le h/w/c, planar f64le samples
///  CsvSignal   .csv   one row per sample, one column per channel, 1D only
enum class ImageFormat { Auto, Png, RadianceHdr, RawF64, CsvSignal };

/// Format implied by a file extension; throws IoError for unknown ones.
ImageFormat format_from_path(const std::string& path);

struct LoadOptions {
  ImageFormat format = ImageFormat::Auto;
  bool srgb_to_linear = false;  // PNG color channels only; alpha stays linear
};

struct SaveOptions {
  ImageFormat format = ImageFormat::Auto;
  bool png16 = false;           // write 16-bit PNG samples
  bool clamp = false;           // clamp to [0,1] before integer quantization
  bool linear_to_srgb = false;  // PNG color channels only
};

/// Loads a file into a double-precision field. Integer formats are scaled
/// to [0,1]; RadianceHdr decodes to absolute values (m + 0.5) * 2^(e - 136)
/// per channel. Throws IoError on missing, truncated, or malformed files.
Field load_image(const std::string& path, const LoadOptions& options = {});

/// Saves a field. PNG requires values in [0,1] unless options.clamp is set;
/// RadianceHdr requires 3 nonnegative channels. Identical fields and options
/// produce byte-identical files.
void save_image(const Field& field, const std::string& path, const SaveOptions& options = {});

double srgb_to_linear_value(double v);
double linear_to_srgb_value(double v);

}  // namespace semisparse
