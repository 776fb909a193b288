#include "semisparse/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace semisparse {

namespace {

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext;
}

void put_u32le(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

uint32_t get_u32le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("read failure on " + path);
  return buf.str();
}

void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.good()) throw IoError("write failure on " + path);
}

// ---- PNG ----------------------------------------------------------------

struct PngReadCleanup {
  FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadCleanup() {
    if (png != nullptr) png_destroy_read_struct(&png, info != nullptr ? &info : nullptr, nullptr);
    if (fp != nullptr) std::fclose(fp);
  }
};

struct PngWriteCleanup {
  FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteCleanup() {
    if (png != nullptr) png_destroy_write_struct(&png, info != nullptr ? &info : nullptr);
    if (fp != nullptr) std::fclose(fp);
  }
};

Field load_png(const std::string& path, const LoadOptions& options) {
  PngReadCleanup ctx;
  ctx.fp = std::fopen(path.c_str(), "rb");
  if (ctx.fp == nullptr) throw IoError("cannot open " + path);

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, ctx.fp) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw IoError(path + ": not a PNG file");

  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (ctx.png == nullptr) throw IoError("libpng init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (ctx.info == nullptr) throw IoError("libpng init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw IoError(path + ": corrupt PNG data");

  png_init_io(ctx.png, ctx.fp);
  png_set_sig_bytes(ctx.png, 8);
  png_read_info(ctx.png, ctx.info);

  png_set_palette_to_rgb(ctx.png);
  png_set_expand_gray_1_2_4_to_8(ctx.png);
  if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(ctx.png);
  if (png_get_bit_depth(ctx.png, ctx.info) == 16) png_set_swap(ctx.png);  // to host LE
  png_read_update_info(ctx.png, ctx.info);

  const int h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
  const int w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  const int channels = png_get_channels(ctx.png, ctx.info);
  const int depth = png_get_bit_depth(ctx.png, ctx.info);
  if (h < 1 || w < 1 || channels < 1 || channels > 4 || (depth != 8 && depth != 16))
    throw IoError(path + ": unsupported PNG layout");

  const size_t rowbytes = png_get_rowbytes(ctx.png, ctx.info);
  std::vector<unsigned char> data(static_cast<size_t>(h) * rowbytes);
  std::vector<png_bytep> rows(static_cast<size_t>(h));
  for (int y = 0; y < h; ++y) rows[static_cast<size_t>(y)] = data.data() + static_cast<size_t>(y) * rowbytes;
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);

  Field out(h, w, channels);
  const double scale = (depth == 8) ? 1.0 / 255.0 : 1.0 / 65535.0;
  for (int y = 0; y < h; ++y) {
    const unsigned char* row = rows[static_cast<size_t>(y)];
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) {
        double v;
        if (depth == 8) {
          v = row[x * channels + c] * scale;
        } else {
          uint16_t s;
          std::memcpy(&s, row + 2 * (x * channels + c), 2);
          v = s * scale;
        }
        out.at(y, x, c) = v;
      }
  }

  if (options.srgb_to_linear) {
    const int color_channels = (channels == 2) ? 1 : std::min(channels, 3);
    for (int c = 0; c < color_channels; ++c) {
      Plane& p = out.plane(c);
      for (long i = 0; i < p.size(); ++i) p(i) = srgb_to_linear_value(p(i));
    }
  }
  return out;
}

void save_png(const Field& field, const std::string& path, const SaveOptions& options) {
  if (field.channels() > 4) throw IoError("PNG supports at most 4 channels");
  field.assert_finite("save png");
  Field img = field;
  if (options.linear_to_srgb) {
    const int color_channels = (img.channels() == 2) ? 1 : std::min(img.channels(), 3);
    for (int c = 0; c < color_channels; ++c) {
      Plane& p = img.plane(c);
      for (long i = 0; i < p.size(); ++i) p(i) = linear_to_srgb_value(p(i));
    }
  }
  if (options.clamp) {
    img = clamped(img, 0.0, 1.0);
  } else if (img.min_value() < -1e-9 || img.max_value() > 1.0 + 1e-9) {
    throw IoError("PNG save: samples outside [0,1]; enable clamping or rescale");
  }

  PngWriteCleanup ctx;
  ctx.fp = std::fopen(path.c_str(), "wb");
  if (ctx.fp == nullptr) throw IoError("cannot create " + path);
  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (ctx.png == nullptr) throw IoError("libpng init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (ctx.info == nullptr) throw IoError("libpng init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw IoError(path + ": PNG write failed");

  const int color_type = (field.channels() == 1)   ? PNG_COLOR_TYPE_GRAY
                         : (field.channels() == 2) ? PNG_COLOR_TYPE_GRAY_ALPHA
                         : (field.channels() == 3) ? PNG_COLOR_TYPE_RGB
                                                   : PNG_COLOR_TYPE_RGBA;
  const int depth = options.png16 ? 16 : 8;
  png_init_io(ctx.png, ctx.fp);
  png_set_IHDR(ctx.png, ctx.info, static_cast<png_uint_32>(field.width()),
               static_cast<png_uint_32>(field.height()), depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);

  const int h = field.height(), w = field.width(), nc = field.channels();
  const double maxv = options.png16 ? 65535.0 : 255.0;
  std::vector<unsigned char> row(static_cast<size_t>(w) * nc * (options.png16 ? 2 : 1));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < nc; ++c) {
        const double v = std::min(std::max(img.at(y, x, c), 0.0), 1.0);
        const auto q = static_cast<uint32_t>(std::lround(v * maxv));
        if (options.png16) {
          row[2 * static_cast<size_t>(x * nc + c)] = static_cast<unsigned char>(q >> 8);
          row[2 * static_cast<size_t>(x * nc + c) + 1] = static_cast<unsigned char>(q & 0xFF);
        } else {
          row[static_cast<size_t>(x * nc + c)] = static_cast<unsigned char>(q);
        }
      }
    png_write_row(ctx.png, row.data());
  }
  png_write_end(ctx.png, nullptr);
}

// ---- Radiance RGBE -------------------------------------------------------

void decode_rgbe(const unsigned char px[4], double* rgb) {
  if (px[3] == 0) {
    rgb[0] = rgb[1] = rgb[2] = 0.0;
    return;
  }
  const double scale = std::ldexp(1.0, static_cast<int>(px[3]) - 136);
  for (int c = 0; c < 3; ++c) rgb[c] = (static_cast<double>(px[c]) + 0.5) * scale;
}

void encode_rgbe(const double* rgb, unsigned char px[4]) {
  const double v = std::max({rgb[0], rgb[1], rgb[2]});
  if (v < 1e-38) {
    px[0] = px[1] = px[2] = px[3] = 0;
    return;
  }
  int e = 0;
  const double scale = std::frexp(v, &e) * 256.0 / v;
  if (e + 128 > 255) throw IoError("radiance value too large for RGBE");
  for (int c = 0; c < 3; ++c) px[c] = static_cast<unsigned char>(rgb[c] * scale);
  px[3] = static_cast<unsigned char>(e + 128);
}

Field load_hdr(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  size_t pos = 0;
  auto read_line = [&]() -> std::string {
    const size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) throw IoError(path + ": truncated header");
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };

  std::string line = read_line();
  if (line.rfind("#?", 0) != 0) throw IoError(path + ": missing radiance signature");
  bool format_ok = false;
  while (true) {
    line = read_line();
    if (line.empty()) break;
    if (line[0] == '#') continue;
    if (line.rfind("FORMAT=", 0) == 0) {
      if (line != "FORMAT=32-bit_rle_rgbe") throw IoError(path + ": unsupported FORMAT");
      format_ok = true;
    }
    // EXPOSURE and other variables are accepted and ignored.
  }
  if (!format_ok) throw IoError(path + ": missing FORMAT line");

  int h = 0, w = 0;
  line = read_line();
  if (std::sscanf(line.c_str(), "-Y %d +X %d", &h, &w) != 2 || h < 1 || w < 1)
    throw IoError(path + ": unsupported resolution line '" + line + "'");

  Field out(h, w, 3);
  std::vector<unsigned char> scanline(static_cast<size_t>(w) * 4);
  auto need = [&](size_t n) {
    if (pos + n > bytes.size()) throw IoError(path + ": truncated pixel data");
  };

  for (int y = 0; y < h; ++y) {
    bool rle = false;
    if (w >= 8 && w <= 0x7FFF) {
      need(4);
      const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + pos;
      if (p[0] == 2 && p[1] == 2 && (p[2] & 0x80) == 0) {
        if ((p[2] << 8 | p[3]) != w) throw IoError(path + ": scanline width mismatch");
        pos += 4;
        rle = true;
      }
    }
    if (rle) {
      for (int c = 0; c < 4; ++c) {
        int x = 0;
        while (x < w) {
          need(1);
          const unsigned char count = static_cast<unsigned char>(bytes[pos++]);
          if (count > 128) {
            const int run = count - 128;
            if (x + run > w) throw IoError(path + ": RLE run overflow");
            need(1);
            const unsigned char value = static_cast<unsigned char>(bytes[pos++]);
            for (int i = 0; i < run; ++i) scanline[static_cast<size_t>(x++) * 4 + static_cast<size_t>(c)] = value;
          } else {
            if (count == 0 || x + count > w) throw IoError(path + ": bad RLE count");
            need(count);
            for (int i = 0; i < count; ++i)
              scanline[static_cast<size_t>(x++) * 4 + static_cast<size_t>(c)] =
                  static_cast<unsigned char>(bytes[pos++]);
          }
        }
      }
    } else {
      need(static_cast<size_t>(w) * 4);
      std::memcpy(scanline.data(), bytes.data() + pos, static_cast<size_t>(w) * 4);
      pos += static_cast<size_t>(w) * 4;
    }
    for (int x = 0; x < w; ++x) {
      double rgb[3];
      decode_rgbe(&scanline[static_cast<size_t>(x) * 4], rgb);
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = rgb[c];
    }
  }
  return out;
}

void save_hdr(const Field& field, const std::string& path) {
  if (field.channels() != 3) throw IoError("RadianceHdr save requires exactly 3 channels");
  field.assert_finite("save hdr");
  if (field.min_value() < 0) throw IoError("RadianceHdr save requires nonnegative radiance");

  std::string bytes = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " + std::to_string(field.height()) +
                      " +X " + std::to_string(field.width()) + "\n";
  // Flat scanlines: simple and always valid, readers fall back automatically.
  unsigned char px[4];
  double rgb[3];
  for (int y = 0; y < field.height(); ++y)
    for (int x = 0; x < field.width(); ++x) {
      for (int c = 0; c < 3; ++c) rgb[c] = field.at(y, x, c);
      encode_rgbe(rgb, px);
      bytes.append(reinterpret_cast<const char*>(px), 4);
    }
  write_file_bytes(path, bytes);
}

// ---- Raw f64 container ---------------------------------------------------

constexpr char kRawMagic[4] = {'S', 'S', 'F', '1'};

Field load_raw(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kRawMagic, 4) != 0)
    throw IoError(path + ": not an SSF1 raw field file");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const uint32_t h = get_u32le(p + 4), w = get_u32le(p + 8), c = get_u32le(p + 12);
  if (h < 1 || w < 1 || c < 1 || c > 1024) throw IoError(path + ": bad SSF1 header");
  const size_t count = static_cast<size_t>(h) * w * c;
  if (bytes.size() != 16 + count * 8) throw IoError(path + ": SSF1 size mismatch");

  Field out(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
  size_t off = 16;
  for (uint32_t ch = 0; ch < c; ++ch) {
    Plane& plane = out.plane(static_cast<int>(ch));
    for (long i = 0; i < plane.size(); ++i, off += 8) {
      uint64_t u = 0;
      for (int b = 7; b >= 0; --b) u = (u << 8) | p[off + static_cast<size_t>(b)];
      plane(i) = std::bit_cast<double>(u);
    }
  }
  return out;
}

void save_raw(const Field& field, const std::string& path) {
  std::string bytes(kRawMagic, 4);
  put_u32le(bytes, static_cast<uint32_t>(field.height()));
  put_u32le(bytes, static_cast<uint32_t>(field.width()));
  put_u32le(bytes, static_cast<uint32_t>(field.channels()));
  for (int c = 0; c < field.channels(); ++c) {
    const Plane& plane = field.plane(c);
    for (long i = 0; i < plane.size(); ++i) {
      const auto u = std::bit_cast<uint64_t>(plane(i));
      for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((u >> (8 * b)) & 0xFF));
    }
  }
  write_file_bytes(path, bytes);
}

// ---- CSV signal ------------------------------------------------------------

Field load_csv(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  std::vector<std::vector<double>> rows;
  size_t pos = 0;
  int columns = -1;
  while (pos < bytes.size()) {
    size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) nl = bytes.size();
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<double> row;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      const std::string cell = line.substr(start, comma - start);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw IoError(path + ": non-numeric CSV cell '" + cell + "'");
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (columns < 0) columns = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != columns)
      throw IoError(path + ": ragged CSV rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": empty CSV signal");

  Field out(static_cast<int>(rows.size()), 1, columns);
  for (size_t y = 0; y < rows.size(); ++y)
    for (int c = 0; c < columns; ++c) out.at(static_cast<int>(y), 0, c) = rows[y][static_cast<size_t>(c)];
  return out;
}

void save_csv(const Field& field, const std::string& path) {
  if (!field.is_1d()) throw IoError("CsvSignal stores 1D signals (width == 1)");
  std::string bytes;
  char buf[64];
  for (int y = 0; y < field.height(); ++y) {
    for (int c = 0; c < field.channels(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", field.at(y, 0, c));
      if (c > 0) bytes += ",";
      bytes += buf;
    }
    bytes += "\n";
  }
  write_file_bytes(path, bytes);
}

}  // namespace

ImageFormat format_from_path(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "png") return ImageFormat::Png;
  if (ext == "hdr") return ImageFormat::RadianceHdr;
  if (ext == "ssf") return ImageFormat::RawF64;
  if (ext == "csv") return ImageFormat::CsvSignal;
  throw IoError("cannot infer image format from '" + path + "' (use .png/.hdr/.ssf/.csv)");
}

double srgb_to_linear_value(double v) {
  if (v <= 0.04045) return v / 12.92;
  return std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb_value(double v) {
  if (v <= 0.0031308) return v * 12.92;
  return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

Field load_image(const std::string& path, const LoadOptions& options) {
  ImageFormat fmt = options.format;
  if (fmt == ImageFormat::Auto) fmt = format_from_path(path);
  Field out;
  switch (fmt) {
    case ImageFormat::Png:
      out = load_png(path, options);
      break;
    case ImageFormat::RadianceHdr:
      out = load_hdr(path);
      break;
    case ImageFormat::RawF64:
      out = load_raw(path);
      break;
    case ImageFormat::CsvSignal:
      out = load_csv(path);
      break;
    default:
      throw IoError("unresolved image format");
  }
  out.assert_finite("load " + path);
  return out;
}

void save_image(const Field& field, const std::string& path, const SaveOptions& options) {
  ImageFormat fmt = options.format;
  if (fmt == ImageFormat::Auto) fmt = format_from_path(path);
  switch (fmt) {
    case ImageFormat::Png:
      save_png(field, path, options);
      break;
    case ImageFormat::RadianceHdr:
      save_hdr(field, path);
      break;
    case ImageFormat::RawF64:
      field.assert_finite("save " + path);
      save_raw(field, path);
      break;
    case ImageFormat::CsvSignal:
      field.assert_finite("save " + path);
      save_csv(field, path);
      break;
    default:
      throw IoError("unresolved image format");
  }
}

}  // namespace semisparse
