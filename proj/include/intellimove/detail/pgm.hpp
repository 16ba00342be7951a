#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "intellimove/detail/text.hpp"
#include "intellimove/errors.hpp"

namespace intellimove::detail {

// Binary PGM (P5). 8-bit when maxval < 256, otherwise 16-bit big-endian.
struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> pixels;  // row-major, first row = top of file
};

inline PgmImage parse_pgm(const std::string& bytes, const std::string& source) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> FormatError {
    return FormatError(source + ": malformed PGM: " + why);
  };
  auto skip_ws = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* field) {
    skip_ws();
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos || pos - start > 9) throw fail(std::string("bad ") + field);
    return std::stoi(bytes.substr(start, pos - start));
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw fail("missing P5 magic");
  pos = 2;
  PgmImage img;
  img.width = read_uint("width");
  img.height = read_uint("height");
  img.maxval = read_uint("maxval");
  if (img.width <= 0 || img.height <= 0) throw fail("non-positive dimensions");
  if (img.maxval <= 0 || img.maxval > 65535) throw fail("maxval out of range");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw fail("missing separator after header");
  ++pos;

  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  const std::size_t bpp = img.maxval < 256 ? 1 : 2;
  if (bytes.size() - pos != n * bpp) throw fail("pixel data length mismatch");
  img.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint16_t v;
    if (bpp == 1) {
      v = static_cast<unsigned char>(bytes[pos + i]);
    } else {
      v = static_cast<std::uint16_t>((static_cast<unsigned char>(bytes[pos + 2 * i]) << 8) |
                                     static_cast<unsigned char>(bytes[pos + 2 * i + 1]));
    }
    if (v > img.maxval) throw fail("pixel exceeds maxval");
    img.pixels[i] = v;
  }
  return img;
}

inline PgmImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open PGM: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_pgm(bytes, path);
}

inline std::string encode_pgm(const PgmImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                    std::to_string(img.maxval) + "\n";
  const bool wide = img.maxval >= 256;
  out.reserve(out.size() + img.pixels.size() * (wide ? 2 : 1));
  for (auto v : img.pixels) {
    if (wide) out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace intellimove::detail
