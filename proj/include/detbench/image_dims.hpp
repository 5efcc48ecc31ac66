#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "detbench/error.hpp"

namespace detbench {

struct ImageDims {
  int width = 0;
  int height = 0;
};

namespace detail {

inline std::optional<ImageDims> probe_pnm(const std::vector<unsigned char>& head) {
  if (head.size() < 3 || head[0] != 'P' || head[1] < '1' || head[1] > '6') return std::nullopt;
  // Tokenise past comments; the first two numeric tokens are width, height.
  std::size_t pos = 2;
  int values[2];
  for (int i = 0; i < 2; ++i) {
    while (pos < head.size()) {
      const unsigned char c = head[pos];
      if (c == '#') {
        while (pos < head.size() && head[pos] != '\n') ++pos;
      } else if (std::isspace(c)) {
        ++pos;
      } else {
        break;
      }
    }
    int value = 0;
    bool any = false;
    while (pos < head.size() && std::isdigit(head[pos])) {
      value = value * 10 + (head[pos] - '0');
      any = true;
      ++pos;
    }
    if (!any) return std::nullopt;
    values[i] = value;
  }
  return ImageDims{values[0], values[1]};
}

inline std::uint32_t read_be32(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
         std::uint32_t(p[3]);
}

inline std::optional<ImageDims> probe_png(const std::vector<unsigned char>& head) {
  static const unsigned char kSig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (head.size() < 24 || !std::equal(kSig, kSig + 8, head.begin())) return std::nullopt;
  // The IHDR chunk is mandatory and first: width and height at offsets 16, 20.
  if (head[12] != 'I' || head[13] != 'H' || head[14] != 'D' || head[15] != 'R')
    return std::nullopt;
  return ImageDims{static_cast<int>(read_be32(head.data() + 16)),
                   static_cast<int>(read_be32(head.data() + 20))};
}

inline std::optional<ImageDims> probe_jpeg(std::ifstream& in) {
  unsigned char marker[2];
  in.seekg(0);
  if (!in.read(reinterpret_cast<char*>(marker), 2) || marker[0] != 0xFF || marker[1] != 0xD8)
    return std::nullopt;
  // Walk the segment chain until a start-of-frame marker carries the size.
  while (in) {
    unsigned char byte = 0;
    do {
      if (!in.read(reinterpret_cast<char*>(&byte), 1)) return std::nullopt;
    } while (byte != 0xFF);
    do {
      if (!in.read(reinterpret_cast<char*>(&byte), 1)) return std::nullopt;
    } while (byte == 0xFF);
    if (byte == 0xD8 || (byte >= 0xD0 && byte <= 0xD7) || byte == 0x01) continue;
    unsigned char len_bytes[2];
    if (!in.read(reinterpret_cast<char*>(len_bytes), 2)) return std::nullopt;
    const int length = (len_bytes[0] << 8) | len_bytes[1];
    const bool sof = (byte >= 0xC0 && byte <= 0xCF) && byte != 0xC4 && byte != 0xC8 &&
                     byte != 0xCC;
    if (sof) {
      unsigned char frame[5];
      if (length < 7 || !in.read(reinterpret_cast<char*>(frame), 5)) return std::nullopt;
      const int height = (frame[1] << 8) | frame[2];
      const int width = (frame[3] << 8) | frame[4];
      return ImageDims{width, height};
    }
    if (length < 2) return std::nullopt;
    in.seekg(length - 2, std::ios::cur);
  }
  return std::nullopt;
}

}  // namespace detail

// Read width/height from a PNM (P1-P6), PNG, or JPEG header without
// decoding pixels. Used by `manifest-scan` to record image dimensions.
inline ImageDims probe_image_dims(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open image: " + path.string());
  std::vector<unsigned char> head(256, 0);
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  in.clear();

  if (auto dims = detail::probe_png(head)) return *dims;
  if (auto dims = detail::probe_pnm(head)) return *dims;
  if (auto dims = detail::probe_jpeg(in)) return *dims;
  throw ParseError("unsupported image format (expect PNM, PNG, or JPEG): " + path.string());
}

}  // namespace detbench
