/*
 * snakuscule - swarms of concentric active contours for blob localization
 *
 * Copyright 2026 The snakuscule authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Baseline TIFF stacks: uncompressed, single-channel, 8 or 16 bit, stored in
// strips. One page per z slice. Both byte orders are read; files are written
// little endian.

#include <fstream>
#include <iterator>
#include <limits>

#include "error.hpp"
#include "volume.hpp"

namespace snk {
namespace {

enum Tag : std::uint16_t {
  kImageWidth = 256,
  kImageLength = 257,
  kBitsPerSample = 258,
  kCompression = 259,
  kPhotometric = 262,
  kStripOffsets = 273,
  kSamplesPerPixel = 277,
  kRowsPerStrip = 278,
  kStripByteCounts = 279,
  kPlanarConfig = 284,
  kSampleFormat = 339,
};

class Reader {
 public:
  Reader(std::vector<char> bytes, std::string name) : buf_(std::move(bytes)), name_(std::move(name)) {
    if (buf_.size() < 8) fail("file too short");
    if (buf_[0] == 'I' && buf_[1] == 'I')
      big_ = false;
    else if (buf_[0] == 'M' && buf_[1] == 'M')
      big_ = true;
    else
      fail("bad byte-order mark");
    if (u16(2) != 42) fail("not a classic TIFF (BigTIFF is not supported)");
  }

  std::uint16_t u16(std::size_t off) const {
    check(off, 2);
    const auto* p = reinterpret_cast<const unsigned char*>(buf_.data() + off);
    return big_ ? static_cast<std::uint16_t>(p[0] << 8 | p[1]) : static_cast<std::uint16_t>(p[1] << 8 | p[0]);
  }

  std::uint32_t u32(std::size_t off) const {
    check(off, 4);
    const auto* p = reinterpret_cast<const unsigned char*>(buf_.data() + off);
    if (big_) return std::uint32_t{p[0]} << 24 | std::uint32_t{p[1]} << 16 | std::uint32_t{p[2]} << 8 | p[3];
    return std::uint32_t{p[3]} << 24 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[1]} << 8 | p[0];
  }

  /// Values of an IFD entry of type SHORT or LONG.
  std::vector<std::uint32_t> values(std::size_t entry) const {
    const std::uint16_t type = u16(entry + 2);
    const std::uint32_t count = u32(entry + 4);
    std::size_t size;
    if (type == 3)
      size = 2;
    else if (type == 4)
      size = 4;
    else
      fail("unsupported field type " + std::to_string(type) + " for tag " + std::to_string(u16(entry)));
    if (count > buf_.size()) fail("corrupt entry count");
    const std::size_t base = count * size <= 4 ? entry + 8 : u32(entry + 8);
    std::vector<std::uint32_t> out(count);
    for (std::uint32_t i = 0; i < count; ++i) out[i] = size == 2 ? u16(base + 2 * i) : u32(base + 4 * i);
    return out;
  }

  const char* at(std::size_t off, std::size_t len) const {
    check(off, len);
    return buf_.data() + off;
  }

  bool big_endian() const { return big_; }
  std::size_t size() const { return buf_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    throw_io("malformed TIFF '" + name_ + "': " + what);
  }

 private:
  void check(std::size_t off, std::size_t len) const {
    if (off > buf_.size() || len > buf_.size() - off) fail("offset out of range");
  }

  std::vector<char> buf_;
  std::string name_;
  bool big_ = false;
};

struct Page {
  std::uint32_t width = 0, height = 0, bits = 0;
  bool white_is_zero = false;
  std::vector<std::uint32_t> offsets, counts;
};

Page read_page(const Reader& r, std::size_t ifd) {
  Page pg;
  std::uint32_t compression = 1, spp = 1, planar = 1, format = 1;
  const std::uint16_t n = r.u16(ifd);
  for (std::uint16_t i = 0; i < n; ++i) {
    const std::size_t e = ifd + 2 + 12u * i;
    const std::uint16_t tag = r.u16(e);
    auto first = [&] {
      const auto v = r.values(e);
      if (v.empty()) r.fail("empty value for tag " + std::to_string(tag));
      return v.front();
    };
    switch (tag) {
      case kImageWidth: pg.width = first(); break;
      case kImageLength: pg.height = first(); break;
      case kBitsPerSample: pg.bits = first(); break;
      case kCompression: compression = first(); break;
      case kPhotometric: pg.white_is_zero = first() == 0; break;
      case kStripOffsets: pg.offsets = r.values(e); break;
      case kSamplesPerPixel: spp = first(); break;
      case kStripByteCounts: pg.counts = r.values(e); break;
      case kPlanarConfig: planar = first(); break;
      case kSampleFormat: format = first(); break;
      default: break;
    }
  }
  if (pg.width == 0 || pg.height == 0) r.fail("missing image size");
  if (compression != 1) r.fail("compressed pages are not supported");
  if (spp != 1 || planar != 1) r.fail("only single-channel images are supported");
  if (pg.bits != 8 && pg.bits != 16) r.fail("only 8 and 16 bit samples are supported");
  if (format != 1) r.fail("only unsigned integer samples are supported");
  if (pg.offsets.empty() || pg.offsets.size() != pg.counts.size()) r.fail("missing strip layout");
  return pg;
}

}  // namespace

ImageVolume load_tiff_stack(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path.string() + "'");
  Reader r({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}, path.string());

  std::vector<Page> pages;
  std::size_t ifd = r.u32(4);
  while (ifd != 0) {
    if (pages.size() > r.size()) r.fail("IFD chain does not terminate");
    pages.push_back(read_page(r, ifd));
    ifd = r.u32(ifd + 2 + 12u * r.u16(ifd));
  }
  if (pages.empty()) r.fail("no pages");
  const Page& p0 = pages.front();
  for (const Page& pg : pages)
    if (pg.width != p0.width || pg.height != p0.height || pg.bits != p0.bits)
      r.fail("pages differ in size or bit depth");

  const int dim = pages.size() == 1 ? 2 : 3;
  ImageVolume v(dim, {p0.width, p0.height, pages.size()}, {1, 1, 1},
                p0.bits == 8 ? SampleType::U8 : SampleType::U16);
  const std::size_t bytes_per = p0.bits / 8;
  const std::size_t page_bytes = std::size_t{p0.width} * p0.height * bytes_per;
  const double white = p0.bits == 8 ? 255.0 : 65535.0;
  auto out = v.data();
  std::vector<unsigned char> plane;
  for (std::size_t z = 0; z < pages.size(); ++z) {
    const Page& pg = pages[z];
    plane.clear();
    for (std::size_t s = 0; s < pg.offsets.size() && plane.size() < page_bytes; ++s) {
      const char* src = r.at(pg.offsets[s], pg.counts[s]);
      plane.insert(plane.end(), src, src + pg.counts[s]);
    }
    if (plane.size() < page_bytes) r.fail("strip data shorter than the image");
    float* dst = out.data() + z * std::size_t{p0.width} * p0.height;
    for (std::size_t i = 0; i < std::size_t{p0.width} * p0.height; ++i) {
      double value;
      if (bytes_per == 1)
        value = plane[i];
      else if (r.big_endian())
        value = plane[2 * i] << 8 | plane[2 * i + 1];
      else
        value = plane[2 * i + 1] << 8 | plane[2 * i];
      dst[i] = static_cast<float>(pg.white_is_zero ? white - value : value);
    }
  }
  return v;
}

namespace {

void put16(std::vector<unsigned char>& b, std::uint16_t v) {
  b.push_back(v & 0xFF);
  b.push_back(v >> 8);
}

void put32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}

}  // namespace

void save_tiff_stack(const ImageVolume& v, const std::filesystem::path& path, SampleType dtype) {
  if (dtype == SampleType::F32) throw_config("TIFF output supports u8 and u16 only");
  const std::uint32_t w = static_cast<std::uint32_t>(v.dims()[0]);
  const std::uint32_t h = static_cast<std::uint32_t>(v.dims()[1]);
  const std::size_t depth = v.dims()[2];
  const std::uint16_t bits = dtype == SampleType::U8 ? 8 : 16;
  const double top = dtype == SampleType::U8 ? 255.0 : 65535.0;

  std::vector<unsigned char> b;
  b.insert(b.end(), {'I', 'I'});
  put16(b, 42);
  std::size_t link = b.size();  // where the offset of the next IFD goes
  put32(b, 0);
  auto data = v.data();
  for (std::size_t z = 0; z < depth; ++z) {
    const auto data_off = static_cast<std::uint32_t>(b.size());
    for (std::size_t i = 0; i < std::size_t{w} * h; ++i) {
      const double x = std::clamp(std::round(static_cast<double>(data[z * w * h + i])), 0.0, top);
      if (bits == 8)
        b.push_back(static_cast<unsigned char>(x));
      else
        put16(b, static_cast<std::uint16_t>(x));
    }
    if (b.size() % 2) b.push_back(0);

    const auto ifd_off = static_cast<std::uint32_t>(b.size());
    for (int i = 0; i < 4; ++i) b[link + i] = (ifd_off >> (8 * i)) & 0xFF;
    const std::uint32_t byte_count = std::uint32_t{w} * h * (bits / 8);
    const std::pair<std::uint16_t, std::uint32_t> entries[] = {
        {kImageWidth, w},      {kImageLength, h},        {kBitsPerSample, bits},
        {kCompression, 1},     {kPhotometric, 1},        {kStripOffsets, data_off},
        {kSamplesPerPixel, 1}, {kRowsPerStrip, h},       {kStripByteCounts, byte_count},
    };
    put16(b, static_cast<std::uint16_t>(std::size(entries)));
    for (const auto& [tag, value] : entries) {
      put16(b, tag);
      put16(b, 4);  // LONG
      put32(b, 1);
      put32(b, value);
    }
    link = b.size();
    put32(b, 0);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

}  // namespace snk
