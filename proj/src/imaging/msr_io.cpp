#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ucgan/imaging/io.hpp"

namespace ucgan::imaging {

namespace {

constexpr std::array<char, 4> kMagic{'M', 'S', 'R', '1'};
constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 2 + 2;

template <typename U>
void put_le(std::vector<unsigned char>& buf, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

template <typename U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v = static_cast<U>(v | (static_cast<U>(p[i]) << (8 * i)));
  return v;
}

}  // namespace

RasterImage load_raster(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("msr: cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderSize) throw FormatError("msr: truncated header in " + path.string());
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("msr: bad magic in " + path.string());
  }
  RasterImage img;
  img.width = get_le<std::uint32_t>(bytes.data() + 4);
  img.height = get_le<std::uint32_t>(bytes.data() + 8);
  img.bands = get_le<std::uint16_t>(bytes.data() + 12);
  img.bit_depth = get_le<std::uint16_t>(bytes.data() + 14);
  const std::uint64_t samples = std::uint64_t{img.width} * img.height * img.bands;
  if (bytes.size() != kHeaderSize + 2 * samples) {
    throw FormatError("msr: payload of " + path.string() + " holds " +
                      std::to_string(bytes.size() - kHeaderSize) + " bytes, expected " +
                      std::to_string(2 * samples));
  }
  img.pixels.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) img.pixels[i] = get_le<std::uint16_t>(bytes.data() + kHeaderSize + 2 * i);
  img.validate();
  return img;
}

void save_raster(const RasterImage& img, const std::filesystem::path& path) {
  img.validate();
  std::vector<unsigned char> buf;
  buf.reserve(kHeaderSize + 2 * img.pixels.size());
  buf.insert(buf.end(), kMagic.begin(), kMagic.end());
  put_le(buf, img.width);
  put_le(buf, img.height);
  put_le(buf, img.bands);
  put_le(buf, img.bit_depth);
  for (std::uint16_t v : img.pixels) put_le(buf, v);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("msr: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("msr: write failed for " + path.string());
}

}  // namespace ucgan::imaging
