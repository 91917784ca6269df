#include "lienc/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "lienc/error.hpp"
#include "lienc/keystream.hpp"

namespace lienc {

Image::Image(int width, int height) : Image(width, height, {}) {}

Image::Image(int width, int height, std::vector<std::uint8_t> interleaved)
    : width_(width), height_(height), data_(std::move(interleaved)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::DimensionMismatch,
                "image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  const std::size_t expected = 3 * pixel_count();
  if (data_.empty()) {
    data_.assign(expected, 0);
  } else if (data_.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch,
                "pixel buffer holds " + std::to_string(data_.size()) + " bytes, expected " +
                    std::to_string(expected));
  }
}

Rgb Image::pixel(int x, int y) const noexcept {
  const std::size_t i = index(x, y);
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void Image::set_pixel(int x, int y, Rgb value) noexcept {
  const std::size_t i = index(x, y);
  data_[i] = value[0];
  data_[i + 1] = value[1];
  data_[i + 2] = value[2];
}

void Dataset::add(Image img, Role role, std::size_t id) {
  if (!images.empty() && !images.front().same_shape(img)) {
    throw Error(ErrorCode::DimensionMismatch, "all images in a dataset must share dimensions");
  }
  images.push_back(std::move(img));
  roles.push_back(role);
  ids.push_back(id);
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* field) {
    skip_space_and_comments();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw Error(ErrorCode::Truncated, std::string("PPM ") + field + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::Truncated, std::string("PPM header missing ") + field);
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image load_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw Error(ErrorCode::BadMagic, "expected P6 magic");
  }
  HeaderReader header(bytes.subspan(2));
  const long width = header.read_uint("width");
  const long height = header.read_uint("height");
  const long maxval = header.read_uint("maxval");
  if (maxval != 255) {
    throw Error(ErrorCode::UnsupportedMaxval, "maxval " + std::to_string(maxval) + " (only 255 supported)");
  }
  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t offset = 2 + header.pos();
  if (offset >= bytes.size() || !std::isspace(bytes[offset])) {
    throw Error(ErrorCode::Truncated, "PPM header not terminated");
  }
  ++offset;
  if (width < 1 || height < 1) throw Error(ErrorCode::DimensionMismatch, "PPM with zero dimension");
  const std::size_t payload = 3 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - offset < payload) {
    throw Error(ErrorCode::Truncated, "PPM payload has " + std::to_string(bytes.size() - offset) +
                                          " bytes, expected " + std::to_string(payload));
  }
  const auto raster = bytes.subspan(offset, payload);
  return Image(static_cast<int>(width), static_cast<int>(height),
               std::vector<std::uint8_t>(raster.begin(), raster.end()));
}

std::vector<std::uint8_t> save_ppm(const Image& img) {
  const std::string header =
      "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto raster = img.bytes();
  out.insert(out.end(), raster.begin(), raster.end());
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Image read_ppm_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return load_ppm(bytes);
}

void write_ppm_file(const std::filesystem::path& path, const Image& img) {
  const auto bytes = save_ppm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

std::vector<Image> load_stl10(std::span<const std::uint8_t> bytes, std::size_t count) {
  if (bytes.size() / kStl10RecordBytes < count) {
    throw Error(ErrorCode::Truncated, "STL-10 buffer holds " + std::to_string(bytes.size()) +
                                          " bytes, need " + std::to_string(count * kStl10RecordBytes));
  }
  constexpr std::size_t plane = 96 * 96;
  std::vector<Image> images;
  images.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto record = bytes.subspan(i * kStl10RecordBytes, kStl10RecordBytes);
    Image img(kStl10Side, kStl10Side);
    for (int c = 0; c < 3; ++c) {
      for (int x = 0; x < kStl10Side; ++x) {
        for (int y = 0; y < kStl10Side; ++y) {
          img.at(x, y, c) = record[c * plane + static_cast<std::size_t>(x) * 96 + static_cast<std::size_t>(y)];
        }
      }
    }
    images.push_back(std::move(img));
  }
  return images;
}

Image crop(const Image& img, int x0, int y0, int width, int height) {
  if (x0 < 0 || y0 < 0 || width < 1 || height < 1 || x0 + width > img.width() ||
      y0 + height > img.height()) {
    throw Error(ErrorCode::DimensionMismatch, "crop window outside image");
  }
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out.set_pixel(x, y, img.pixel(x0 + x, y0 + y));
  }
  return out;
}

std::pair<Dataset, Dataset> split_halves(const Dataset& train, std::uint64_t seed) {
  if (train.size() < 2) {
    throw Error(ErrorCode::EmptyDataset, "split needs at least 2 images, got " + std::to_string(train.size()));
  }
  KeyStream stream(seed);
  const auto order = stream.permutation(train.size());
  const std::size_t first = (train.size() + 1) / 2;
  Dataset t1;
  Dataset t2;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    (k < first ? t1 : t2).add(train.images[i], train.roles[i], train.ids[i]);
  }
  return {std::move(t1), std::move(t2)};
}

}  // namespace lienc
