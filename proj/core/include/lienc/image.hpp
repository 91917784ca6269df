#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace lienc {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, row-major, components interleaved R,G,B.
class Image {
 public:
  Image(int width, int height);
  Image(int width, int height, std::vector<std::uint8_t> interleaved);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  Rgb pixel(int x, int y) const noexcept;
  void set_pixel(int x, int y, Rgb value) noexcept;

  std::uint8_t& at(int x, int y, int channel) noexcept {
    return data_[index(x, y) + static_cast<std::size_t>(channel)];
  }
  std::uint8_t at(int x, int y, int channel) const noexcept {
    return data_[index(x, y) + static_cast<std::size_t>(channel)];
  }

  std::span<const std::uint8_t> bytes() const noexcept { return data_; }
  std::span<std::uint8_t> bytes() noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x));
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

enum class Role { Train, Test };

/// Ordered images of identical dimensions. `ids` are stable source indices,
/// used for per-image key derivation and disjointness checks.
struct Dataset {
  std::vector<Image> images;
  std::vector<Role> roles;
  std::vector<std::size_t> ids;

  std::size_t size() const noexcept { return images.size(); }
  bool empty() const noexcept { return images.empty(); }

  void add(Image img, Role role, std::size_t id);
  void add(Image img, Role role) { add(std::move(img), role, images.size()); }
};

Image load_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> save_ppm(const Image& img);

Image read_ppm_file(const std::filesystem::path& path);
void write_ppm_file(const std::filesystem::path& path, const Image& img);

inline constexpr int kStl10Side = 96;
inline constexpr std::size_t kStl10RecordBytes = 3 * 96 * 96;

/// Decodes `count` records of the STL-10 binary layout: R, G, B planes,
/// each column-major (value at column x, row y is byte x*96 + y).
std::vector<Image> load_stl10(std::span<const std::uint8_t> bytes, std::size_t count);
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

Image crop(const Image& img, int x0, int y0, int width, int height);

/// Keyed split of a training set into disjoint halves; T1 takes the extra
/// image when the size is odd.
std::pair<Dataset, Dataset> split_halves(const Dataset& train, std::uint64_t seed);

}  // namespace lienc
