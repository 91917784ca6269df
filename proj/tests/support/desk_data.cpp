#include "desk_data.hpp"

#include "lienc/error.hpp"
#include "lienc/keystream.hpp"

namespace lienc::testing {

std::filesystem::path data_dir() { return LIENC_TEST_DATA_DIR; }

const std::vector<Image>& natural96() {
  static const std::vector<Image> images = [] {
    const auto bytes = read_file_bytes(data_dir() / "natural96.bin");
    return load_stl10(bytes, bytes.size() / kStl10RecordBytes);
  }();
  return images;
}

Dataset natural_crops(int side, std::size_t count, int first_source, int last_source, Role role,
                      std::size_t first_id) {
  const auto& src = natural96();
  const int per_row = kStl10Side / side;
  Dataset out;
  for (int s = first_source; s < last_source && out.size() < count; ++s) {
    for (int k = 0; k < per_row * per_row && out.size() < count; ++k) {
      out.add(crop(src.at(static_cast<std::size_t>(s)), (k % per_row) * side, (k / per_row) * side, side, side),
              role, first_id + out.size());
    }
  }
  if (out.size() < count) throw Error(ErrorCode::EmptyDataset, "not enough source images for the requested crops");
  return out;
}

Image random_image(int width, int height, std::uint64_t seed) {
  KeyStream rng(seed);
  Image img(width, height);
  for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(rng.next_u64() >> 56);
  return img;
}

}  // namespace lienc::testing
