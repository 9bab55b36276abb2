#include "rischan/blockio.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace rischan {

namespace {
constexpr char kMagic[4] = {'R', 'I', 'S', 'Y'};
}

void write_risy(const std::string& path, const CMat& block) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("blockio: cannot open " + path + " for writing");
  out.write(kMagic, 4);
  const std::uint32_t rows = static_cast<std::uint32_t>(block.rows());
  const std::uint32_t cols = static_cast<std::uint32_t>(block.cols());
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  std::vector<float> buf(2 * block.cols());
  for (Eigen::Index r = 0; r < block.rows(); ++r) {
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
      buf[2 * c] = static_cast<float>(block(r, c).real());
      buf[2 * c + 1] = static_cast<float>(block(r, c).imag());
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("blockio: short write to " + path);
}

CMat read_risy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("blockio: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("blockio: " + path + " is not a RISY dump");
  }
  std::uint32_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  if (!in) throw std::runtime_error("blockio: truncated header in " + path);
  CMat block(rows, cols);
  std::vector<float> buf(2 * static_cast<std::size_t>(cols));
  for (std::uint32_t r = 0; r < rows; ++r) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw std::runtime_error("blockio: truncated data in " + path);
    for (std::uint32_t c = 0; c < cols; ++c) {
      block(r, c) = cdouble(buf[2 * c], buf[2 * c + 1]);
    }
  }
  return block;
}

}  // namespace rischan
