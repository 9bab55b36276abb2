#ifndef RISCHAN_BLOCKIO_HPP
#define RISCHAN_BLOCKIO_HPP

#include <string>

#include "rischan/types.hpp"

namespace rischan {

// Binary block dump: magic "RISY", little-endian u32 rows, u32 cols, then
// row-major complex64 (float32 re/im) samples.
void write_risy(const std::string& path, const CMat& block);
CMat read_risy(const std::string& path);

}  // namespace rischan

#endif  // RISCHAN_BLOCKIO_HPP
