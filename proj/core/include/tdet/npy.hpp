#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tdet/tensor.hpp"

namespace tdet {

/// Decodes an NPY v1.0 stream holding a 2-D little-endian float32 array in
/// C order. Throws Error with kind format, unsupported_layout or truncation.
MatrixF parse_npy(std::string_view bytes);

/// Encodes in the exact header layout numpy emits for the same array, so
/// files written by numpy.save round-trip byte for byte.
std::string write_npy(const MatrixF& matrix);

MatrixF read_npy_file(const std::filesystem::path& path);
void write_npy_file(const std::filesystem::path& path, const MatrixF& matrix);

}  // namespace tdet
