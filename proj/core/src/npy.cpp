#include "tdet/npy.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tdet/io.hpp"

namespace tdet {
namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kPreludeLen = 10;  // magic + version + u16 header length

static_assert(std::endian::native == std::endian::little,
              "NPY payload decoding assumes a little-endian host");

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Returns the text that follows `'key':` up to the next top-level comma or
// closing brace, with tuples kept intact.
std::string_view dict_value(std::string_view header, std::string_view key) {
  const std::string quoted = "'" + std::string(key) + "'";
  auto pos = header.find(quoted);
  if (pos == std::string_view::npos) {
    throw Error(ErrorKind::format, "npy header is missing key " + quoted);
  }
  pos = header.find(':', pos + quoted.size());
  if (pos == std::string_view::npos) {
    throw Error(ErrorKind::format, "npy header is malformed near " + quoted);
  }
  ++pos;
  int depth = 0;
  std::size_t end = pos;
  for (; end < header.size(); ++end) {
    const char c = header[end];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth == 0 && (c == ',' || c == '}')) break;
  }
  return trim(header.substr(pos, end - pos));
}

}  // namespace

MatrixF parse_npy(std::string_view bytes) {
  if (bytes.size() < kPreludeLen || bytes.substr(0, kMagicLen) != std::string_view(kMagic, kMagicLen)) {
    throw Error(ErrorKind::format, "not an npy stream (bad magic)");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  const auto minor = static_cast<unsigned char>(bytes[7]);
  if (major != 1 || minor != 0) {
    throw Error(ErrorKind::format, "unsupported npy version " + std::to_string(major) + "." +
                                       std::to_string(minor));
  }
  const std::size_t header_len = static_cast<unsigned char>(bytes[8]) |
                                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  if (bytes.size() < kPreludeLen + header_len) {
    throw Error(ErrorKind::truncation, "npy header is truncated");
  }
  const std::string_view header = bytes.substr(kPreludeLen, header_len);
  if (header.find('{') == std::string_view::npos || header.find('}') == std::string_view::npos) {
    throw Error(ErrorKind::format, "npy header is not a dict literal");
  }

  const auto descr = dict_value(header, "descr");
  if (descr != "'<f4'") {
    throw Error(ErrorKind::unsupported_layout, "unsupported npy dtype " + std::string(descr));
  }
  const auto fortran = dict_value(header, "fortran_order");
  if (fortran == "True") {
    throw Error(ErrorKind::unsupported_layout, "fortran-ordered npy arrays are not supported");
  }
  if (fortran != "False") {
    throw Error(ErrorKind::format, "bad fortran_order value " + std::string(fortran));
  }

  auto shape = dict_value(header, "shape");
  if (shape.size() < 2 || shape.front() != '(' || shape.back() != ')') {
    throw Error(ErrorKind::format, "bad npy shape " + std::string(shape));
  }
  shape = shape.substr(1, shape.size() - 2);
  std::vector<long long> dims;
  std::stringstream ss{std::string(shape)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = trim(item);
    if (t.empty()) continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(std::string(t), &used);
      if (used != t.size() || v < 0) throw std::invalid_argument("dim");
      dims.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::format, "bad npy shape entry '" + std::string(t) + "'");
    }
  }
  if (dims.size() != 2) {
    throw Error(ErrorKind::unsupported_layout,
                "expected a 2-D array, got " + std::to_string(dims.size()) + " dimensions");
  }

  const std::size_t rows = static_cast<std::size_t>(dims[0]);
  const std::size_t cols = static_cast<std::size_t>(dims[1]);
  const std::size_t payload = bytes.size() - kPreludeLen - header_len;
  if (payload != rows * cols * sizeof(float)) {
    throw Error(ErrorKind::truncation, "npy payload has " + std::to_string(payload) +
                                           " bytes, expected " +
                                           std::to_string(rows * cols * sizeof(float)));
  }
  MatrixF out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (payload > 0) {
    std::memcpy(out.data(), bytes.data() + kPreludeLen + header_len, payload);
  }
  return out;
}

std::string write_npy(const MatrixF& matrix) {
  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (" +
                     std::to_string(matrix.rows()) + ", " + std::to_string(matrix.cols()) +
                     "), }";
  // numpy pads with spaces so the payload starts on a 64-byte boundary and
  // terminates the header with a newline.
  std::size_t total = kPreludeLen + dict.size() + 1;
  const std::size_t padding = (64 - total % 64) % 64;
  dict.append(padding, ' ');
  dict.push_back('\n');

  std::string out;
  const std::size_t payload = static_cast<std::size_t>(matrix.size()) * sizeof(float);
  out.reserve(kPreludeLen + dict.size() + payload);
  out.append(kMagic, kMagicLen);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(dict.size() & 0xff));
  out.push_back(static_cast<char>((dict.size() >> 8) & 0xff));
  out.append(dict);
  out.append(reinterpret_cast<const char*>(matrix.data()), payload);
  return out;
}

MatrixF read_npy_file(const std::filesystem::path& path) {
  try {
    return parse_npy(read_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_npy_file(const std::filesystem::path& path, const MatrixF& matrix) {
  write_file(path, write_npy(matrix));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::io, "cannot write " + path.string());
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) {
    throw Error(ErrorKind::io, "short write to " + path.string());
  }
}

}  // namespace tdet
