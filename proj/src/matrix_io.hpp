#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "compress.hpp"
#include "numerics.hpp"

namespace linopt {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nested rows of [re, im] pairs.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

void write_matrix_json(const std::filesystem::path& path, const ComplexMatrix& m);
ComplexMatrix read_matrix_json(const std::filesystem::path& path);

/// Binary layout, little-endian: "LOPTMAT1", u64 rows, u64 cols, then
/// rows*cols pairs of f64 (re, im) in row-major order.
inline constexpr char kMatrixMagic[8] = {'L', 'O', 'P', 'T', 'M', 'A', 'T', '1'};
void write_matrix_binary(const std::filesystem::path& path, const ComplexMatrix& m);
ComplexMatrix read_matrix_binary(const std::filesystem::path& path);

/// [{kind: "two-mode", modes: [i, i+1], block: [[re,im] x 4]} |
///  {kind: "phase", modes: [i], block: [re, im]}], 1-based modes.
nlohmann::json gates_to_json(const std::vector<Gate>& gates);
std::vector<Gate> gates_from_json(const nlohmann::json& j);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);
std::string file_hash_hex(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace linopt
