#include "matrix_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace linopt {

static_assert(std::endian::native == std::endian::little, "binary matrix format assumes little-endian");

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

cplx entry_from_json(const nlohmann::json& e, std::string_view where) {
  if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
    throw IoError(fmt::format("{}: expected [re, im]", where));
  }
  return {e[0].get<double>(), e[1].get<double>()};
}

}  // namespace

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw IoError("matrix: expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw IoError("matrix: row 1 is not a nonempty array");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw IoError(fmt::format("matrix: row {} has the wrong length", r + 1));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = entry_from_json(row[static_cast<std::size_t>(c)],
                                fmt::format("matrix entry ({}, {})", r + 1, c + 1));
    }
  }
  if (!all_finite(m)) throw IoError("matrix: non-finite entry");
  return m;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(fmt::format("write failed: {}", path.string()));
}

void write_matrix_json(const std::filesystem::path& path, const ComplexMatrix& m) {
  write_text_file(path, matrix_to_json(m).dump());
}

ComplexMatrix read_matrix_json(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return matrix_from_json(j);
}

void write_matrix_binary(const std::filesystem::path& path, const ComplexMatrix& m) {
  std::string buf(kMatrixMagic, sizeof kMatrixMagic);
  auto put = [&buf](const auto& v) {
    char raw[sizeof v];
    std::memcpy(raw, &v, sizeof v);
    buf.append(raw, sizeof v);
  };
  put(static_cast<std::uint64_t>(m.rows()));
  put(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put(m(r, c).real());
      put(m(r, c).imag());
    }
  }
  write_text_file(path, buf);
}

ComplexMatrix read_matrix_binary(const std::filesystem::path& path) {
  const std::string buf = read_text_file(path);
  if (buf.size() < 24 || std::memcmp(buf.data(), kMatrixMagic, 8) != 0) {
    throw IoError(fmt::format("{}: not a matrix dump", path.string()));
  }
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::memcpy(&rows, buf.data() + 8, 8);
  std::memcpy(&cols, buf.data() + 16, 8);
  if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20) ||
      buf.size() != 24 + rows * cols * 16) {
    throw IoError(fmt::format("{}: bad dimensions or truncated payload", path.string()));
  }
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const char* p = buf.data() + 24;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      double re = 0.0;
      double im = 0.0;
      std::memcpy(&re, p, 8);
      std::memcpy(&im, p + 8, 8);
      p += 16;
      m(r, c) = {re, im};
    }
  }
  return m;
}

nlohmann::json gates_to_json(const std::vector<Gate>& gates) {
  nlohmann::json out = nlohmann::json::array();
  for (const Gate& g : gates) {
    if (g.kind == GateKind::phase) {
      out.push_back({{"kind", "phase"},
                     {"modes", {g.mode + 1}},
                     {"block", {g.phase.real(), g.phase.imag()}}});
    } else {
      nlohmann::json block = nlohmann::json::array();
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) block.push_back({g.block(r, c).real(), g.block(r, c).imag()});
      }
      out.push_back({{"kind", "two-mode"}, {"modes", {g.mode + 1, g.mode + 2}}, {"block", block}});
    }
  }
  return out;
}

std::vector<Gate> gates_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw IoError("gates: expected an array");
  std::vector<Gate> gates;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const std::string where = fmt::format("gates[{}]", i);
    if (!e.is_object() || !e.contains("kind") || !e.contains("modes") || !e.contains("block")) {
      throw IoError(where + ": needs kind, modes and block");
    }
    const auto& modes = e["modes"];
    if (!modes.is_array() || modes.empty() || !modes[0].is_number_unsigned() ||
        modes[0].get<std::size_t>() < 1) {
      throw IoError(where + ".modes: expected 1-based mode numbers");
    }
    Gate g;
    g.mode = modes[0].get<std::size_t>() - 1;
    const std::string kind = e["kind"].get<std::string>();
    if (kind == "phase") {
      if (modes.size() != 1) throw IoError(where + ".modes: phase gate takes one mode");
      g.kind = GateKind::phase;
      g.phase = entry_from_json(e["block"], where + ".block");
    } else if (kind == "two-mode") {
      if (modes.size() != 2 || !modes[1].is_number_unsigned() ||
          modes[1].get<std::size_t>() != g.mode + 2) {
        throw IoError(where + ".modes: two-mode gate needs adjacent modes [i, i+1]");
      }
      const auto& block = e["block"];
      if (!block.is_array() || block.size() != 4) throw IoError(where + ".block: expected 4 entries");
      g.kind = GateKind::two_mode;
      for (int k = 0; k < 4; ++k) {
        g.block(k / 2, k % 2) = entry_from_json(block[static_cast<std::size_t>(k)], where + ".block");
      }
    } else {
      throw IoError(fmt::format("{}.kind: unknown gate kind '{}'", where, kind));
    }
    gates.push_back(g);
  }
  return gates;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) { return fmt::format("{:016x}", fnv1a64(bytes)); }

std::string file_hash_hex(const std::filesystem::path& path) {
  return fnv1a64_hex(read_text_file(path));
}

}  // namespace linopt
