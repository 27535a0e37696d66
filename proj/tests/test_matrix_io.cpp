#include "doctest.h"

#include <stdexcept>

#include <filesystem>
#include <cstring>
#include <fstream>

#include "matrix_io.hpp"
#include "sampler.hpp"

using namespace linopt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "linopt_test_matrix_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("fnv1a64 reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a64_hex("").size() == 16);
}

TEST_CASE("matrix JSON round trip") {
  Engine rng(1);
  const ComplexMatrix u = haar_unitary(5, rng);
  CHECK(matrix_from_json(matrix_to_json(u)) == u);
  const auto path = scratch("u.json");
  write_matrix_json(path, u);
  CHECK(read_matrix_json(path) == u);

  const auto j = nlohmann::json::parse(R"([[[1, 0], [0, 1]], [[0, -1], [1, 0]]])");
  const ComplexMatrix m = matrix_from_json(j);
  CHECK(m(0, 1) == cplx(0, 1));
  CHECK(m(1, 0) == cplx(0, -1));
  CHECK_THROWS(matrix_from_json(nlohmann::json::parse(R"([[[1, 0]], [[0, 1], [1, 0]]])")));
  CHECK_THROWS(matrix_from_json(nlohmann::json::parse(R"([[1, 0]])")));
  CHECK_THROWS_AS(read_matrix_json(scratch("missing.json")), IoError);
}

TEST_CASE("matrix binary round trip and layout") {
  ComplexMatrix m(2, 3);
  m << cplx(1, 2), cplx(3, 4), cplx(5, 6), cplx(7, 8), cplx(9, 10), cplx(11, 12);
  const auto path = scratch("m.bin");
  write_matrix_binary(path, m);
  CHECK(fs::file_size(path) == 8 + 16 + 6 * 16);
  CHECK(read_matrix_binary(path) == m);
  const std::string bytes = read_text_file(path);
  CHECK(bytes.substr(0, 8) == "LOPTMAT1");
  double second_re = 0.0;
  std::memcpy(&second_re, bytes.data() + 24 + 16, sizeof(double));
  CHECK(second_re == 3.0);  // row-major

  write_text_file(scratch("bad.bin"), "NOTAMAT1xxxxxxxxxxxxxxxx");
  CHECK_THROWS_AS(read_matrix_binary(scratch("bad.bin")), IoError);
  write_text_file(scratch("short.bin"), bytes.substr(0, 40));
  CHECK_THROWS_AS(read_matrix_binary(scratch("short.bin")), IoError);
}

TEST_CASE("gate list JSON round trip") {
  Engine rng(2);
  const auto r = reck_decompose(haar_unitary(4, rng));
  const auto j = gates_to_json(r.gates);
  CHECK(j[0]["modes"].size() == 2);
  CHECK(j[0]["kind"] == "two-mode");
  CHECK(j.back()["kind"] == "phase");
  const auto back = gates_from_json(j);
  REQUIRE(back.size() == r.gates.size());
  CHECK(hs_norm(reconstruct(back, 4) - reconstruct(r.gates, 4)) == 0.0);
  CHECK_THROWS(gates_from_json(nlohmann::json::parse(R"([{"kind": "two-mode", "modes": [1, 3], "block": []}])")));
  CHECK_THROWS(gates_from_json(nlohmann::json::parse(R"([{"kind": "swap", "modes": [1]}])")));
}
