#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <random>

#include <Eigen/QR>

#include "gaussian.hpp"
#include "sampler.hpp"

using namespace linopt;

namespace {

ComplexMatrix beamsplitter_50_50() {
  ComplexMatrix u(2, 2);
  u << 1.0, cplx(0, 1), cplx(0, 1), 1.0;
  return u / std::sqrt(2.0);
}

Subsystem random_subsystem(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> modes;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t x = 1; x <= n; ++x) {
    if (coin(rng)) modes.push_back(x);
  }
  if (modes.empty()) modes.push_back(1);
  if (modes.size() == n) modes.pop_back();
  return Subsystem::from_one_based(n, modes);
}

}  // namespace

TEST_CASE("Subsystem") {
  const auto g = Subsystem::from_one_based(5, {4, 2});
  CHECK(g.modes() == std::vector<std::size_t>{1, 3});
  CHECK(g.contains(1));
  CHECK_FALSE(g.contains(0));
  CHECK(g.complement().modes() == std::vector<std::size_t>{0, 2, 4});
  CHECK_THROWS_AS(Subsystem::from_one_based(5, {}), std::invalid_argument);
  CHECK_THROWS_AS(Subsystem::from_one_based(5, {6}), std::invalid_argument);
  CHECK_THROWS_AS(Subsystem::from_one_based(5, {2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(Subsystem::first_k(5, 0), std::invalid_argument);
}

TEST_CASE("build_w") {
  const auto gamma = Subsystem::from_one_based(4, {1, 3});
  CHECK((build_w(ComplexMatrix::Identity(4, 4), gamma) - ComplexMatrix::Identity(2, 2)).norm() == 0.0);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(4, 4);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = g(rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
  CHECK((build_w(q.cast<cplx>(), gamma) - ComplexMatrix::Identity(2, 2)).norm() <= 1e-12);

  const ComplexMatrix w = build_w(beamsplitter_50_50(), Subsystem::from_one_based(2, {1}));
  REQUIRE(w.rows() == 1);
  CHECK(std::abs(w(0, 0)) <= 1e-15);
}

TEST_CASE("renyi2 hand case: 50/50 beamsplitter") {
  const auto gamma = Subsystem::from_one_based(2, {1});
  const double expected = std::log(std::cosh(2.0));  // lambda = 0
  CHECK(expected == doctest::Approx(1.3250027).epsilon(1e-7));
  CHECK(std::abs(renyi2_eig(beamsplitter_50_50(), gamma, 1.0).value - expected) <= 1e-12);
  CHECK(std::abs(renyi2_cov(beamsplitter_50_50(), gamma, 1.0).value - expected) <= 1e-9);
}

TEST_CASE("renyi2 trivial cases") {
  const auto gamma = Subsystem::first_k(6, 3);
  for (double s : {0.0, 0.5, 2.0}) {
    CHECK(renyi2_eig(ComplexMatrix::Identity(6, 6), gamma, s).value <= 1e-12);
    CHECK(std::abs(renyi2_cov(ComplexMatrix::Identity(6, 6), gamma, s).value) <= 1e-12);
  }
  const auto u = sample_circuit(brickwall_geometry(6), 4, RngStream{1, 1}).u;
  CHECK(renyi2_eig(u, gamma, 0.0).value == 0.0);
  CHECK(renyi2_eig(u, gamma, 0.0).spectrum.size() == 3);
  CHECK(renyi2_cov(u, gamma, 0.0).spectrum.empty());
}

TEST_CASE("real orthogonal circuits carry no entanglement") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd a(8, 8);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = g(rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
    CHECK(renyi2_eig(q.cast<cplx>(), random_subsystem(8, rng), 1.5).value <= 1e-9);
  }
}

TEST_CASE("eig and cov routes agree; purity symmetry holds") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> half_n(1, 8);
  std::uniform_int_distribution<std::size_t> depth(0, 20);
  const double squeezings[] = {0.3, 1.0, 2.0};
  for (std::uint64_t t = 0; t < 100; ++t) {
    const std::size_t n = 2 * half_n(rng);
    const auto u = sample_circuit(brickwall_geometry(n), depth(rng), RngStream{77, t}).u;
    const auto gamma = random_subsystem(n, rng);
    const double s = squeezings[t % 3];
    const double eig = renyi2_eig(u, gamma, s).value;
    CHECK(std::abs(eig - renyi2_cov(u, gamma, s).value) <= 1e-8);
    CHECK(std::abs(eig - renyi2_eig(u, gamma.complement(), s).value) <= 1e-8);
    CHECK(eig <= static_cast<double>(gamma.size()) * std::log(std::cosh(2 * s)) + 1e-9);
  }
}

TEST_CASE("series route converges upward to the eig route") {
  const auto u = sample_circuit(brickwall_geometry(8), 6, RngStream{5, 0}).u;
  const auto gamma = Subsystem::first_k(8, 4);
  const double target = renyi2_eig(u, gamma, 0.5).value;
  double previous = 0.0;
  for (std::size_t l = 1; l <= 64; ++l) {
    const double v = renyi2_series(u, gamma, 0.5, l).value;
    CHECK(v >= previous - 1e-15);
    previous = v;
  }
  CHECK(std::abs(previous - target) <= 1e-6);
  CHECK(renyi2_series(u, gamma, 0.5, 64).series_terms == 64);
  for (std::size_t l : {1, 5, 30}) CHECK(renyi2_series(ComplexMatrix::Identity(8, 8), gamma, 0.5, l).value <= 1e-14);
}

TEST_CASE("Lipschitz bound on random pairs") {
  Engine rng = RngStream{8, 0}.engine();
  std::normal_distribution<double> g;
  const auto gamma = Subsystem::first_k(16, 8);
  const double s = 1.0;
  const double constant = 2.0 * std::sqrt(8.0) * std::pow(std::sinh(2 * s), 2);
  for (int rep = 0; rep < 100; ++rep) {
    const ComplexMatrix u = haar_unitary(16, rng);
    ComplexMatrix noise(16, 16);
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = {g(rng), g(rng)};
    const double scale = std::pow(10.0, -1.0 - 3.0 * (rep % 4) / 3.0);
    Eigen::HouseholderQR<ComplexMatrix> qr(u + scale * noise);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < 16; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
    const double lhs = std::abs(renyi2_eig(u, gamma, s).value - renyi2_eig(q, gamma, s).value);
    CHECK(lhs <= constant * hs_norm(u - q) + 1e-9);
  }
}

TEST_CASE("renyi2 input validation") {
  const auto gamma = Subsystem::first_k(4, 2);
  CHECK_THROWS_AS(renyi2_eig(ComplexMatrix::Identity(4, 4), gamma, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(renyi2_eig(ComplexMatrix::Identity(6, 6), gamma, 1.0), std::invalid_argument);
  ComplexMatrix bad = ComplexMatrix::Identity(4, 4);
  bad(0, 0) = 1.1;
  CHECK_THROWS_AS(renyi2_eig(bad, gamma, 1.0), NumericError);
  CHECK_THROWS_AS(renyi2_cov(bad, gamma, 1.0), NumericError);
}

TEST_CASE("inner boundary follows the zero pattern of UU^T") {
  CHECK(inner_boundary(ComplexMatrix::Identity(6, 6), Subsystem::first_k(6, 3)).empty());
  const auto g = brickwall_geometry(16);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto u = sample_circuit(g, d, RngStream{31, d}).u;
    const ComplexMatrix uut = u * u.transpose();
    const auto gamma = Subsystem::first_k(16, 8);
    const auto bdy = inner_boundary(uut, gamma);
    CHECK_FALSE(bdy.empty());
    for (std::size_t x : bdy) {
      CHECK(x < 8);
      CHECK(x + 4 * d >= 8);  // coupling reach of UU^T is 4d
    }
  }
}

TEST_CASE("brickwork box area") {
  const auto g = brickwork_d_geometry(4, 2);
  auto box = [&](std::size_t k1, std::size_t k2) {
    std::vector<std::size_t> modes;
    for (std::size_t x = 0; x < 16; ++x) {
      const auto c = brickwork_coordinates(x, 4, 2);
      if (c[0] < k1 && c[1] < k2) modes.push_back(x + 1);
    }
    return Subsystem::from_one_based(16, modes);
  };
  CHECK(brickwork_box_area(g, box(2, 2)) == std::optional<std::size_t>(4));
  CHECK(brickwork_box_area(g, box(4, 2)) == std::optional<std::size_t>(4));
  CHECK(brickwork_box_area(g, box(1, 3)) == std::optional<std::size_t>(4));
  CHECK(brickwork_box_area(g, Subsystem::from_one_based(16, {1, 16})) == std::nullopt);
}

TEST_CASE("check_bounds") {
  const auto g = brickwall_geometry(12);
  const auto zero = check_bounds(sample_circuit(g, 0, RngStream{1, 0}), Subsystem::first_k(12, 6), 1.0);
  CHECK(zero.s2 <= 1e-12);
  REQUIRE(zero.worst_bound);
  CHECK(*zero.worst_bound == 0.0);
  CHECK(zero.all_ok());

  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto r = check_bounds(sample_circuit(g, 1 + t % 5, RngStream{2, t}), Subsystem::first_k(12, 1 + t % 11), 2.0);
    CHECK(r.all_ok());
    CHECK(r.worst_bound.has_value());
  }
  const auto mid = check_bounds(sample_circuit(g, 2, RngStream{3, 0}), Subsystem::from_one_based(12, {5, 6}), 1.0);
  CHECK_FALSE(mid.worst_bound.has_value());
  CHECK(mid.all_ok());

  const auto bw = brickwork_d_geometry(4, 2);
  std::vector<std::size_t> corner;
  for (std::size_t x = 0; x < 16; ++x) {
    const auto c = brickwork_coordinates(x, 4, 2);
    if (c[0] < 2 && c[1] < 2) corner.push_back(x + 1);
  }
  const auto r = check_bounds(sample_circuit(bw, 2, RngStream{4, 0}), Subsystem::from_one_based(16, corner), 1.0);
  REQUIRE(r.worst_bound);
  CHECK(*r.worst_bound == doctest::Approx(4.0 * 2 * 4 * std::log(std::cosh(2.0))));
  CHECK(r.all_ok());
}
