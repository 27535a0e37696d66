#include "doctest.h"

#include <stdexcept>

#include <cmath>

#include "compress.hpp"
#include "sampler.hpp"

using namespace linopt;

TEST_CASE("reconstruct embeds gates in order") {
  Gate swap{GateKind::two_mode, 1, Eigen::Matrix2cd::Zero(), {}};
  swap.block << 0.0, 1.0, 1.0, 0.0;
  Gate phase{GateKind::phase, 1, Eigen::Matrix2cd::Identity(), cplx(0, 1)};
  // phase on mode 1, then swap modes 1 and 2: the phase ends up on row 2
  const ComplexMatrix u = reconstruct({phase, swap}, 3);
  CHECK(u(2, 1) == cplx(0, 1));
  CHECK(u(1, 2) == cplx(1, 0));
  CHECK(u(0, 0) == cplx(1, 0));
  CHECK_THROWS_AS(reconstruct({Gate{GateKind::two_mode, 2}}, 3), std::invalid_argument);
}

TEST_CASE("Reck decomposition is exact") {
  Engine rng = RngStream{1, 0}.engine();
  for (std::size_t n : {2, 3, 8, 17}) {
    const ComplexMatrix u = haar_unitary(n, rng);
    const auto r = reck_decompose(u);
    CHECK(r.gate_count == n * (n - 1) / 2);
    CHECK(r.hs_error <= 1e-10);
    CHECK(hs_norm(reconstruct(r.gates, n) - u) <= 1e-10);
    CHECK(r.close_diag_ok);
    for (const auto& g : r.gates) {
      if (g.kind == GateKind::two_mode) CHECK(unitarity_defect(g.block) <= 1e-12);
      else CHECK(std::abs(std::abs(g.phase) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("banded compression of shallow circuits") {
  const auto g = brickwall_geometry(24);
  for (std::size_t d : {1, 2, 3}) {
    const auto u = sample_circuit(g, d, RngStream{2, d}).u;
    const auto r = banded_compress(u, lightcone_band(g, d));
    CHECK(r.eps_hat <= 1e-12);
    CHECK(r.hs_error <= 1e-9);
    CHECK(r.gate_count <= banded_gate_bound(24, r.band));
    CHECK(hs_norm(reconstruct(r.gates, 24) - u) == doctest::Approx(r.hs_error).epsilon(1e-6).scale(1e-9));
  }
  // full band reproduces the exact decomposition
  Engine rng = RngStream{3, 0}.engine();
  const ComplexMatrix h = haar_unitary(10, rng);
  CHECK(banded_compress(h, 9).hs_error <= 1e-10);
  // identity needs no rotations
  CHECK(banded_compress(ComplexMatrix::Identity(6, 6), 2).gate_count == 0);
}

TEST_CASE("truncated band: error bookkeeping") {
  Engine rng = RngStream{4, 0}.engine();
  const ComplexMatrix h = haar_unitary(12, rng);
  const auto r = banded_compress(h, 3);
  CHECK(r.eps_hat > 0.1);
  CHECK(r.hs_error > 0.0);
  CHECK(r.diag_profile.size() == 12);
  CHECK(hs_norm(reconstruct(r.gates, 12) - h) == doctest::Approx(r.hs_error).epsilon(1e-9));
}

TEST_CASE("bandwidth and gate counts") {
  CHECK(effective_bandwidth(64, 2.0, 2.0, 64) == 33);
  CHECK(effective_bandwidth(64, 2.0, 1.0, 64) == 17);
  CHECK(effective_bandwidth(64, 2.0, 10.0, 64) == 63);
  CHECK(effective_bandwidth(2, 2.0, 0.01, 64) == 1);
  CHECK_THROWS_AS(effective_bandwidth(1, 2.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(effective_bandwidth(8, 0.5, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(effective_bandwidth(8, 2.0, 0.0, 8), std::invalid_argument);
  CHECK(banded_gate_bound(64, 33) == 1551);
  CHECK(banded_gate_bound(8, 7) == 28);
  const auto naive = gate_count_naive(brickwall_geometry(64), 64);
  CHECK(naive.two_mode == 4032);
  CHECK(naive.phase == 128);
  CHECK_THROWS(gate_count_naive(octahedral_geometry(), 2));
}

TEST_CASE("compression input validation") {
  ComplexMatrix bad = ComplexMatrix::Identity(4, 4);
  bad(1, 0) = 0.5;
  CHECK_THROWS_AS(banded_compress(bad, 2), std::invalid_argument);
  CHECK_THROWS_AS(banded_compress(ComplexMatrix::Identity(4, 4), 0), std::invalid_argument);
  CHECK_THROWS_AS(banded_compress(ComplexMatrix::Identity(4, 4), 4), std::invalid_argument);
}
