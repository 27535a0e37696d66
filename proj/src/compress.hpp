#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "geometry.hpp"
#include "numerics.hpp"

namespace linopt {

enum class GateKind { two_mode, phase };

/// Nearest-neighbour gate. A two-mode gate acts on modes (mode, mode + 1),
/// 0-based; a phase gate on `mode` alone.
struct Gate {
  GateKind kind = GateKind::phase;
  std::size_t mode = 0;
  Eigen::Matrix2cd block = Eigen::Matrix2cd::Identity();
  cplx phase{1.0, 0.0};
};

/// Product G_K ... G_1 of gates listed in application order, embedded in
/// the n x n identity.
ComplexMatrix reconstruct(const std::vector<Gate>& gates, std::size_t n);

struct CompressionResult {
  std::size_t n = 0;
  std::vector<Gate> gates;  // application order
  std::size_t band = 0;
  double hs_error = 0.0;        // ||D~ Phi - I||_hs = ||U - U~||_hs
  std::size_t gate_count = 0;   // two-mode gates actually emitted
  std::vector<double> diag_profile;  // |D~_jj|^2
  double eps_hat = 0.0;   // sqrt of the largest out-of-band row mass of the input
  double max_left_mass = 0.0;  // largest left-of-diagonal row mass of D~, squared norm
  bool close_diag_ok = true;   // |D~_{n-j,n-j}|^2 >= 1 - (j+1) eps_hat^2 for all j
};

constexpr double kSkipRotation = 1e-15;

/// Exact Reck-style decomposition: every below-diagonal entry is zeroed,
/// giving exactly n(n-1)/2 two-mode gates plus n phases.
CompressionResult reck_decompose(const ComplexMatrix& u);

/// Zeroes only the entries (r, m) with 0 < r - m <= w, bottom row first and
/// left to right within a row, each by a rotation of columns m, m + 1.
/// Rotations whose target is already below kSkipRotation are skipped.
CompressionResult banded_compress(const ComplexMatrix& u, std::size_t w);

/// ceil(c_band * sqrt(d ln d)) capped at n - 1. kappa only selects the
/// target accuracy d^-kappa, which the constant c_band is meant to absorb.
std::size_t effective_bandwidth(std::size_t depth, double kappa, double c_band, std::size_t n);

/// n w - w (w + 1) / 2
std::size_t banded_gate_bound(std::size_t n, std::size_t w);

struct NaiveGateCount {
  std::size_t two_mode = 0;
  std::size_t phase = 0;
};

/// Gates of the sampled brickwall circuit itself: d (n - 1) two-mode gates
/// and 2d single-mode phases.
NaiveGateCount gate_count_naive(const GeometrySpec& geometry, std::size_t depth);

}  // namespace linopt
