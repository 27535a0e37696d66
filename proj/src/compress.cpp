#include "compress.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace linopt {

ComplexMatrix reconstruct(const std::vector<Gate>& gates, std::size_t n) {
  ComplexMatrix out = ComplexMatrix::Identity(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
  for (const Gate& g : gates) {
    const auto i = static_cast<Eigen::Index>(g.mode);
    if (g.kind == GateKind::phase) {
      if (g.mode >= n) throw std::invalid_argument(fmt::format("gate mode {} out of range", g.mode + 1));
      out.row(i) *= g.phase;
      continue;
    }
    if (g.mode + 1 >= n) {
      throw std::invalid_argument(
          fmt::format("gate modes ({}, {}) out of range", g.mode + 1, g.mode + 2));
    }
    const Eigen::RowVectorXcd r0 = out.row(i);
    const Eigen::RowVectorXcd r1 = out.row(i + 1);
    out.row(i) = g.block(0, 0) * r0 + g.block(0, 1) * r1;
    out.row(i + 1) = g.block(1, 0) * r0 + g.block(1, 1) * r1;
  }
  return out;
}

namespace {

CompressionResult sweep(const ComplexMatrix& u, std::size_t w, bool skip_small) {
  if (u.rows() != u.cols() || u.rows() < 1) {
    throw std::invalid_argument("compress: matrix must be square and nonempty");
  }
  const auto n = static_cast<std::size_t>(u.rows());
  const double defect = unitarity_defect(u);
  if (!(defect <= 1e-8)) {
    throw std::invalid_argument(fmt::format("compress: input not unitary (defect {:.3e})", defect));
  }
  if (n > 1 && (w < 1 || w > n - 1)) {
    throw std::invalid_argument(fmt::format("compress: band {} outside [1, {}]", w, n - 1));
  }

  CompressionResult res;
  res.n = n;
  res.band = w;

  double eps2 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double mass = 0.0;
    for (std::size_t c = 0; c + w < r; ++c) {
      mass += std::norm(u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
    eps2 = std::max(eps2, mass);
  }
  res.eps_hat = std::sqrt(eps2);

  ComplexMatrix d = u;
  std::vector<Gate> rotations;
  for (std::size_t r = n; r-- > 1;) {
    const auto ri = static_cast<Eigen::Index>(r);
    for (std::size_t m = r > w ? r - w : 0; m < r; ++m) {
      const auto mi = static_cast<Eigen::Index>(m);
      const cplx a = d(ri, mi);
      const cplx b = d(ri, mi + 1);
      if (skip_small && std::abs(a) < kSkipRotation) continue;
      const double rho = std::hypot(std::abs(a), std::abs(b));
      Eigen::Matrix2cd t = Eigen::Matrix2cd::Identity();
      if (rho > 0.0) {
        t << b / rho, std::conj(a) / rho, -a / rho, std::conj(b) / rho;
      }
      const Eigen::VectorXcd c0 = d.col(mi);
      const Eigen::VectorXcd c1 = d.col(mi + 1);
      d.col(mi) = t(0, 0) * c0 + t(1, 0) * c1;
      d.col(mi + 1) = t(0, 1) * c0 + t(1, 1) * c1;
      d(ri, mi) = 0.0;
      rotations.push_back({GateKind::two_mode, m, t.adjoint(), cplx{1.0, 0.0}});
    }
  }

  res.diag_profile.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto ji = static_cast<Eigen::Index>(j);
    res.diag_profile[j] = std::norm(d(ji, ji));
    double left = 0.0;
    for (std::size_t c = 0; c < j; ++c) left += std::norm(d(ji, static_cast<Eigen::Index>(c)));
    res.max_left_mass = std::max(res.max_left_mass, left);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double floor = 1.0 - static_cast<double>(j + 1) * eps2;
    if (res.diag_profile[n - 1 - j] < floor - 1e-10) res.close_diag_ok = false;
  }

  // Phi = diag(conj(D_jj)/|D_jj|) makes the diagonal real and nonnegative.
  std::vector<Gate> phases;
  for (std::size_t j = 0; j < n; ++j) {
    const auto ji = static_cast<Eigen::Index>(j);
    const cplx djj = d(ji, ji);
    const cplx phi = std::abs(djj) > 0.0 ? std::conj(djj) / std::abs(djj) : cplx{1.0, 0.0};
    d.col(ji) *= phi;
    phases.push_back({GateKind::phase, j, Eigen::Matrix2cd::Identity(), std::conj(phi)});
  }
  res.hs_error = hs_norm(d - ComplexMatrix::Identity(d.rows(), d.cols()));

  // U~ = Phi^dagger T_K^dagger ... T_1^dagger, so T_1^dagger is applied first.
  res.gate_count = rotations.size();
  res.gates = std::move(rotations);
  res.gates.insert(res.gates.end(), phases.begin(), phases.end());
  return res;
}

}  // namespace

CompressionResult reck_decompose(const ComplexMatrix& u) {
  const auto n = static_cast<std::size_t>(std::max<Eigen::Index>(u.rows(), 1));
  return sweep(u, n > 1 ? n - 1 : 0, false);
}

CompressionResult banded_compress(const ComplexMatrix& u, std::size_t w) {
  return sweep(u, w, true);
}

std::size_t effective_bandwidth(std::size_t depth, double kappa, double c_band, std::size_t n) {
  if (depth < 2) throw std::invalid_argument("effective_bandwidth: depth must be >= 2");
  if (!(kappa >= 1.0)) throw std::invalid_argument("effective_bandwidth: kappa must be >= 1");
  if (!(c_band > 0.0)) throw std::invalid_argument("effective_bandwidth: c_band must be positive");
  if (n < 2) throw std::invalid_argument("effective_bandwidth: n must be >= 2");
  const double d = static_cast<double>(depth);
  const auto w = static_cast<std::size_t>(std::ceil(c_band * std::sqrt(d * std::log(d))));
  return std::clamp<std::size_t>(w, 1, n - 1);
}

std::size_t banded_gate_bound(std::size_t n, std::size_t w) {
  return n * w - w * (w + 1) / 2;
}

NaiveGateCount gate_count_naive(const GeometrySpec& geometry, std::size_t depth) {
  if (geometry.kind != GeometryKind::brickwall1d) {
    throw std::invalid_argument("gate_count_naive: brickwall geometry required");
  }
  return {depth * (geometry.n - 1), 2 * depth};
}

}  // namespace linopt
