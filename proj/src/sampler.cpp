#include "sampler.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace linopt {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Engine RngStream::engine() const {
  return Engine(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

RngStream RngStream::derive(std::uint64_t id) const {
  return {seed, splitmix64(stream * 0xd1342543de82ef95ULL + splitmix64(id))};
}

namespace {

double standard_normal(Engine& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

double uniform_angle(Engine& rng) {
  std::uniform_real_distribution<double> dist(0.0, 2.0 * std::numbers::pi);
  return dist(rng);
}

}  // namespace

Eigen::Matrix2cd haar_u2(Engine& rng) {
  // A uniform point (a, b) on the unit sphere of C^2 fixes a Haar element of
  // SU(2); an independent uniform global phase lifts it to Haar on U(2).
  double g[4];
  for (double& v : g) v = standard_normal(rng);
  const double r = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
  const cplx a(g[0] / r, g[1] / r);
  const cplx b(g[2] / r, g[3] / r);
  const cplx phase = std::polar(1.0, uniform_angle(rng));
  Eigen::Matrix2cd u;
  u << phase * a, -phase * std::conj(b), phase * b, phase * std::conj(a);
  return u;
}

cplx haar_phase(Engine& rng) { return std::polar(1.0, uniform_angle(rng)); }

ComplexMatrix sample_layer(const Pairing& pairing, Engine& rng) {
  const auto n = static_cast<Eigen::Index>(pairing.modes());
  ComplexMatrix layer = ComplexMatrix::Zero(n, n);
  for (const Block& b : pairing.blocks()) {
    const auto i = static_cast<Eigen::Index>(b.first);
    const auto j = static_cast<Eigen::Index>(b.second);
    if (b.is_pair()) {
      const Eigen::Matrix2cd u = haar_u2(rng);
      layer(i, i) = u(0, 0);
      layer(i, j) = u(0, 1);
      layer(j, i) = u(1, 0);
      layer(j, j) = u(1, 1);
    } else {
      layer(i, i) = haar_phase(rng);
    }
  }
  return layer;
}

void apply_random_layer(RowMajorMatrix& u, const Pairing& pairing, Engine& rng) {
  const Eigen::Index cols = u.cols();
  for (const Block& b : pairing.blocks()) {
    const auto i = static_cast<Eigen::Index>(b.first);
    if (b.is_pair()) {
      const auto j = static_cast<Eigen::Index>(b.second);
      const Eigen::Matrix2cd g = haar_u2(rng);
      cplx* ri = u.row(i).data();
      cplx* rj = u.row(j).data();
      for (Eigen::Index c = 0; c < cols; ++c) {
        const cplx xi = ri[c];
        const cplx xj = rj[c];
        ri[c] = g(0, 0) * xi + g(0, 1) * xj;
        rj[c] = g(1, 0) * xi + g(1, 1) * xj;
      }
    } else {
      u.row(i) *= haar_phase(rng);
    }
  }
}

CircuitGrower::CircuitGrower(const GeometrySpec& geometry, RngStream stream)
    : geometry_(&geometry),
      stream_(stream),
      rng_(stream.engine()),
      u_(RowMajorMatrix::Identity(static_cast<Eigen::Index>(geometry.n),
                                  static_cast<Eigen::Index>(geometry.n))) {}

void CircuitGrower::advance(std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s) {
    for (const Pairing& layer : geometry_->layers) apply_random_layer(u_, layer, rng_);
    ++depth_;
  }
}

CircuitSample CircuitGrower::snapshot() const {
  CircuitSample out;
  out.u = u_;
  out.geometry = *geometry_;
  out.depth = depth_;
  out.stream = stream_;
  out.defect = unitarity_defect(out.u);
  if (!(out.defect <= kMaxCircuitDefect)) {
    throw NumericError(fmt::format("circuit unitarity defect {:.3e} exceeds {:.1e} at depth {}",
                                   out.defect, kMaxCircuitDefect, depth_));
  }
  return out;
}

CircuitSample sample_circuit(const GeometrySpec& geometry, std::size_t depth, RngStream stream) {
  CircuitGrower grower(geometry, stream);
  grower.advance(depth);
  return grower.snapshot();
}

ComplexMatrix haar_unitary(std::size_t n, Engine& rng) {
  if (n == 0) throw std::invalid_argument("haar_unitary: n must be at least 1");
  const auto dim = static_cast<Eigen::Index>(n);
  ComplexMatrix z(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      z(r, c) = cplx(re, im);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    const cplx ph = mag > 0.0 ? r(j, j) / mag : cplx(1.0, 0.0);
    q.col(j) *= ph;
  }
  return q;
}

}  // namespace linopt
