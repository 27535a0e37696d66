#pragma once

#include <cstdint>
#include <random>

#include "geometry.hpp"
#include "numerics.hpp"

namespace linopt {

using Engine = std::mt19937_64;

/// Identifies one reproducible random sequence. Streams for a trial, or for
/// any nested index, come from `derive`, which mixes the indices with
/// splitmix64 so that neighbouring ids give unrelated sequences.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  Engine engine() const;
  RngStream derive(std::uint64_t id) const;
};

std::uint64_t splitmix64(std::uint64_t x);

Eigen::Matrix2cd haar_u2(Engine& rng);
cplx haar_phase(Engine& rng);

/// Dense n x n matrix of one random layer on `pairing`.
ComplexMatrix sample_layer(const Pairing& pairing, Engine& rng);

/// Row-major storage keeps the row mixing in layer application contiguous.
using RowMajorMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Left-multiplies `u` in place by a freshly sampled layer on `pairing`.
/// Draw order: blocks in pairing order, one haar_u2 per pair, one phase per
/// singleton. sample_layer consumes the engine identically.
void apply_random_layer(RowMajorMatrix& u, const Pairing& pairing, Engine& rng);

struct CircuitSample {
  ComplexMatrix u;
  GeometrySpec geometry;
  std::size_t depth = 0;
  RngStream stream;
  double defect = 0.0;
};

constexpr double kMaxCircuitDefect = 1e-8;

/// Incrementally grows U = U^(d) ... U^(1) one step at a time, so that a
/// single realization can be observed at several depths.
class CircuitGrower {
 public:
  CircuitGrower(const GeometrySpec& geometry, RngStream stream);

  void advance(std::size_t steps = 1);
  std::size_t depth() const { return depth_; }
  const RowMajorMatrix& matrix() const { return u_; }
  /// Copies out the current unitary after checking its defect.
  CircuitSample snapshot() const;

 private:
  const GeometrySpec* geometry_;
  RngStream stream_;
  Engine rng_;
  RowMajorMatrix u_;
  std::size_t depth_ = 0;
};

/// Depth-d circuit. Throws NumericError when the product drifts beyond
/// kMaxCircuitDefect.
CircuitSample sample_circuit(const GeometrySpec& geometry, std::size_t depth, RngStream stream);

/// Haar-distributed n x n unitary (QR of a complex Ginibre matrix with the
/// phases of R's diagonal moved into Q).
ComplexMatrix haar_unitary(std::size_t n, Engine& rng);

}  // namespace linopt
