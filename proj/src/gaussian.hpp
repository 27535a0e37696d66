#pragma once

#include <optional>
#include <string>
#include <vector>

#include "numerics.hpp"
#include "sampler.hpp"

namespace linopt {

/// Subsystem Gamma as sorted, distinct 0-based mode indices.
class Subsystem {
 public:
  static Subsystem from_one_based(std::size_t n, std::vector<std::size_t> modes);
  static Subsystem first_k(std::size_t n, std::size_t k);

  const std::vector<std::size_t>& modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  std::size_t total_modes() const { return n_; }
  bool contains(std::size_t x) const;
  /// Empty complement is not a valid Subsystem; callers check size() < n.
  Subsystem complement() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> modes_;
  std::vector<bool> member_;
};

enum class EntropyRoute { eig, cov, series };

std::string to_string(EntropyRoute route);

struct EntropyResult {
  double value = 0.0;  // nats
  EntropyRoute route = EntropyRoute::eig;
  std::vector<double> spectrum;  // eigenvalues of W, empty for the cov route
  std::size_t series_terms = 0;
};

constexpr double kUnitaryInputTol = 1e-8;

/// W = V V^dagger with V = P_Gamma (U U^T) P_Gamma^T.
ComplexMatrix build_w(const ComplexMatrix& u, const Subsystem& gamma);

/// Production route: spectrum of W plugged into the log-cosh/tanh formula.
EntropyResult renyi2_eig(const ComplexMatrix& u, const Subsystem& gamma, double s);

/// Independent route: half log-determinant of the reduced covariance matrix.
EntropyResult renyi2_cov(const ComplexMatrix& u, const Subsystem& gamma, double s);

/// Partial sums of the power series in tanh^2(2s) using Tr W^l, l = 1..terms.
EntropyResult renyi2_series(const ComplexMatrix& u, const Subsystem& gamma, double s,
                            std::size_t terms);

/// Modes x in Gamma with a nonzero entry <x|U U^T|y> for some y outside Gamma.
/// Entries with modulus <= 1e-13 count as zero.
std::vector<std::size_t> inner_boundary(const ComplexMatrix& uut, const Subsystem& gamma);

/// Boundary area sum_j 1[k_j < m] prod_{l != j} k_l of a box subsystem
/// {x : x_j <= k_j} in a D-dimensional brickwork; nullopt if Gamma is not such a box.
std::optional<std::size_t> brickwork_box_area(const GeometrySpec& geometry,
                                              const Subsystem& gamma);

struct BoundReport {
  double s2 = 0.0;
  double log_cosh = 0.0;
  /// Light-cone bound: 4d log cosh 2s for prefix/suffix cuts of a brickwall,
  /// 4d A_Gamma log cosh 2s for box cuts of a brickwork; absent otherwise.
  std::optional<double> worst_bound;
  double trivial_bound = 0.0;
  double boundary_bound = 0.0;
  std::size_t boundary_size = 0;
  bool worst_ok = true;
  bool trivial_ok = true;
  bool boundary_ok = true;
  bool all_ok() const { return worst_ok && trivial_ok && boundary_ok; }
};

constexpr double kBoundSlack = 1e-9;

BoundReport check_bounds(const CircuitSample& sample, const Subsystem& gamma, double s);

}  // namespace linopt
