#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "numerics.hpp"
#include "sampler.hpp"

namespace linopt {

/// Lazy walk of one layer: stay with probability 1/2, hop to the partner
/// with probability 1/2. Singletons stay put.
RealMatrix layer_kernel(const Pairing& pairing);

struct WalkKernel {
  std::size_t n = 0;
  RealMatrix p;  // row = current state, column = next state
  std::vector<RealMatrix> factors;
};

/// P = S(pi_1) S(pi_2) ... S(pi_M), layer 1 applied first.
WalkKernel step_kernel(const GeometrySpec& geometry);

/// Row `start` (0-based) of P^d.
std::vector<double> walk_distribution(const WalkKernel& kernel, std::size_t start, std::size_t depth);

double tv_distance(std::span<const double> p, std::span<const double> q);

/// Reflection of Z onto {1..n} (1-based result) through x mod 2n.
std::size_t reflect_map(std::int64_t x, std::size_t n);

/// One step of the unreflected brickwall walk on Z.
std::int64_t z_walk_step(std::int64_t y, Engine& rng);

struct ReflectionReport {
  std::size_t n = 0;
  std::size_t depth = 0;
  std::size_t start = 0;  // 1-based
  std::size_t trials = 0;
  std::vector<double> empirical;
  std::vector<double> exact;
  double tv_gap = 0.0;
  /// Half the summed binomial standard errors of the exact law at `trials`.
  double stat_bound = 0.0;
  bool pass = false;
};

/// Simulates the Z-walk from `start`, reflects it, and compares with the
/// brickwall kernel power. Passes when tv_gap <= 5 * stat_bound.
ReflectionReport verify_reflection(std::size_t n, std::size_t depth, std::size_t trials,
                                   std::size_t start, RngStream stream);

/// Max over start states of the TV distance of P^t(y, .) to uniform, for
/// t = 0..t_max, stopping early once it drops to `epsilon` (inclusive).
std::vector<double> mixing_curve(const GeometrySpec& geometry, double epsilon, std::size_t t_max);

/// Smallest t <= t_max with max_y ||P^t(y,.) - uniform||_TV <= epsilon.
std::optional<std::size_t> mixing_time(const GeometrySpec& geometry, double epsilon,
                                       std::size_t t_max);

/// Pi-meeting statistics of two independent walks resolved layer by layer.
/// Times are counted in layers K; fractional time is K / M.
class MeetingStudy {
 public:
  /// Simulates `trials` pair walks for every unordered start pair x < y
  /// (0-based), censoring at max_layers. Pairs with x == y meet at the
  /// first layer with certainty and are not simulated.
  MeetingStudy(const GeometrySpec& geometry, std::size_t trials, std::size_t max_layers,
               RngStream stream, unsigned threads = 1);

  struct PairTail {
    std::size_t x = 0;  // 1-based
    std::size_t y = 0;
    double tail = 0.0;
    double stderr_tail = 0.0;
  };

  /// Estimates of P[T > layers / M] for all simulated start pairs.
  std::vector<PairTail> tails(std::size_t layers) const;
  double max_tail(std::size_t layers) const;
  /// Smallest layer count whose max tail is <= epsilon, or nullopt when the
  /// censoring horizon is too short to tell.
  std::optional<std::size_t> meeting_layers(double epsilon) const;

  std::size_t layers_per_step() const { return layers_per_step_; }
  std::size_t max_layers() const { return max_layers_; }
  std::size_t trials() const { return trials_; }

 private:
  std::size_t n_ = 0;
  std::size_t layers_per_step_ = 1;
  std::size_t max_layers_ = 0;
  std::size_t trials_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> starts_;
  std::vector<std::vector<std::uint32_t>> sorted_times_;  // per start pair
};

/// Layer count at which two walks started at x, y (0-based) first share a block.
std::uint32_t sample_meeting_layer(const GeometrySpec& geometry, std::size_t x, std::size_t y,
                                   std::size_t max_layers, Engine& rng);

/// Exact P[T > layers / M] for starts x, y (0-based) by evolving the
/// not-yet-met pair distribution.
double meeting_tail_exact(const GeometrySpec& geometry, std::size_t x, std::size_t y,
                          std::size_t layers);

/// Exact pi-meeting time in layers: smallest K with max over start pairs of
/// P[T > K/M] <= epsilon.
std::optional<std::size_t> meeting_layers_exact(const GeometrySpec& geometry, double epsilon,
                                                std::size_t max_layers);

struct BosonWalkReport {
  std::size_t n = 0;
  std::size_t depth = 0;
  std::size_t trials = 0;
  RealMatrix mc_mean;    // (x, y) -> mean |U_xy|^2
  RealMatrix mc_stderr;
  RealMatrix exact;      // (x, y) -> P_y[Z_d = x]
  RealMatrix z;
  double max_abs_z = 0.0;
};

/// Monte Carlo check of E|U_xy|^2 = P_y[Z_d = x] for all (x, y) at once.
BosonWalkReport verify_boson_rw(const GeometrySpec& geometry, std::size_t depth,
                                std::size_t trials, RngStream stream, unsigned threads = 1);

}  // namespace linopt
