#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gaussian.hpp"
#include "geometry.hpp"
#include "numerics.hpp"
#include "sampler.hpp"

namespace linopt {

struct MomentEstimate {
  double value = 0.0;
  double stderr_value = 0.0;  // sample standard deviation / sqrt(trials)
  std::size_t trials = 0;
  std::string target;
};

enum class MomentSide { rows, cols };

struct MomentOptions {
  bool fourth = true;  // O(n^3) per trial; off for large-n heatmaps
};

/// Every moment target for one (geometry, d), estimated on a single shared
/// set of circuit samples. Indices are 0-based.
class MomentTables {
 public:
  MomentTables(const GeometrySpec& geometry, std::size_t depth, std::size_t trials,
               RngStream stream, unsigned threads = 1, MomentOptions options = {});

  std::size_t n() const { return n_; }
  std::size_t depth() const { return depth_; }
  std::size_t trials() const { return trials_; }
  bool has_fourth() const { return options_.fourth; }

  /// E|U_xy|^2
  MomentEstimate second(std::size_t x, std::size_t y) const;
  /// rows: E|U_ax|^2 |U_ay|^2, cols: E|U_xa|^2 |U_ya|^2
  MomentEstimate fourth(MomentSide side, std::size_t alpha, std::size_t x, std::size_t y) const;
  /// E|<x|UU^T|y>|^2
  MomentEstimate uut_second(std::size_t x, std::size_t y) const;
  /// E|<x|UU^T|y>|, the heatmap quantity
  double uut_abs_mean(std::size_t x, std::size_t y) const;
  /// Paired estimate of E|<x|UU^T|y>|^2 - sum_a E|U_xa|^2 |U_ya|^2, which
  /// vanishes identically.
  MomentEstimate uut_identity_gap(std::size_t x, std::size_t y) const;

 private:
  std::size_t index2(std::size_t x, std::size_t y) const { return x * n_ + y; }
  std::size_t index3(std::size_t a, std::size_t x, std::size_t y) const {
    return (a * n_ + x) * n_ + y;
  }

  std::size_t n_ = 0;
  std::size_t depth_ = 0;
  std::size_t trials_ = 0;
  MomentOptions options_;
  // mean / stderr pairs, flattened
  std::vector<double> second_mean_, second_se_;
  std::vector<double> uut_mean_, uut_se_;
  std::vector<double> uut_abs_;
  std::vector<double> gap_mean_, gap_se_;
  std::vector<double> rows_mean_, rows_se_;
  std::vector<double> cols_mean_, cols_se_;
};

MomentEstimate second_moment(const GeometrySpec& geometry, std::size_t depth, std::size_t x,
                             std::size_t y, std::size_t trials, RngStream stream,
                             unsigned threads = 1);

MomentEstimate fourth_moment(const GeometrySpec& geometry, std::size_t depth, std::size_t alpha,
                             std::size_t x, std::size_t y, MomentSide side, std::size_t trials,
                             RngStream stream, unsigned threads = 1);

MomentEstimate uut_second_moment(const GeometrySpec& geometry, std::size_t depth, std::size_t x,
                                 std::size_t y, std::size_t trials, RngStream stream,
                                 unsigned threads = 1);

/// Mean and stderr of S_2 over Haar unitaries on n modes.
MomentEstimate haar_reference(std::size_t n, const Subsystem& gamma, double s,
                              std::size_t trials, RngStream stream, unsigned threads = 1);

/// Estimate of E|U_ax|^2 |U_ay|^2 over Haar unitaries, for the Weingarten check.
MomentEstimate haar_fourth_moment(std::size_t n, std::size_t alpha, std::size_t x, std::size_t y,
                                  std::size_t trials, RngStream stream);

}  // namespace linopt
