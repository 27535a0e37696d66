#include "moments.hpp"

#include <stdexcept>

#include <fmt/format.h>

#include "parallel.hpp"
#include "stats.hpp"

namespace linopt {

namespace {

void require_trials(std::size_t trials, std::size_t minimum, const char* who) {
  if (trials < minimum) {
    throw std::invalid_argument(fmt::format("{}: trials must be >= {}", who, minimum));
  }
}

void check_mode(std::size_t x, std::size_t n, const char* who) {
  if (x >= n) throw std::invalid_argument(fmt::format("{}: mode {} out of range", who, x + 1));
}

// Per-block accumulators for every table.
struct Accumulators {
  std::vector<RunningStats> second, uut, uut_abs, gap, rows, cols;

  Accumulators(std::size_t n, bool fourth)
      : second(n * n), uut(n * n), uut_abs(n * n), gap(n * n) {
    if (fourth) {
      rows.resize(n * n * n);
      cols.resize(n * n * n);
    }
  }

  void merge(const Accumulators& other) {
    auto fold = [](std::vector<RunningStats>& a, const std::vector<RunningStats>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i].merge(b[i]);
    };
    fold(second, other.second);
    fold(uut, other.uut);
    fold(uut_abs, other.uut_abs);
    fold(gap, other.gap);
    fold(rows, other.rows);
    fold(cols, other.cols);
  }
};

void split(const std::vector<RunningStats>& stats, std::vector<double>& mean,
           std::vector<double>& se) {
  mean.resize(stats.size());
  se.resize(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    mean[i] = stats[i].mean;
    se[i] = stats[i].stderr_mean();
  }
}

}  // namespace

MomentTables::MomentTables(const GeometrySpec& geometry, std::size_t depth, std::size_t trials,
                           RngStream stream, unsigned threads, MomentOptions options)
    : n_(geometry.n), depth_(depth), trials_(trials), options_(options) {
  require_trials(trials, 2, "moments");
  const std::size_t n = n_;
  const std::size_t blocks = block_count(trials);
  std::vector<Accumulators> partial(blocks, Accumulators(n, options.fourth));

  parallel_for(blocks, threads, [&](std::size_t b) {
    Accumulators& acc = partial[b];
    RealMatrix sq(n, n);
    const std::size_t end = std::min(trials, (b + 1) * kTrialBlock);
    for (std::size_t t = b * kTrialBlock; t < end; ++t) {
      CircuitGrower grower(geometry, stream.derive(t));
      grower.advance(depth);
      const auto& u = grower.matrix();
      const ComplexMatrix uut = u * u.transpose();
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) sq(x, y) = std::norm(u(x, y));
      }
      // (sq sq^T)(x, y) = sum_a |U_xa|^2 |U_ya|^2
      const RealMatrix col_sum = sq * sq.transpose();
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          const std::size_t i = index2(x, y);
          const double uut_sq = std::norm(uut(x, y));
          acc.second[i].add(sq(x, y));
          acc.uut[i].add(uut_sq);
          acc.uut_abs[i].add(std::abs(uut(x, y)));
          acc.gap[i].add(uut_sq - col_sum(x, y));
        }
      }
      if (!options.fourth) continue;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t x = 0; x < n; ++x) {
          for (std::size_t y = 0; y < n; ++y) {
            acc.rows[index3(a, x, y)].add(sq(a, x) * sq(a, y));
            acc.cols[index3(a, x, y)].add(sq(x, a) * sq(y, a));
          }
        }
      }
    }
  });

  Accumulators total(n, options.fourth);
  for (const auto& p : partial) total.merge(p);
  split(total.second, second_mean_, second_se_);
  split(total.uut, uut_mean_, uut_se_);
  std::vector<double> unused;
  split(total.uut_abs, uut_abs_, unused);
  split(total.gap, gap_mean_, gap_se_);
  split(total.rows, rows_mean_, rows_se_);
  split(total.cols, cols_mean_, cols_se_);
}

MomentEstimate MomentTables::second(std::size_t x, std::size_t y) const {
  check_mode(x, n_, "second_moment");
  check_mode(y, n_, "second_moment");
  const std::size_t i = index2(x, y);
  return {second_mean_[i], second_se_[i], trials_, fmt::format("E|U_{},{}|^2", x + 1, y + 1)};
}

MomentEstimate MomentTables::fourth(MomentSide side, std::size_t alpha, std::size_t x,
                                    std::size_t y) const {
  if (!options_.fourth) throw std::logic_error("fourth moments were not collected");
  check_mode(alpha, n_, "fourth_moment");
  check_mode(x, n_, "fourth_moment");
  check_mode(y, n_, "fourth_moment");
  const std::size_t i = index3(alpha, x, y);
  if (side == MomentSide::rows) {
    return {rows_mean_[i], rows_se_[i], trials_,
            fmt::format("E|U_{0},{1}|^2|U_{0},{2}|^2", alpha + 1, x + 1, y + 1)};
  }
  return {cols_mean_[i], cols_se_[i], trials_,
          fmt::format("E|U_{1},{0}|^2|U_{2},{0}|^2", alpha + 1, x + 1, y + 1)};
}

MomentEstimate MomentTables::uut_second(std::size_t x, std::size_t y) const {
  check_mode(x, n_, "uut_second_moment");
  check_mode(y, n_, "uut_second_moment");
  const std::size_t i = index2(x, y);
  return {uut_mean_[i], uut_se_[i], trials_, fmt::format("E|UUT_{},{}|^2", x + 1, y + 1)};
}

double MomentTables::uut_abs_mean(std::size_t x, std::size_t y) const {
  check_mode(x, n_, "uut_abs_mean");
  check_mode(y, n_, "uut_abs_mean");
  return uut_abs_[index2(x, y)];
}

MomentEstimate MomentTables::uut_identity_gap(std::size_t x, std::size_t y) const {
  check_mode(x, n_, "uut_identity_gap");
  check_mode(y, n_, "uut_identity_gap");
  const std::size_t i = index2(x, y);
  return {gap_mean_[i], gap_se_[i], trials_, fmt::format("uut-gap_{},{}", x + 1, y + 1)};
}

MomentEstimate second_moment(const GeometrySpec& geometry, std::size_t depth, std::size_t x,
                             std::size_t y, std::size_t trials, RngStream stream,
                             unsigned threads) {
  return MomentTables(geometry, depth, trials, stream, threads, {false}).second(x, y);
}

MomentEstimate fourth_moment(const GeometrySpec& geometry, std::size_t depth, std::size_t alpha,
                             std::size_t x, std::size_t y, MomentSide side, std::size_t trials,
                             RngStream stream, unsigned threads) {
  return MomentTables(geometry, depth, trials, stream, threads).fourth(side, alpha, x, y);
}

MomentEstimate uut_second_moment(const GeometrySpec& geometry, std::size_t depth, std::size_t x,
                                 std::size_t y, std::size_t trials, RngStream stream,
                                 unsigned threads) {
  return MomentTables(geometry, depth, trials, stream, threads, {false}).uut_second(x, y);
}

MomentEstimate haar_reference(std::size_t n, const Subsystem& gamma, double s,
                              std::size_t trials, RngStream stream, unsigned threads) {
  require_trials(trials, 2, "haar_reference");
  if (gamma.total_modes() != n) {
    throw std::invalid_argument("haar_reference: subsystem built for a different mode count");
  }
  const std::size_t blocks = block_count(trials);
  std::vector<RunningStats> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t end = std::min(trials, (b + 1) * kTrialBlock);
    for (std::size_t t = b * kTrialBlock; t < end; ++t) {
      Engine rng = stream.derive(t).engine();
      partial[b].add(renyi2_eig(haar_unitary(n, rng), gamma, s).value);
    }
  });
  RunningStats total;
  for (const auto& p : partial) total.merge(p);
  return {total.mean, total.stderr_mean(), trials,
          fmt::format("haar S2 n={} k={} s={}", n, gamma.size(), s)};
}

MomentEstimate haar_fourth_moment(std::size_t n, std::size_t alpha, std::size_t x, std::size_t y,
                                  std::size_t trials, RngStream stream) {
  require_trials(trials, 2, "haar_fourth_moment");
  check_mode(alpha, n, "haar_fourth_moment");
  check_mode(x, n, "haar_fourth_moment");
  check_mode(y, n, "haar_fourth_moment");
  RunningStats st;
  Engine rng = stream.engine();
  const auto a = static_cast<Eigen::Index>(alpha);
  for (std::size_t t = 0; t < trials; ++t) {
    const ComplexMatrix u = haar_unitary(n, rng);
    st.add(std::norm(u(a, static_cast<Eigen::Index>(x))) *
           std::norm(u(a, static_cast<Eigen::Index>(y))));
  }
  return {st.mean, st.stderr_mean(), trials, "haar fourth"};
}

}  // namespace linopt
