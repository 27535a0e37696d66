#include "walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "parallel.hpp"
#include "stats.hpp"

namespace linopt {

RealMatrix layer_kernel(const Pairing& pairing) {
  const auto n = static_cast<Eigen::Index>(pairing.modes());
  RealMatrix s = RealMatrix::Zero(n, n);
  for (const Block& b : pairing.blocks()) {
    const auto i = static_cast<Eigen::Index>(b.first);
    const auto j = static_cast<Eigen::Index>(b.second);
    if (b.is_pair()) {
      s(i, i) = s(i, j) = s(j, i) = s(j, j) = 0.5;
    } else {
      s(i, i) = 1.0;
    }
  }
  return s;
}

WalkKernel step_kernel(const GeometrySpec& geometry) {
  WalkKernel k;
  k.n = geometry.n;
  const auto n = static_cast<Eigen::Index>(geometry.n);
  k.p = RealMatrix::Identity(n, n);
  for (const Pairing& layer : geometry.layers) {
    k.factors.push_back(layer_kernel(layer));
    k.p = k.p * k.factors.back();
  }
  return k;
}

namespace {

void renormalize_rows(RealMatrix& q) {
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    const double sum = q.row(r).sum();
    if (std::abs(sum - 1.0) > 1e-12) q.row(r) /= sum;
  }
}

}  // namespace

std::vector<double> walk_distribution(const WalkKernel& kernel, std::size_t start,
                                      std::size_t depth) {
  if (start >= kernel.n) {
    throw std::invalid_argument(fmt::format("walk_distribution: start {} out of range", start + 1));
  }
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(kernel.n));
  row(static_cast<Eigen::Index>(start)) = 1.0;
  for (std::size_t t = 0; t < depth; ++t) {
    row = row * kernel.p;
    const double sum = row.sum();
    if (std::abs(sum - 1.0) > 1e-12) row /= sum;
  }
  return {row.data(), row.data() + row.size()};
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument(
        fmt::format("tv_distance: length mismatch {} vs {}", p.size(), q.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

std::size_t reflect_map(std::int64_t x, std::size_t n) {
  if (n == 0) throw std::invalid_argument("reflect_map: n must be positive");
  const auto period = static_cast<std::int64_t>(2 * n);
  std::int64_t r = ((x % period) + period) % period;
  if (r == 0) r = period;
  const auto nn = static_cast<std::int64_t>(n);
  return static_cast<std::size_t>(r <= nn ? r : period + 1 - r);
}

std::int64_t z_walk_step(std::int64_t y, Engine& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  const int offset = pick(rng);
  const bool odd = ((y % 2) + 2) % 2 == 1;
  return odd ? y - 1 + offset : y - 2 + offset;
}

ReflectionReport verify_reflection(std::size_t n, std::size_t depth, std::size_t trials,
                                   std::size_t start, RngStream stream) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("verify_reflection: n must be even");
  if (start < 1 || start > n) throw std::invalid_argument("verify_reflection: start out of range");
  if (trials < 1) throw std::invalid_argument("verify_reflection: trials must be >= 1");
  ReflectionReport r;
  r.n = n;
  r.depth = depth;
  r.start = start;
  r.trials = trials;
  r.exact = walk_distribution(step_kernel(brickwall_geometry(n)), start - 1, depth);

  std::vector<std::uint64_t> counts(n, 0);
  Engine rng = stream.engine();
  for (std::size_t t = 0; t < trials; ++t) {
    auto pos = static_cast<std::int64_t>(start);
    for (std::size_t s = 0; s < depth; ++s) pos = z_walk_step(pos, rng);
    ++counts[reflect_map(pos, n) - 1];
  }
  r.empirical.resize(n);
  const double total = static_cast<double>(trials);
  for (std::size_t x = 0; x < n; ++x) {
    r.empirical[x] = static_cast<double>(counts[x]) / total;
    r.stat_bound += 0.5 * std::sqrt(r.exact[x] * (1.0 - r.exact[x]) / total);
  }
  r.tv_gap = tv_distance(r.empirical, r.exact);
  r.pass = r.tv_gap <= 5.0 * r.stat_bound;
  return r;
}

std::vector<double> mixing_curve(const GeometrySpec& geometry, double epsilon, std::size_t t_max) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("mixing_time: epsilon must lie in (0,1)");
  }
  if (t_max < 1) throw std::invalid_argument("mixing_time: t_max must be >= 1");
  const WalkKernel kernel = step_kernel(geometry);
  const auto n = static_cast<Eigen::Index>(kernel.n);
  const double uniform = 1.0 / static_cast<double>(kernel.n);
  auto max_tv = [&](const RealMatrix& q) {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      worst = std::max(worst, 0.5 * (q.row(r).array() - uniform).abs().sum());
    }
    return worst;
  };
  RealMatrix q = RealMatrix::Identity(n, n);
  std::vector<double> curve{max_tv(q)};
  for (std::size_t t = 1; t <= t_max; ++t) {
    q = q * kernel.p;
    renormalize_rows(q);
    curve.push_back(max_tv(q));
    if (curve.back() <= epsilon) break;
  }
  return curve;
}

std::optional<std::size_t> mixing_time(const GeometrySpec& geometry, double epsilon,
                                       std::size_t t_max) {
  const std::vector<double> curve = mixing_curve(geometry, epsilon, t_max);
  for (std::size_t t = 1; t < curve.size(); ++t) {
    if (curve[t] <= epsilon) return t;
  }
  return std::nullopt;
}

namespace {

/// Hands out single random bits, 64 per engine call.
class BitSource {
 public:
  explicit BitSource(Engine& rng) : rng_(rng) {}
  bool next() {
    if (left_ == 0) {
      bits_ = rng_();
      left_ = 64;
    }
    const bool b = bits_ & 1u;
    bits_ >>= 1;
    --left_;
    return b;
  }

 private:
  Engine& rng_;
  std::uint64_t bits_ = 0;
  int left_ = 0;
};

}  // namespace

std::uint32_t sample_meeting_layer(const GeometrySpec& geometry, std::size_t x, std::size_t y,
                                   std::size_t max_layers, Engine& rng) {
  BitSource bits(rng);
  const std::size_t m = geometry.layers.size();
  std::size_t a = x;
  std::size_t b = y;
  for (std::size_t k = 1; k <= max_layers; ++k) {
    const Pairing& layer = geometry.layers[(k - 1) % m];
    const std::size_t pa = layer.partner(a);
    const std::size_t pb = layer.partner(b);
    if (pa != a && bits.next()) a = pa;
    if (pb != b && bits.next()) b = pb;
    if (layer.block_of(a) == layer.block_of(b)) return static_cast<std::uint32_t>(k);
  }
  return static_cast<std::uint32_t>(max_layers + 1);
}

MeetingStudy::MeetingStudy(const GeometrySpec& geometry, std::size_t trials,
                           std::size_t max_layers, RngStream stream, unsigned threads)
    : n_(geometry.n),
      layers_per_step_(geometry.layers.size()),
      max_layers_(max_layers),
      trials_(trials) {
  if (trials < 1) throw std::invalid_argument("meeting: trials must be >= 1");
  for (std::size_t x = 0; x < n_; ++x) {
    for (std::size_t y = x + 1; y < n_; ++y) starts_.emplace_back(x, y);
  }
  sorted_times_.resize(starts_.size());
  parallel_for(starts_.size(), threads, [&](std::size_t i) {
    Engine rng = stream.derive(i).engine();
    auto& times = sorted_times_[i];
    times.resize(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      times[t] = sample_meeting_layer(geometry, starts_[i].first, starts_[i].second, max_layers, rng);
    }
    std::sort(times.begin(), times.end());
  });
}

std::vector<MeetingStudy::PairTail> MeetingStudy::tails(std::size_t layers) const {
  std::vector<PairTail> out;
  const double total = static_cast<double>(trials_);
  for (std::size_t i = 0; i < starts_.size(); ++i) {
    const auto& times = sorted_times_[i];
    const auto above = static_cast<double>(
        times.end() - std::upper_bound(times.begin(), times.end(), static_cast<std::uint32_t>(layers)));
    const double p = above / total;
    out.push_back({starts_[i].first + 1, starts_[i].second + 1, p, std::sqrt(p * (1.0 - p) / total)});
  }
  return out;
}

double MeetingStudy::max_tail(std::size_t layers) const {
  double worst = 0.0;
  for (const auto& t : tails(layers)) worst = std::max(worst, t.tail);
  return worst;
}

std::optional<std::size_t> MeetingStudy::meeting_layers(double epsilon) const {
  const auto allowed = static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(trials_)));
  std::size_t worst = 1;
  if (allowed >= trials_) return worst;
  for (const auto& times : sorted_times_) {
    const std::uint32_t k = times[trials_ - 1 - allowed];
    if (k > max_layers_) return std::nullopt;
    worst = std::max<std::size_t>(worst, k);
  }
  return worst;
}

namespace {

// Advances the unmet pair mass through one layer, then removes pairs that
// now share a block.
void meeting_layer_update(RealMatrix& mass, const Pairing& layer) {
  const auto n = mass.rows();
  RealMatrix tmp(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto pa = static_cast<Eigen::Index>(layer.partner(static_cast<std::size_t>(a)));
    if (pa == a) {
      tmp.row(a) = mass.row(a);
    } else {
      tmp.row(a) = 0.5 * (mass.row(a) + mass.row(pa));
    }
  }
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto pb = static_cast<Eigen::Index>(layer.partner(static_cast<std::size_t>(b)));
    if (pb == b) {
      mass.col(b) = tmp.col(b);
    } else {
      mass.col(b) = 0.5 * (tmp.col(b) + tmp.col(pb));
    }
  }
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (layer.block_of(static_cast<std::size_t>(a)) == layer.block_of(static_cast<std::size_t>(b))) {
        mass(a, b) = 0.0;
      }
    }
  }
}

}  // namespace

double meeting_tail_exact(const GeometrySpec& geometry, std::size_t x, std::size_t y,
                          std::size_t layers) {
  const auto n = static_cast<Eigen::Index>(geometry.n);
  RealMatrix mass = RealMatrix::Zero(n, n);
  mass(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = 1.0;
  for (std::size_t k = 1; k <= layers; ++k) {
    meeting_layer_update(mass, geometry.layers[(k - 1) % geometry.layers.size()]);
  }
  return mass.sum();
}

std::optional<std::size_t> meeting_layers_exact(const GeometrySpec& geometry, double epsilon,
                                                std::size_t max_layers) {
  const auto n = static_cast<Eigen::Index>(geometry.n);
  std::vector<RealMatrix> masses;
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = x + 1; y < n; ++y) {
      masses.push_back(RealMatrix::Zero(n, n));
      masses.back()(x, y) = 1.0;
    }
  }
  for (std::size_t k = 1; k <= max_layers; ++k) {
    const Pairing& layer = geometry.layers[(k - 1) % geometry.layers.size()];
    double worst = 0.0;
    for (auto& mass : masses) {
      meeting_layer_update(mass, layer);
      worst = std::max(worst, mass.sum());
    }
    if (worst <= epsilon) return k;
  }
  return std::nullopt;
}

BosonWalkReport verify_boson_rw(const GeometrySpec& geometry, std::size_t depth,
                                std::size_t trials, RngStream stream, unsigned threads) {
  if (trials < 1) throw std::invalid_argument("verify_boson_rw: trials must be >= 1");
  const std::size_t n = geometry.n;
  const auto nn = static_cast<Eigen::Index>(n);
  const std::size_t blocks = block_count(trials);
  std::vector<std::vector<RunningStats>> partial(blocks, std::vector<RunningStats>(n * n));
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t end = std::min(trials, (b + 1) * kTrialBlock);
    for (std::size_t t = b * kTrialBlock; t < end; ++t) {
      CircuitGrower grower(geometry, stream.derive(t));
      grower.advance(depth);
      const auto& u = grower.matrix();
      for (Eigen::Index x = 0; x < nn; ++x) {
        for (Eigen::Index y = 0; y < nn; ++y) {
          partial[b][static_cast<std::size_t>(x * nn + y)].add(std::norm(u(x, y)));
        }
      }
    }
  });
  std::vector<RunningStats> total(n * n);
  for (const auto& blk : partial) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i].merge(blk[i]);
  }

  BosonWalkReport r;
  r.n = n;
  r.depth = depth;
  r.trials = trials;
  r.mc_mean.resize(nn, nn);
  r.mc_stderr.resize(nn, nn);
  r.exact.resize(nn, nn);
  r.z.resize(nn, nn);
  const WalkKernel kernel = step_kernel(geometry);
  for (Eigen::Index y = 0; y < nn; ++y) {
    const auto dist = walk_distribution(kernel, static_cast<std::size_t>(y), depth);
    for (Eigen::Index x = 0; x < nn; ++x) r.exact(x, y) = dist[static_cast<std::size_t>(x)];
  }
  for (Eigen::Index x = 0; x < nn; ++x) {
    for (Eigen::Index y = 0; y < nn; ++y) {
      const RunningStats& st = total[static_cast<std::size_t>(x * nn + y)];
      r.mc_mean(x, y) = st.mean;
      r.mc_stderr(x, y) = st.stderr_mean();
      const double diff = st.mean - r.exact(x, y);
      double z = 0.0;
      if (r.mc_stderr(x, y) > 0.0) {
        z = diff / r.mc_stderr(x, y);
      } else if (std::abs(diff) > 1e-12) {
        z = std::copysign(std::numeric_limits<double>::infinity(), diff);
      }
      r.z(x, y) = z;
      r.max_abs_z = std::max(r.max_abs_z, std::abs(z));
    }
  }
  return r;
}

}  // namespace linopt
