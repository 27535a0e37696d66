#include "gaussian.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace linopt {

Subsystem Subsystem::from_one_based(std::size_t n, std::vector<std::size_t> modes) {
  if (modes.empty()) throw std::invalid_argument("subsystem must be nonempty");
  std::sort(modes.begin(), modes.end());
  if (std::adjacent_find(modes.begin(), modes.end()) != modes.end()) {
    throw std::invalid_argument("subsystem modes must be distinct");
  }
  Subsystem out;
  out.n_ = n;
  out.member_.assign(n, false);
  for (std::size_t x : modes) {
    if (x < 1 || x > n) {
      throw std::invalid_argument(fmt::format("subsystem mode {} out of range 1..{}", x, n));
    }
    out.modes_.push_back(x - 1);
    out.member_[x - 1] = true;
  }
  return out;
}

Subsystem Subsystem::first_k(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) {
    throw std::invalid_argument(fmt::format("subsystem size {} out of range 1..{}", k, n));
  }
  std::vector<std::size_t> modes(k);
  for (std::size_t i = 0; i < k; ++i) modes[i] = i + 1;
  return from_one_based(n, std::move(modes));
}

bool Subsystem::contains(std::size_t x) const { return x < n_ && member_[x]; }

Subsystem Subsystem::complement() const {
  std::vector<std::size_t> rest;
  for (std::size_t x = 0; x < n_; ++x) {
    if (!member_[x]) rest.push_back(x + 1);
  }
  return from_one_based(n_, std::move(rest));
}

std::string to_string(EntropyRoute route) {
  switch (route) {
    case EntropyRoute::eig: return "eig";
    case EntropyRoute::cov: return "cov";
    case EntropyRoute::series: return "series";
  }
  return "eig";
}

namespace {

void require_unitary_input(const ComplexMatrix& u, const Subsystem& gamma) {
  if (u.rows() != u.cols()) throw std::invalid_argument("entropy: unitary must be square");
  if (static_cast<std::size_t>(u.rows()) != gamma.total_modes()) {
    throw std::invalid_argument(fmt::format("entropy: subsystem defined on {} modes, unitary has {}",
                                            gamma.total_modes(), u.rows()));
  }
  const double defect = unitarity_defect(u);
  if (!(defect <= kUnitaryInputTol)) {
    throw NumericError(fmt::format("entropy: input unitarity defect {:.3e} exceeds {:.1e}", defect,
                                   kUnitaryInputTol));
  }
}

void require_squeezing(double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("entropy: squeezing s must be finite and >= 0");
  }
}

// P_Gamma U: the rows of u selected by gamma. P (UU^T) P^T = R R^T.
ComplexMatrix gamma_rows(const ComplexMatrix& u, const Subsystem& gamma) {
  const auto k = static_cast<Eigen::Index>(gamma.size());
  ComplexMatrix out(k, u.cols());
  for (Eigen::Index r = 0; r < k; ++r) out.row(r) = u.row(static_cast<Eigen::Index>(gamma.modes()[r]));
  return out;
}

// log cosh(x) without overflow for large x.
double log_cosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}

}  // namespace

ComplexMatrix build_w(const ComplexMatrix& u, const Subsystem& gamma) {
  require_unitary_input(u, gamma);
  const ComplexMatrix r = gamma_rows(u, gamma);
  const ComplexMatrix v = r * r.transpose();
  return v * v.adjoint();
}

EntropyResult renyi2_eig(const ComplexMatrix& u, const Subsystem& gamma, double s) {
  require_squeezing(s);
  const ComplexMatrix w = build_w(u, gamma);
  EntropyResult out;
  out.route = EntropyRoute::eig;
  out.spectrum = clamp_to_unit_interval(hermitian_eigenvalues(w, 1e-10));
  const double t2 = std::pow(std::tanh(2.0 * s), 2);
  double acc = static_cast<double>(gamma.size()) * log_cosh(2.0 * s);
  for (double lambda : out.spectrum) acc += 0.5 * std::log1p(-t2 * lambda);
  out.value = std::max(acc, 0.0);
  return out;
}

EntropyResult renyi2_cov(const ComplexMatrix& u, const Subsystem& gamma, double s) {
  require_squeezing(s);
  require_unitary_input(u, gamma);
  const ComplexMatrix r = gamma_rows(u, gamma);
  const ComplexMatrix a = (r * r.transpose()).conjugate();
  const auto k = static_cast<Eigen::Index>(gamma.size());
  RealMatrix m(2 * k, 2 * k);
  m.topLeftCorner(k, k) = a.real();
  m.topRightCorner(k, k) = a.imag();
  m.bottomLeftCorner(k, k) = a.imag();
  m.bottomRightCorner(k, k) = -a.real();
  const RealMatrix sigma =
      std::cosh(2.0 * s) * RealMatrix::Identity(2 * k, 2 * k) + std::sinh(2.0 * s) * m;
  EntropyResult out;
  out.route = EntropyRoute::cov;
  out.value = 0.5 * logdet_spd(sigma.cast<cplx>());
  return out;
}

EntropyResult renyi2_series(const ComplexMatrix& u, const Subsystem& gamma, double s,
                            std::size_t terms) {
  require_squeezing(s);
  if (terms < 1) throw std::invalid_argument("renyi2_series: need at least one term");
  const ComplexMatrix w = build_w(u, gamma);
  const double t2 = std::pow(std::tanh(2.0 * s), 2);
  const double k = static_cast<double>(gamma.size());
  ComplexMatrix power = w;
  double t2l = t2;
  double acc = 0.0;
  for (std::size_t l = 1; l <= terms; ++l) {
    const double deficit = std::max(0.0, k - power.trace().real());
    acc += t2l / (2.0 * static_cast<double>(l)) * deficit;
    power = power * w;
    t2l *= t2;
  }
  EntropyResult out;
  out.route = EntropyRoute::series;
  out.value = acc;
  out.series_terms = terms;
  return out;
}

std::vector<std::size_t> inner_boundary(const ComplexMatrix& uut, const Subsystem& gamma) {
  std::vector<std::size_t> out;
  const auto n = uut.cols();
  for (std::size_t x : gamma.modes()) {
    for (Eigen::Index y = 0; y < n; ++y) {
      if (!gamma.contains(static_cast<std::size_t>(y)) &&
          std::abs(uut(static_cast<Eigen::Index>(x), y)) > 1e-13) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

std::optional<std::size_t> brickwork_box_area(const GeometrySpec& geometry,
                                              const Subsystem& gamma) {
  if (geometry.dim == 0 || geometry.side == 0) return std::nullopt;
  const std::size_t m = geometry.side;
  const std::size_t dim = geometry.dim;
  std::vector<std::size_t> extent(dim, 0);
  for (std::size_t x : gamma.modes()) {
    const auto c = brickwork_coordinates(x, m, dim);
    for (std::size_t j = 0; j < dim; ++j) extent[j] = std::max(extent[j], c[j] + 1);
  }
  std::size_t volume = 1;
  for (std::size_t e : extent) volume *= e;
  if (volume != gamma.size()) return std::nullopt;  // not a corner box
  std::size_t area = 0;
  for (std::size_t j = 0; j < dim; ++j) {
    if (extent[j] >= m) continue;
    std::size_t face = 1;
    for (std::size_t l = 0; l < dim; ++l) {
      if (l != j) face *= extent[l];
    }
    area += face;
  }
  return area;
}

BoundReport check_bounds(const CircuitSample& sample, const Subsystem& gamma, double s) {
  BoundReport r;
  r.s2 = renyi2_eig(sample.u, gamma, s).value;
  r.log_cosh = log_cosh(2.0 * s);
  const double d = static_cast<double>(sample.depth);
  const std::size_t k = gamma.size();
  const std::size_t n = gamma.total_modes();

  r.trivial_bound = static_cast<double>(k) * r.log_cosh;
  const ComplexMatrix uut = sample.u * sample.u.transpose();
  r.boundary_size = inner_boundary(uut, gamma).size();
  r.boundary_bound = static_cast<double>(r.boundary_size) * r.log_cosh;

  if (sample.geometry.kind == GeometryKind::brickwall1d) {
    const auto& m = gamma.modes();
    const bool prefix = m.back() + 1 == k;
    const bool suffix = m.front() == n - k;
    if (prefix || suffix) r.worst_bound = 4.0 * d * r.log_cosh;
  } else if (sample.geometry.kind == GeometryKind::brickwork) {
    if (auto area = brickwork_box_area(sample.geometry, gamma)) {
      r.worst_bound = 4.0 * d * static_cast<double>(*area) * r.log_cosh;
    }
  }

  r.trivial_ok = r.s2 <= r.trivial_bound + kBoundSlack;
  r.boundary_ok = r.s2 <= r.boundary_bound + kBoundSlack;
  r.worst_ok = !r.worst_bound || r.s2 <= *r.worst_bound + kBoundSlack;
  return r;
}

}  // namespace linopt
