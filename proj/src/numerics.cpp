#include "numerics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace linopt {

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h, double hermitian_defect_tol) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw std::invalid_argument(
        fmt::format("hermitian_eigenvalues: expected a non-empty square matrix, got {}x{}",
                    h.rows(), h.cols()));
  }
  const double scale = hs_norm(h);
  const double defect = (h - h.adjoint()).norm();
  if (defect > hermitian_defect_tol * scale) {
    throw std::invalid_argument(fmt::format(
        "hermitian_eigenvalues: Hermitian defect {:.3e} exceeds {:.3e}", defect,
        hermitian_defect_tol * scale));
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("hermitian_eigenvalues: eigensolver did not converge");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

double hs_norm(const ComplexMatrix& a) { return a.norm(); }

double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) {
    throw std::invalid_argument(
        fmt::format("unitarity_defect: non-square {}x{} matrix", u.rows(), u.cols()));
  }
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

double logdet_spd(const ComplexMatrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw std::invalid_argument("logdet_spd: expected a non-empty square matrix");
  }
  const double scale = std::max(1.0, s.norm());
  if (s.imag().norm() > 1e-10 * scale) {
    throw std::invalid_argument("logdet_spd: matrix is not real");
  }
  const RealMatrix re = s.real();
  if ((re - re.transpose()).norm() > 1e-10 * scale) {
    throw std::invalid_argument("logdet_spd: matrix is not symmetric");
  }
  Eigen::LLT<RealMatrix> llt(0.5 * (re + re.transpose()));
  if (llt.info() != Eigen::Success) {
    throw NumericError("logdet_spd: matrix is not positive definite");
  }
  const RealMatrix& factor = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < factor.rows(); ++i) {
    const double pivot = factor(i, i);
    if (!(pivot > 0.0)) {
      throw NumericError("logdet_spd: non-positive pivot, matrix is not positive definite");
    }
    acc += std::log(pivot);
  }
  return 2.0 * acc;
}

std::vector<double> clamp_to_unit_interval(std::vector<double> values, double tol) {
  for (double& v : values) {
    if (v < -tol || v > 1.0 + tol || !std::isfinite(v)) {
      throw NumericError(fmt::format(
          "eigenvalue {:.17g} outside [0,1] beyond tolerance {:.1e}; spectrum = [{:.17g}]", v, tol,
          fmt::join(values, ", ")));
    }
    v = std::clamp(v, 0.0, 1.0);
  }
  return values;
}

bool all_finite(const ComplexMatrix& a) { return a.allFinite(); }

}  // namespace linopt
