#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace linopt {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

/// Raised when a computation leaves its numerical validity envelope
/// (eigenvalues outside [0,1], non-positive pivots, unitarity drift).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenvalues of the Hermitian part (H + H^dagger)/2, ascending.
/// Throws std::invalid_argument for non-square input or when
/// ||H - H^dagger||_hs exceeds `hermitian_defect_tol * ||H||_hs`.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h,
                                          double hermitian_defect_tol = 1e-10);

double hs_norm(const ComplexMatrix& a);

/// ||U^dagger U - I||_hs.
double unitarity_defect(const ComplexMatrix& u);

/// log det of a real symmetric positive definite matrix through its
/// Cholesky pivots. Imaginary parts and asymmetry must be below 1e-10
/// relative to the matrix norm.
double logdet_spd(const ComplexMatrix& s);

/// Snaps values within `tol` of [0,1] onto the interval. Anything further
/// out raises NumericError carrying the full spectrum.
std::vector<double> clamp_to_unit_interval(std::vector<double> values, double tol = 1e-9);

bool all_finite(const ComplexMatrix& a);

}  // namespace linopt
