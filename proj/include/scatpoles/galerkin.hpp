#pragma once

// Fourier-Galerkin matrices of the single layer operator S(kappa) and of
// I + D(kappa) in the orthonormal basis e_m(t) = exp(imt)/sqrt(2pi), |m| <= n.
// Storage index of basis function m is m + n.

#include "scatpoles/geometry.hpp"
#include "scatpoles/kernels.hpp"

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace scatpoles::galerkin {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Knots 2pi l/(2n+1), l = 0..2n.
std::vector<double> knots(int n);

/// Coefficients of the bivariate trigonometric interpolant
///   (Q f)(s, t) = sum_{|j|,|k|<=n} c_{j,k} e_j(s) e_k(t).
struct TrigCoeffs {
    int n = 0;
    ComplexMatrix c;  ///< c(j + n, k + n)

    cplx operator()(int j, int k) const { return c(j + n, k + n); }
    cplx evaluate(double s, double t) const;
};

/// samples(l, m) = f(s_l, t_m) on the (2n+1)^2 knot grid.
TrigCoeffs interpolate2d(const ComplexMatrix& samples, int n);

/// Galerkin matrix of the smooth-kernel operator, entry (i, l) = c_{i,-l}.
ComplexMatrix assemble_B(const TrigCoeffs& coeffs);

/// Galerkin matrix of the log-weighted operator, from
/// ln(4 sin^2(tau/2)) = -sum_{m != 0} exp(im tau)/|m|:
///   entry (i, l) = -sum_{p != 0} c_{i-p, p-l} / |p|.
ComplexMatrix assemble_A(const TrigCoeffs& coeffs);

enum class OperatorFlavor { S_n, I_plus_D_n };

std::string to_string(OperatorFlavor flavor);
OperatorFlavor operator_flavor_from_string(const std::string& name);
kernels::Flavor kernel_flavor(OperatorFlavor flavor);

struct OperatorMatrix {
    int n = 0;
    OperatorFlavor flavor = OperatorFlavor::S_n;
    cplx kappa;
    ComplexMatrix entries;

    cplx operator()(int i, int l) const { return entries(i + n, l + n); }
    int size() const { return 2 * n + 1; }
};

struct KernelSamples {
    ComplexMatrix a;
    ComplexMatrix b;
};

/// a and b on the knot grid; coincident knots use the diagonal limits.
KernelSamples sample_kernels(const kernels::KernelSplit& split, int n);

/// S_n(kappa) or I + D_n(kappa). Requires kappa != 0 and n >= 2.
OperatorMatrix assemble_operator(const geometry::Curve& curve, cplx kappa, int n, OperatorFlavor flavor);

/// K = -(1/2pi) int [ln(4 sin^2((s-t)/2)) - 1] . dt through the same assembly
/// path (a = -1/2pi, b = 1/2pi); equals diag(1, 1/|m|).
OperatorMatrix k_operator_matrix(int n);

/// max |off-diagonal entry| / max |diagonal entry|
double off_diagonal_ratio(const ComplexMatrix& m);

// Text dump:
//   scatpoles-matrix 1
//   n <n>
//   flavor <S_n|I_plus_D_n>
//   kappa <re> <im>
//   followed by (2n+1)^2 lines "<i> <l> <re> <im>", i and l in -n..n, row-major,
//   all reals printed with 17 significant digits.
void write_matrix_dump(std::ostream& out, const OperatorMatrix& m);
OperatorMatrix read_matrix_dump(std::istream& in);

}  // namespace scatpoles::galerkin
