#pragma once

// Complex-argument Bessel and Hankel functions of the first kind by ascending
// series. Validated for |w| < 50, which covers every kernel argument kappa*rho
// that arises for desk-scale obstacles.

#include <complex>
#include <stdexcept>

namespace scatpoles::specfun {

using cplx = std::complex<double>;

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kMaxArgument = 50.0;
inline constexpr int kMaxRecurrenceOrder = 40;

struct SpecFunConfig {
    double series_tol = 1e-16;  ///< relative truncation tolerance of the series
    int max_terms = 200;

    /// Throws std::invalid_argument unless 0 < series_tol < 1e-8 and max_terms >= 50.
    void validate() const;
};

/// Raised for arguments outside the validated range, at the origin for Y/H,
/// or too close to the branch cut along the negative real axis.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct BesselPair {
    cplx j;
    cplx y;
};

/// J_order(w) for integer order >= 0.
cplx bessel_j(int order, cplx w, const SpecFunConfig& cfg = {});

/// J and Y of order 0 or 1 from a single pass over the ascending series.
/// Y uses the principal branch of ln(w/2).
BesselPair bessel_jy(int order, cplx w, const SpecFunConfig& cfg = {});

cplx bessel_y(int order, cplx w, const SpecFunConfig& cfg = {});

/// H^(1)_order(w) = J + iY, order 0 or 1.
cplx hankel1(int order, cplx w, const SpecFunConfig& cfg = {});

struct HankelValue {
    cplx value;
    /// Set when |H_order| exceeds 1e12 |H_0|; the recessive J part is then unreliable.
    bool accuracy_warning = false;
};

/// H^(1)_order(w) for integer order in [0, 40] by forward recurrence from H_0, H_1.
HankelValue hankel1_int_checked(int order, cplx w, const SpecFunConfig& cfg = {});
cplx hankel1_int(int order, cplx w, const SpecFunConfig& cfg = {});

/// d/dw H^(1)_order(w) = H_{order-1} - (order/w) H_order, order >= 1.
cplx hankel1_int_derivative(int order, cplx w, const SpecFunConfig& cfg = {});

}  // namespace scatpoles::specfun
