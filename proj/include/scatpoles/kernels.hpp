#pragma once

// Log-split kernel factors of the single and double layer boundary operators:
//   kernel(s, t) = a(s, t) ln(4 sin^2((s - t)/2)) + b(s, t)
// with a, b smooth on the torus. The factor 2 of the boundary operators is
// included, so the split reproduces (i/2) H_0(kappa rho)|z'(t)| for the single
// layer and its normal-derivative analog with H_1 for the double layer.

#include "scatpoles/geometry.hpp"
#include "scatpoles/specfun.hpp"

#include <complex>
#include <stdexcept>

namespace scatpoles::kernels {

using cplx = std::complex<double>;

enum class Flavor { single_layer, double_layer };

class CoincidenceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// ln(4 sin^2(d/2)) for d not a multiple of 2pi.
double log_sin2(double d);

class KernelSplit {
public:
    struct Values {
        cplx a;
        cplx b;
    };

    KernelSplit(geometry::Curve curve, cplx kappa, Flavor flavor);

    cplx kappa() const { return kappa_; }
    Flavor flavor() const { return flavor_; }
    const geometry::Curve& curve() const { return curve_; }

    cplx eval_a(double s, double t) const;
    cplx eval_b(double s, double t) const;

    /// a ln(4 sin^2((s-t)/2)) + b; throws CoincidenceError for s == t (mod 2pi).
    cplx reconstruct_kernel(double s, double t) const;

    /// Off-diagonal pair from precomputed geometry. `jy` holds J and Y of order 0
    /// (single layer) or 1 (double layer) at kappa * c.rho, which is symmetric in
    /// (s, t) so callers assembling a grid can share it between (s, t) and (t, s).
    Values off_diagonal(const geometry::CurveFrame& ft, const geometry::Chord& c, double log_factor,
                        const specfun::BesselPair& jy) const;

    /// Limits a(t, t), b(t, t).
    Values diagonal(const geometry::CurveFrame& ft) const;

    int bessel_order() const { return flavor_ == Flavor::single_layer ? 0 : 1; }

private:
    Values evaluate(double s, double t) const;

    geometry::Curve curve_;
    cplx kappa_;
    Flavor flavor_;
};

/// |b(t + h, t) - b(t, t)|; tends to zero with h since b is continuous across the diagonal.
double diagonal_continuity(const KernelSplit& ks, double t, double h);

}  // namespace scatpoles::kernels
