#include "scatpoles/kernels.hpp"

#include <cmath>
#include <numbers>

namespace scatpoles::kernels {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI(0.0, 1.0);
}  // namespace

double log_sin2(double d) {
    const double s = std::sin(0.5 * d);
    return std::log(4.0 * s * s);
}

KernelSplit::KernelSplit(geometry::Curve curve, cplx kappa, Flavor flavor)
    : curve_(std::move(curve)), kappa_(kappa), flavor_(flavor) {
    if (kappa == cplx(0.0, 0.0)) {
        throw std::invalid_argument("KernelSplit: kappa must be nonzero");
    }
}

KernelSplit::Values KernelSplit::off_diagonal(const geometry::CurveFrame& ft, const geometry::Chord& c,
                                              double log_factor, const specfun::BesselPair& jy) const {
    const cplx hankel = jy.j + kI * jy.y;
    Values v;
    if (flavor_ == Flavor::single_layer) {
        v.a = -jy.j * ft.speed / (2.0 * kPi);
        v.b = 0.5 * kI * hankel * ft.speed - v.a * log_factor;
    } else {
        const double direction = c.dot / c.rho;
        v.a = -kappa_ / (2.0 * kPi) * direction * jy.j * ft.speed;
        v.b = 0.5 * kI * kappa_ * direction * hankel * ft.speed - v.a * log_factor;
    }
    return v;
}

KernelSplit::Values KernelSplit::diagonal(const geometry::CurveFrame& ft) const {
    Values v;
    if (flavor_ == Flavor::single_layer) {
        v.a = -ft.speed / (2.0 * kPi);
        const cplx log_term = std::log(kappa_ * kappa_ / 4.0 * (ft.speed * ft.speed));
        v.b = (0.5 * kI - specfun::kEulerGamma / kPi - log_term / (2.0 * kPi)) * ft.speed;
    } else {
        v.a = 0.0;
        v.b = geometry::dot(ft.ddz, ft.normal) / (2.0 * kPi * ft.speed);
    }
    return v;
}

KernelSplit::Values KernelSplit::evaluate(double s, double t) const {
    s = geometry::wrap_angle(s);
    t = geometry::wrap_angle(t);
    const geometry::CurveFrame ft = curve_.frame(t);
    if (s == t) return diagonal(ft);
    const geometry::CurveFrame fs = curve_.frame(s);
    const geometry::Chord c = geometry::chord(fs, ft);
    return off_diagonal(ft, c, log_sin2(s - t), specfun::bessel_jy(bessel_order(), kappa_ * c.rho));
}

cplx KernelSplit::eval_a(double s, double t) const { return evaluate(s, t).a; }

cplx KernelSplit::eval_b(double s, double t) const { return evaluate(s, t).b; }

cplx KernelSplit::reconstruct_kernel(double s, double t) const {
    if (geometry::wrap_angle(s) == geometry::wrap_angle(t)) {
        throw CoincidenceError("reconstruct_kernel: s and t coincide; the kernel is singular there");
    }
    const Values v = evaluate(s, t);
    return v.a * log_sin2(geometry::wrap_angle(s) - geometry::wrap_angle(t)) + v.b;
}

double diagonal_continuity(const KernelSplit& ks, double t, double h) {
    if (!(h >= 1e-6 && h <= 1e-2)) {
        throw std::invalid_argument("diagonal_continuity: h must lie in [1e-6, 1e-2]");
    }
    return std::abs(ks.eval_b(t + h, t) - ks.eval_b(t, t));
}

}  // namespace scatpoles::kernels
