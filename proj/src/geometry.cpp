#include "scatpoles/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scatpoles::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinSpeed = 1e-12;
constexpr int kValidationGrid = 4096;

double max_rel(Vec2 got, Vec2 want) {
    const double scale = std::max(std::hypot(want.x, want.y), 1e-300);
    return std::hypot(got.x - want.x, got.y - want.y) / scale;
}

}  // namespace

std::string to_string(CurveKind kind) {
    switch (kind) {
        case CurveKind::disk: return "disk";
        case CurveKind::peanut: return "peanut";
        case CurveKind::acorn: return "acorn";
        case CurveKind::radial_trig: return "radial_trig";
    }
    return "unknown";
}

double wrap_angle(double t) {
    double r = std::fmod(t, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

Curve::Curve(CurveKind kind, double radius, std::vector<double> c, std::vector<double> s)
    : kind_(kind), radius_(radius), cos_(std::move(c)), sin_(std::move(s)) {}

Curve Curve::disk(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("disk: radius must be positive");
    }
    return Curve(CurveKind::disk, radius, {}, {});
}

Curve Curve::peanut() { return Curve(CurveKind::peanut, 0.0, {}, {}); }

Curve Curve::acorn() { return Curve(CurveKind::acorn, 0.0, {}, {}); }

Curve Curve::radial_trig(std::vector<double> cosine_coeffs, std::vector<double> sine_coeffs) {
    if (cosine_coeffs.empty()) {
        throw std::invalid_argument("radial_trig: cosine coefficients must include the constant term");
    }
    for (double v : cosine_coeffs) {
        if (!std::isfinite(v)) throw std::invalid_argument("radial_trig: non-finite coefficient");
    }
    for (double v : sine_coeffs) {
        if (!std::isfinite(v)) throw std::invalid_argument("radial_trig: non-finite coefficient");
    }
    Curve c(CurveKind::radial_trig, 0.0, std::move(cosine_coeffs), std::move(sine_coeffs));
    for (int i = 0; i < kValidationGrid; ++i) {
        if (!(c.radial(kTwoPi * i / kValidationGrid).r > 0.0)) {
            throw std::invalid_argument("radial_trig: radius must be positive on [0, 2pi)");
        }
    }
    return c;
}

Curve::Radial Curve::radial(double t) const {
    switch (kind_) {
        case CurveKind::disk:
            return {radius_, 0.0, 0.0};
        case CurveKind::peanut: {
            // g = 0.25 + cos^2 t = 0.75 + 0.5 cos 2t, r = sqrt(g)
            const double g = 0.75 + 0.5 * std::cos(2.0 * t);
            const double dg = -std::sin(2.0 * t);
            const double ddg = -2.0 * std::cos(2.0 * t);
            const double r = std::sqrt(g);
            return {r, dg / (2.0 * r), ddg / (2.0 * r) - dg * dg / (4.0 * r * g)};
        }
        case CurveKind::acorn: {
            // r = 0.6 sqrt(g), g = 17/4 + 2 cos 3t
            const double g = 4.25 + 2.0 * std::cos(3.0 * t);
            const double dg = -6.0 * std::sin(3.0 * t);
            const double ddg = -18.0 * std::cos(3.0 * t);
            const double sg = std::sqrt(g);
            return {0.6 * sg, 0.6 * dg / (2.0 * sg), 0.6 * (ddg / (2.0 * sg) - dg * dg / (4.0 * sg * g))};
        }
        case CurveKind::radial_trig: {
            Radial out{cos_[0], 0.0, 0.0};
            for (std::size_t k = 1; k < cos_.size(); ++k) {
                const double kk = static_cast<double>(k);
                const double c = std::cos(kk * t), s = std::sin(kk * t);
                out.r += cos_[k] * c;
                out.dr -= kk * cos_[k] * s;
                out.ddr -= kk * kk * cos_[k] * c;
            }
            for (std::size_t i = 0; i < sin_.size(); ++i) {
                const double kk = static_cast<double>(i + 1);
                const double c = std::cos(kk * t), s = std::sin(kk * t);
                out.r += sin_[i] * s;
                out.dr += kk * sin_[i] * c;
                out.ddr -= kk * kk * sin_[i] * s;
            }
            return out;
        }
    }
    throw std::logic_error("unknown curve kind");
}

CurveFrame Curve::frame(double t) const {
    t = wrap_angle(t);
    const Radial rad = radial(t);
    const double c = std::cos(t), s = std::sin(t);
    CurveFrame f;
    f.z = {rad.r * c, rad.r * s};
    // z' = r'(c, s) + r(-s, c);  z'' = (r'' - r)(c, s) + 2r'(-s, c)
    f.dz = {rad.dr * c - rad.r * s, rad.dr * s + rad.r * c};
    f.ddz = {(rad.ddr - rad.r) * c - 2.0 * rad.dr * s, (rad.ddr - rad.r) * s + 2.0 * rad.dr * c};
    f.speed = std::hypot(f.dz.x, f.dz.y);
    if (!(f.speed >= kMinSpeed)) {
        throw std::domain_error("curve: degenerate parametrization, |z'(t)| < 1e-12");
    }
    f.normal = {f.dz.y / f.speed, -f.dz.x / f.speed};
    return f;
}

double frame_derivative_check(const Curve& curve, double t) {
    constexpr double h = 1e-4;
    const CurveFrame f = curve.frame(t);
    const CurveFrame m2 = curve.frame(t - 2 * h), m1 = curve.frame(t - h);
    const CurveFrame p1 = curve.frame(t + h), p2 = curve.frame(t + 2 * h);
    auto central = [](Vec2 a2, Vec2 a1, Vec2 b1, Vec2 b2) {
        return Vec2{(a2.x - 8.0 * a1.x + 8.0 * b1.x - b2.x) / (12.0 * h),
                    (a2.y - 8.0 * a1.y + 8.0 * b1.y - b2.y) / (12.0 * h)};
    };
    const Vec2 fd_dz = central(m2.z, m1.z, p1.z, p2.z);
    const Vec2 fd_ddz = central(m2.dz, m1.dz, p1.dz, p2.dz);
    return std::max(max_rel(fd_dz, f.dz), max_rel(fd_ddz, f.ddz));
}

Chord chord(const CurveFrame& fs, const CurveFrame& ft) {
    const Vec2 d = fs.z - ft.z;
    return {std::hypot(d.x, d.y), dot(d, ft.normal)};
}

Chord chord(const Curve& curve, double s, double t) {
    if (wrap_angle(s) == wrap_angle(t)) return {0.0, 0.0};
    return chord(curve.frame(s), curve.frame(t));
}

double signed_area(const Curve& curve, int points) {
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
        const CurveFrame f = curve.frame(kTwoPi * i / points);
        sum += f.z.x * f.dz.y - f.z.y * f.dz.x;
    }
    return 0.5 * sum * kTwoPi / points;
}

}  // namespace scatpoles::geometry
