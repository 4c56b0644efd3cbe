#pragma once

// Smooth closed boundary curves z(t), t in [0, 2pi), given in radial form
// z(t) = r(t) (cos t, sin t) with r > 0. Radial parametrizations are regular
// and counterclockwise by construction.

#include <string>
#include <vector>

namespace scatpoles::geometry {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

enum class CurveKind { disk, peanut, acorn, radial_trig };

std::string to_string(CurveKind kind);

struct CurveFrame {
    Vec2 z;
    Vec2 dz;
    Vec2 ddz;
    Vec2 normal;  ///< unit outward normal (dz.y, -dz.x) / |dz|
    double speed = 0.0;
};

class Curve {
public:
    static Curve disk(double radius);
    /// sqrt(0.25 + cos^2 t) (cos t, sin t)
    static Curve peanut();
    /// 0.6 sqrt(17/4 + 2 cos 3t) (cos t, sin t)
    static Curve acorn();
    /// r(t) = c_0 + sum_{k>=1} c_k cos kt + s_k sin kt, with cosine_coeffs = {c_0, c_1, ...}
    /// and sine_coeffs = {s_1, s_2, ...}. Rejects radii that are not positive on a
    /// 4096-point grid.
    static Curve radial_trig(std::vector<double> cosine_coeffs, std::vector<double> sine_coeffs);

    CurveKind kind() const { return kind_; }
    double radius() const { return radius_; }
    const std::vector<double>& cosine_coeffs() const { return cos_; }
    const std::vector<double>& sine_coeffs() const { return sin_; }

    /// Point, derivatives and normal at t; t is reduced modulo 2pi first.
    CurveFrame frame(double t) const;
    Vec2 point(double t) const { return frame(t).z; }

private:
    struct Radial {
        double r, dr, ddr;
    };
    Curve(CurveKind kind, double radius, std::vector<double> c, std::vector<double> s);
    Radial radial(double t) const;

    CurveKind kind_;
    double radius_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// Reduce t into [0, 2pi).
double wrap_angle(double t);

/// Max relative deviation of the analytic derivatives from 4th-order central
/// differences with step 1e-4: dz against differences of z, ddz against
/// differences of dz.
double frame_derivative_check(const Curve& curve, double t);

struct Chord {
    double rho = 0.0;  ///< |z(s) - z(t)|
    double dot = 0.0;  ///< (z(s) - z(t)) . nu(z(t))
};

Chord chord(const Curve& curve, double s, double t);
Chord chord(const CurveFrame& fs, const CurveFrame& ft);

/// (1/2) closed integral of (z1 z2' - z2 z1') dt by the trapezoid rule.
double signed_area(const Curve& curve, int points = 1024);

}  // namespace scatpoles::geometry
