#include "doctest.h"
#include "scatpoles/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace scatpoles::geometry;

namespace {
constexpr double kPi = std::numbers::pi;

bool same_bits(const CurveFrame& a, const CurveFrame& b) {
    return a.z.x == b.z.x && a.z.y == b.z.y && a.dz.x == b.dz.x && a.dz.y == b.dz.y && a.ddz.x == b.ddz.x &&
           a.ddz.y == b.ddz.y && a.normal.x == b.normal.x && a.normal.y == b.normal.y && a.speed == b.speed;
}
}  // namespace

TEST_CASE("unit disk frame at t = 0") {
    const CurveFrame f = Curve::disk(1.0).frame(0.0);
    CHECK(f.z.x == 1.0);
    CHECK(f.z.y == 0.0);
    CHECK(f.dz.x == 0.0);
    CHECK(f.dz.y == 1.0);
    CHECK(f.ddz.x == -1.0);
    CHECK(f.ddz.y == 0.0);
    CHECK(f.normal.x == 1.0);
    CHECK(f.normal.y == 0.0);
    CHECK(f.speed == 1.0);
}

TEST_CASE("peanut and acorn reference points") {
    const CurveFrame p = Curve::peanut().frame(0.0);
    CHECK(p.z.x == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
    CHECK(std::abs(p.z.y) <= 1e-15);

    const CurveFrame a = Curve::acorn().frame(kPi / 2);
    CHECK(std::abs(a.z.x) <= 1e-15);
    CHECK(a.z.y == doctest::Approx(0.6 * std::sqrt(4.25)).epsilon(1e-14));
}

TEST_CASE("analytic derivatives agree with finite differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (int i = 0; i < 20; ++i) {
        CHECK(frame_derivative_check(Curve::disk(1.0), angle(rng)) <= 1e-9);
    }
    for (const Curve& c : {Curve::peanut(), Curve::acorn(), Curve::radial_trig({1.0, 0.1, 0.05}, {0.0, 0.08})}) {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) worst = std::max(worst, frame_derivative_check(c, angle(rng)));
        CHECK(worst <= 1e-7);
    }
}

TEST_CASE("frame invariants") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (const Curve& c : {Curve::disk(2.5), Curve::peanut(), Curve::acorn()}) {
        for (int i = 0; i < 50; ++i) {
            const CurveFrame f = c.frame(angle(rng));
            CHECK(std::abs(dot(f.normal, f.dz)) <= 1e-14 * f.speed);
            CHECK(std::abs(std::hypot(f.normal.x, f.normal.y) - 1.0) <= 1e-14);
            CHECK(f.speed == std::hypot(f.dz.x, f.dz.y));
            // outward: the normal points away from the origin for star-shaped radial curves
            CHECK(dot(f.normal, f.z) > 0.0);
        }
    }
}

TEST_CASE("chord examples") {
    const Curve disk = Curve::disk(1.0);
    const Chord anti = chord(disk, kPi, 0.0);
    CHECK(anti.rho == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(anti.dot == doctest::Approx(-2.0).epsilon(1e-15));

    const Chord same = chord(disk, 0.7, 0.7);
    CHECK(same.rho == 0.0);
    CHECK(same.dot == 0.0);

    auto peanut_point = [](double t) {
        const double r = std::sqrt(0.25 + std::cos(t) * std::cos(t));
        return Vec2{r * std::cos(t), r * std::sin(t)};
    };
    const Vec2 zs = peanut_point(kPi / 3), zt = peanut_point(0.0);
    const Chord c = chord(Curve::peanut(), kPi / 3, 0.0);
    CHECK(std::abs(c.rho - std::hypot(zs.x - zt.x, zs.y - zt.y)) <= 1e-14);
    CHECK(std::abs(c.dot - (zs.x - zt.x)) <= 1e-14);  // nu(z(0)) = (1, 0)
}

TEST_CASE("disk chord length is 2R|sin((s-t)/2)|") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    const double R = 1.7;
    const Curve disk = Curve::disk(R);
    for (int i = 0; i < 200; ++i) {
        const double s = angle(rng), t = angle(rng);
        CHECK(std::abs(chord(disk, s, t).rho - 2.0 * R * std::abs(std::sin((s - t) / 2))) <= 1e-14);
    }
}

TEST_CASE("built-in curves are counterclockwise") {
    CHECK(signed_area(Curve::disk(1.0)) == doctest::Approx(kPi).epsilon(1e-13));
    CHECK(signed_area(Curve::peanut()) > 0.0);
    CHECK(signed_area(Curve::acorn()) > 0.0);
    CHECK(signed_area(Curve::radial_trig({1.0, 0.3}, {0.2})) > 0.0);
}

TEST_CASE("frames are 2pi-periodic bit for bit") {
    // t on a dyadic grid so that t + 2pi is exactly representable
    for (const Curve& c : {Curve::disk(1.0), Curve::peanut(), Curve::acorn()}) {
        for (int j = 0; j < 402; j += 7) {
            const double t = j / 64.0;
            CHECK(same_bits(c.frame(t), c.frame(t + 2.0 * kPi)));
        }
    }
}

TEST_CASE("curve construction errors") {
    CHECK_THROWS_AS(Curve::disk(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(Curve::disk(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Curve::radial_trig({0.5, 0.6}, {}), std::invalid_argument);
    CHECK_THROWS_AS(Curve::radial_trig({}, {}), std::invalid_argument);
    CHECK_NOTHROW(Curve::radial_trig({1.0}, {}));
}
