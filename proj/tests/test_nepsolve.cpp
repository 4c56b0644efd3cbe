#include "doctest.h"
#include "scatpoles/nepsolve.hpp"
#include "scatpoles/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace scatpoles;
using nepsolve::Contour;
using nepsolve::OperatorFlavor;
using cplx = std::complex<double>;
using nepsolve::ComplexMatrix;
constexpr double kPi = std::numbers::pi;

namespace {

// RIM of the scalar matrix lambda on the circle |z| = r with 2m nodes:
// (1/2m) sum z_j/(z_j - lambda) = 1/(1 - (lambda/r)^{2m}) inside,
// -(r/lambda)^{2m}/(1 - (r/lambda)^{2m}) outside.
double scalar_rim(cplx lambda, double r, int m) {
    if (std::abs(lambda) < r) return std::abs(1.0 / (1.0 - std::pow(lambda / r, 2 * m)));
    const cplx q = std::pow(r / lambda, 2 * m);
    return std::abs(q / (1.0 - q));
}

}  // namespace

TEST_CASE("indicator on the empty contour around the identity") {
    const Contour c{0.0, 0.5, 10};
    const auto f = nepsolve::random_unit_vector(7, 3);
    const double want = std::pow(0.5, 20) / (1.0 - std::pow(0.5, 20));
    CHECK(want == doctest::Approx(9.54e-7).epsilon(1e-3));
    const ComplexMatrix w = ComplexMatrix::Identity(7, 7);
    const double got = nepsolve::rim_indicator(w, c, f);
    CHECK(std::abs(got - want) <= 1e-12);
    CHECK(std::abs(got - want) <= 1e-9 * want);
    const nepsolve::Vector rf = nepsolve::rim_apply(w, c, f);
    CHECK((rf + want * f).norm() <= 1e-9 * want);
}

TEST_CASE("indicator with the eigenvalue inside") {
    const Contour c{0.0, 0.5, 10};
    const auto f = nepsolve::random_unit_vector(5, 4);
    const double want = 1.0 / (1.0 - std::pow(0.2, 20));
    CHECK(std::abs(nepsolve::rim_indicator(0.1 * ComplexMatrix::Identity(5, 5), c, f) - want) <= 1e-12);
}

TEST_CASE("decoupled diagonal cases") {
    const Contour c{0.0, 0.5, 10};
    ComplexMatrix w = ComplexMatrix::Zero(2, 2);
    w(0, 0) = 0.1;
    w(1, 1) = 1.0;
    nepsolve::Vector e0(2), e1(2);
    e0 << 1.0, 0.0;
    e1 << 0.0, 1.0;
    CHECK(std::abs(nepsolve::rim_indicator(w, c, e0) - scalar_rim(0.1, 0.5, 10)) <= 1e-12);
    CHECK(std::abs(nepsolve::rim_indicator(w, c, e1) - scalar_rim(1.0, 0.5, 10)) <= 1e-12);
    CHECK(nepsolve::rim_indicator(w, c, e1) <= 1e-6);
}

TEST_CASE("indicator matches the geometric-series closed form on diagonal matrices") {
    const ComplexMatrix w = ComplexMatrix::Identity(1, 1);
    for (cplx lambda : {cplx(0.02, 0.01), cplx(0.05, -0.06), cplx(0.2, 0.0), cplx(-0.3, 0.4), cplx(1.0, 2.0)}) {
        for (int m : {4, 8, 16}) {
            const Contour c{0.0, 0.1, m};
            nepsolve::Vector f(1);
            f << 1.0;
            const double got = nepsolve::rim_indicator(lambda * w, c, f);
            const double want = scalar_rim(lambda, 0.1, m);
            CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, want));
        }
    }
    // shifted center
    const Contour c{cplx(2.0, -1.0), 0.25, 8};
    nepsolve::Vector f(1);
    f << 1.0;
    const double got = nepsolve::rim_indicator(cplx(2.1, -1.05) * w, c, f);
    CHECK(std::abs(got - scalar_rim(cplx(0.1, -0.05), 0.25, 8)) <= 1e-12);
}

TEST_CASE("indicator errors") {
    const Contour c{0.0, 0.5, 4};
    nepsolve::Vector f = nepsolve::random_unit_vector(3, 1);
    // node z_0 = 0.5 coincides with the eigenvalue
    CHECK_THROWS_AS(nepsolve::rim_indicator(0.5 * ComplexMatrix::Identity(3, 3), c, f), nepsolve::SingularShiftError);
    CHECK_THROWS_AS(nepsolve::rim_indicator(ComplexMatrix::Identity(3, 3), Contour{0.0, 0.5, 3}, f), std::invalid_argument);
    CHECK_THROWS_AS(nepsolve::rim_indicator(ComplexMatrix::Identity(3, 3), Contour{0.0, -1.0, 8}, f), std::invalid_argument);
    CHECK_THROWS_AS(nepsolve::rim_indicator(ComplexMatrix::Identity(4, 4), c, f), std::invalid_argument);
}

TEST_CASE("seeded vectors are reproducible and normalized") {
    const auto a = nepsolve::random_unit_vector(33, 11), b = nepsolve::random_unit_vector(33, 11);
    CHECK(a == b);
    CHECK(std::abs(a.norm() - 1.0) <= 1e-15);
    CHECK((a - nepsolve::random_unit_vector(33, 12)).norm() > 0.1);
    const ComplexMatrix v = nepsolve::random_block(33, 8, 11);
    for (int c = 0; c < 8; ++c) CHECK(std::abs(v.col(c).norm() - 1.0) <= 1e-15);
}

TEST_CASE("search region geometry") {
    nepsolve::SearchRegion r;
    CHECK(r.point(0, 0) == cplx(0.05, -3.95));
    CHECK(r.point(39, 39).real() == doctest::Approx(3.95));
    CHECK(r.cell_diagonal() == doctest::Approx(std::sqrt(0.02)));
    CHECK(r.contains({1.0, -1.0}));
    CHECK_FALSE(r.contains({1.0, 0.0}));
    nepsolve::SearchRegion bad = r;
    bad.n_re = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = r;
    bad.re_max = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("scan of a pole-free corner stays dark") {
    nepsolve::SearchRegion r{0.0, 0.5, -0.5, 0.0, 4, 4};
    for (OperatorFlavor fl : {OperatorFlavor::S_n, OperatorFlavor::I_plus_D_n}) {
        const auto field = nepsolve::scan_region(geometry::Curve::disk(1.0), 16, fl, r, Contour{}, 7);
        CHECK(field.rim.size() == 16);
        for (double v : field.rim) CHECK((std::isfinite(v) && v >= 0.0));
        if (fl == OperatorFlavor::S_n) CHECK(field.max_log10() <= -4.0);
        // the m = 0 eigenvalue of I + D is -i pi kappa J_1 H_0 ~ kappa^2 ln kappa, small near the origin;
        // cells are dark once it clears the indicator circle
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                const cplx k = r.point(i, j);
                const cplx lambda0 = cplx(0.0, -kPi) * k * specfun::bessel_j(1, k) * specfun::hankel1(0, k);
                if (fl == OperatorFlavor::S_n || std::abs(lambda0) > 1.5 * Contour{}.radius) {
                    CHECK(field.log10_value(i, j) <= -4.0);
                }
            }
        }
    }
}

TEST_CASE("scan lights up near a disk pole and is seed independent in location") {
    nepsolve::SearchRegion r{1.0, 1.6, -2.0, -1.4, 6, 6};
    const cplx pole(1.308012032273949, -1.681788804745845);
    for (OperatorFlavor fl : {OperatorFlavor::S_n, OperatorFlavor::I_plus_D_n}) {
        for (std::uint64_t seed : {1u, 2u}) {
            const auto field = nepsolve::scan_region(geometry::Curve::disk(1.0), 16, fl, r, Contour{}, seed, 2);
            const auto cands = nepsolve::find_candidates(field);
            REQUIRE(!cands.empty());
            CHECK(std::abs(cands.front().kappa - pole) <= r.cell_diagonal());
        }
    }
}

TEST_CASE("scan annotates failing points") {
    // |kappa rho| reaches the Bessel argument limit for this radius
    nepsolve::SearchRegion r{30.0, 40.0, -1.0, -0.5, 2, 2};
    const auto field = nepsolve::scan_region(geometry::Curve::disk(1.0), 4, OperatorFlavor::S_n, r, Contour{}, 1);
    for (const auto& e : field.errors) CHECK(!e.empty());
    std::ostringstream csv;
    nepsolve::write_field_csv(csv, field);
    CHECK(csv.str().find("nan") != std::string::npos);
}

TEST_CASE("candidate extraction takes strict local maxima above threshold") {
    nepsolve::IndicatorField field;
    field.region = nepsolve::SearchRegion{0.0, 1.0, -1.0, 0.0, 4, 4};
    field.rim.assign(16, 1e-16);
    field.errors.assign(16, "");
    field.rim[1 * 4 + 1] = 0.5;
    field.rim[3 * 4 + 3] = 1e-3;
    field.rim[3 * 4 + 0] = 1e-12;
    const auto c = nepsolve::find_candidates(field, -8.0);
    REQUIRE(c.size() == 2);
    CHECK(c[0].kappa == field.region.point(1, 1));
    CHECK(c[1].kappa == field.region.point(3, 3));
    CHECK(nepsolve::find_candidates(field, -13.0).size() == 3);
}

TEST_CASE("residual at a pole and at a generic point") {
    const auto disk = geometry::Curve::disk(1.0);
    const cplx pole(1.308012032273949, -1.681788804745845);
    for (OperatorFlavor fl : {OperatorFlavor::S_n, OperatorFlavor::I_plus_D_n}) {
        CHECK(nepsolve::residual(disk, 32, fl, pole) <= 1e-8);
        CHECK(nepsolve::residual(disk, 32, fl, {2.0, -2.0}) >= 1e-2);
        const double a = nepsolve::residual(disk, 32, fl, {2.0, -2.0});
        const double b = nepsolve::residual(disk, 32, fl, {2.0 + 1e-6, -2.0});
        CHECK(std::abs(a - b) <= 1e-5);
    }
}

TEST_CASE("contour moments recover the disk pole with multiplicity two") {
    const auto disk = geometry::Curve::disk(1.0);
    const cplx pole(1.308012032273949, -1.681788804745845);
    nepsolve::RefineOptions opt;
    opt.threads = 2;
    for (OperatorFlavor fl : {OperatorFlavor::S_n, OperatorFlavor::I_plus_D_n}) {
        const auto m = nepsolve::contour_moments(disk, 32, fl, {1.35, -1.65}, 0.15, opt);
        CHECK(m.rank == 2);
        REQUIRE(m.eigenvalues.size() == 2);
        for (cplx k : m.eigenvalues) CHECK(std::abs(k - pole) <= 1e-10);

        const auto empty = nepsolve::contour_moments(disk, 32, fl, {2.0, -3.0}, 0.1, opt);
        CHECK(empty.rank == 0);
        CHECK(empty.eigenvalues.empty());
    }
}

TEST_CASE("refinement is seed and quadrature invariant") {
    const auto disk = geometry::Curve::disk(1.0);
    const nepsolve::SearchRegion region;
    const std::vector<nepsolve::Candidate> cand{{{3.15, -2.25}, 0.0}};
    nepsolve::RefineOptions base;
    base.threads = 2;
    const auto ref = nepsolve::refine_poles(disk, 32, OperatorFlavor::I_plus_D_n, cand, region, base);
    REQUIRE(ref.poles.size() == 1);
    CHECK(std::abs(ref.poles[0].kappa - cplx(3.113082944985948, -2.218626274639877)) <= 1e-10);
    CHECK(ref.poles[0].count == 2);
    CHECK(ref.poles[0].residual <= 1e-8);

    nepsolve::RefineOptions other = base;
    other.seed = 99;
    const auto seeded = nepsolve::refine_poles(disk, 32, OperatorFlavor::I_plus_D_n, cand, region, other);
    REQUIRE(seeded.poles.size() == 1);
    CHECK(std::abs(seeded.poles[0].kappa - ref.poles[0].kappa) <= 1e-9);

    for (int nodes : {32, 64}) {
        nepsolve::RefineOptions a = base, b = base;
        a.nodes = nodes;
        b.nodes = 2 * nodes;
        a.polish = b.polish = false;
        const auto ra = nepsolve::refine_poles(disk, 32, OperatorFlavor::I_plus_D_n, cand, region, a);
        const auto rb = nepsolve::refine_poles(disk, 32, OperatorFlavor::I_plus_D_n, cand, region, b);
        REQUIRE(ra.poles.size() == 1);
        REQUIRE(rb.poles.size() == 1);
        CHECK(std::abs(ra.poles[0].kappa - rb.poles[0].kappa) <= 1e-10);
    }
}

TEST_CASE("refinement warns on empty contours and rejects real roots") {
    const auto disk = geometry::Curve::disk(1.0);
    const nepsolve::SearchRegion region;
    nepsolve::RefineOptions opt;
    const auto empty = nepsolve::refine_poles(disk, 16, OperatorFlavor::S_n, {{{2.0, -3.0}, 0.0}}, region, opt);
    CHECK(empty.poles.empty());
    CHECK(empty.warnings.size() == 1);

    // J_0(2.4048...) = 0: interior Dirichlet eigenvalue, singular S_n on the real axis
    nepsolve::SearchRegion strip{2.2, 2.6, -0.3, 0.3, 4, 4};
    const auto real = nepsolve::refine_poles(disk, 16, OperatorFlavor::S_n, {{{2.40, -0.02}, 0.0}}, strip, opt);
    CHECK(real.poles.empty());
    REQUIRE(!real.warnings.empty());
    CHECK(real.warnings[0].find("real root") != std::string::npos);

    // the I + D indicator glows near the branch point; those candidates are skipped, not refined
    const auto origin = nepsolve::refine_poles(geometry::Curve::peanut(), 16, OperatorFlavor::I_plus_D_n,
                                               {{{0.05, -0.25}, 0.0}}, region, opt);
    CHECK(origin.poles.empty());
    REQUIRE(origin.warnings.size() == 1);
    CHECK(origin.warnings[0].find("too close to kappa = 0") != std::string::npos);
}

TEST_CASE("refinement keeps close pole pairs apart") {
    const auto peanut = geometry::Curve::peanut();
    const nepsolve::SearchRegion region;
    const nepsolve::RefineOptions opt;
    // two poles 0.031 apart, both inside one contour; the off-centre one is polished
    const auto pair = nepsolve::refine_poles(peanut, 16, OperatorFlavor::I_plus_D_n, {{{3.45, -2.45}, 0.0}}, region, opt);
    REQUIRE(pair.poles.size() == 2);
    CHECK(std::abs(pair.poles[0].kappa - cplx(3.42195, -2.38848)) <= 1e-4);
    CHECK(std::abs(pair.poles[1].kappa - cplx(3.44763, -2.37195)) <= 1e-4);

    // the second pole sits just outside the contour and is picked up as a new candidate
    const auto outside = nepsolve::refine_poles(peanut, 16, OperatorFlavor::S_n, {{{2.45, -3.75}, 0.0}}, region, opt);
    REQUIRE(outside.poles.size() == 2);
    CHECK(std::abs(outside.poles[1].kappa - cplx(2.45, -3.75)) > region.cell_diagonal());
    for (const auto& p : outside.poles) CHECK(p.residual <= 1e-8);
}

TEST_CASE("exports") {
    nepsolve::IndicatorField field;
    field.region = nepsolve::SearchRegion{0.0, 1.0, -1.0, 0.0, 2, 2};
    field.rim = {1e-3, 1.0, 1e-20, 0.5};
    field.errors.assign(4, "");
    std::ostringstream csv;
    nepsolve::write_field_csv(csv, field);
    const std::string s = csv.str();
    CHECK(s.rfind("kappa_re,kappa_im,log10_rim\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 5);
    CHECK(s.find("0.25,-0.75,-3") != std::string::npos);

    std::ostringstream js;
    nepsolve::write_poles_json(js, {{cplx(1.5, -0.5), 1e-15, 2, OperatorFlavor::S_n, 32}}, 42);
    const std::string j = js.str();
    for (const char* key : {"\"kappa_re\"", "\"kappa_im\"", "\"residual\"", "\"count\"", "\"flavor\"", "\"n\"", "\"seed\""}) {
        CHECK(j.find(key) != std::string::npos);
    }
    CHECK(j.find("\"S_n\"") != std::string::npos);
}
