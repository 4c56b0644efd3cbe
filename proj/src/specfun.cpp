#include "scatpoles/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace scatpoles::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBranchCutGuard = 1e-12;

// Neumaier summation applied to real and imaginary parts independently.
class CompensatedSum {
public:
    void add(cplx v) {
        add_part(re_, re_c_, v.real());
        add_part(im_, im_c_, v.imag());
    }
    cplx value() const { return {re_ + re_c_, im_ + im_c_}; }

private:
    static void add_part(double& sum, double& comp, double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

void check_range(cplx w) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
        throw DomainError("bessel: non-finite argument");
    }
    if (std::abs(w) >= kMaxArgument) {
        throw DomainError("bessel: |w| = " + std::to_string(std::abs(w)) +
                          " outside the validated series range |w| < 50");
    }
}

void check_singular_branch(cplx w) {
    if (w == cplx(0.0, 0.0)) {
        throw DomainError("bessel: Y and H are singular at w = 0");
    }
    if (std::abs(std::arg(w)) > kPi - kBranchCutGuard) {
        throw DomainError("bessel: argument on or near the branch cut arg(w) = +-pi");
    }
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

struct SeriesSums {
    cplx j;         // sum of t_k
    cplx weighted;  // sum of h_k t_k
};

// Terms t_k = (-1)^k (w/2)^(order+2k) / (k! (order+k)!). The weights h_k are
// H_k for order 0 and H_k + H_{k+1} for order 1 (H_k the harmonic numbers).
SeriesSums ascending_series(int order, cplx w, bool weighted, const SpecFunConfig& cfg) {
    const cplx half = 0.5 * w;
    const cplx neg_q = -half * half;
    cplx term = std::pow(half, order) / factorial(order);
    CompensatedSum jsum;
    CompensatedSum wsum;
    jsum.add(term);
    double harmonic = 0.0;  // H_k
    if (weighted && order == 1) wsum.add(term);  // h_0 = H_0 + H_1 = 1
    for (int k = 1; k < cfg.max_terms; ++k) {
        term *= neg_q / (static_cast<double>(k) * static_cast<double>(order + k));
        harmonic += 1.0 / k;
        jsum.add(term);
        double h = 0.0;
        if (weighted) {
            h = order == 0 ? harmonic : 2.0 * harmonic + 1.0 / (k + 1);
            wsum.add(h * term);
        }
        const double mag = std::abs(term);
        const bool j_done = mag <= cfg.series_tol * std::abs(jsum.value());
        const bool w_done = !weighted || h * mag <= cfg.series_tol * std::abs(wsum.value());
        if (j_done && w_done) {
            return {jsum.value(), wsum.value()};
        }
    }
    throw DomainError("bessel: series did not converge within max_terms");
}

void check_low_order(int order) {
    if (order != 0 && order != 1) {
        throw std::invalid_argument("bessel_y/hankel1: order must be 0 or 1");
    }
}

}  // namespace

void SpecFunConfig::validate() const {
    if (!(series_tol > 0.0 && series_tol < 1e-8)) {
        throw std::invalid_argument("SpecFunConfig: series_tol must lie in (0, 1e-8)");
    }
    if (max_terms < 50) {
        throw std::invalid_argument("SpecFunConfig: max_terms must be >= 50");
    }
}

cplx bessel_j(int order, cplx w, const SpecFunConfig& cfg) {
    if (order < 0) throw std::invalid_argument("bessel_j: order must be >= 0");
    check_range(w);
    if (w == cplx(0.0, 0.0)) return order == 0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
    return ascending_series(order, w, false, cfg).j;
}

BesselPair bessel_jy(int order, cplx w, const SpecFunConfig& cfg) {
    check_low_order(order);
    check_range(w);
    check_singular_branch(w);
    const SeriesSums sums = ascending_series(order, w, true, cfg);
    const cplx log_term = std::log(0.5 * w) + kEulerGamma;
    cplx y;
    if (order == 0) {
        y = (2.0 / kPi) * (log_term * sums.j - sums.weighted);
    } else {
        y = (2.0 / kPi) * log_term * sums.j - 2.0 / (kPi * w) - sums.weighted / kPi;
    }
    return {sums.j, y};
}

cplx bessel_y(int order, cplx w, const SpecFunConfig& cfg) {
    return bessel_jy(order, w, cfg).y;
}

cplx hankel1(int order, cplx w, const SpecFunConfig& cfg) {
    const BesselPair p = bessel_jy(order, w, cfg);
    return p.j + cplx(0.0, 1.0) * p.y;
}

HankelValue hankel1_int_checked(int order, cplx w, const SpecFunConfig& cfg) {
    if (order < 0 || order > kMaxRecurrenceOrder) {
        throw std::invalid_argument("hankel1_int: order must lie in [0, 40]");
    }
    const cplx h0 = hankel1(0, w, cfg);
    if (order == 0) return {h0, false};
    cplx prev = h0;
    cplx cur = hankel1(1, w, cfg);
    for (int k = 1; k < order; ++k) {
        const cplx next = (2.0 * k / w) * cur - prev;
        prev = cur;
        cur = next;
    }
    return {cur, std::abs(cur) > 1e12 * std::abs(h0)};
}

cplx hankel1_int(int order, cplx w, const SpecFunConfig& cfg) {
    return hankel1_int_checked(order, w, cfg).value;
}

cplx hankel1_int_derivative(int order, cplx w, const SpecFunConfig& cfg) {
    if (order < 1) throw std::invalid_argument("hankel1_int_derivative: order must be >= 1");
    return hankel1_int(order - 1, w, cfg) - hankel1_int(order, w, cfg) * static_cast<double>(order) / w;
}

}  // namespace scatpoles::specfun
