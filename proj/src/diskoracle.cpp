#include "scatpoles/diskoracle.hpp"
#include "scatpoles/parallel.hpp"
#include "scatpoles/specfun.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>

namespace scatpoles::diskoracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDedupTol = 1e-6;
constexpr double kMinDistance = 1e-6;
constexpr int kMaxNodes = 1 << 14;

struct Newton {
    bool converged = false;
    cplx kappa;
};

Newton newton(int nu, cplx kappa, int max_iterations) {
    for (int it = 0; it < max_iterations; ++it) {
        const cplx h = specfun::hankel1_int(nu, kappa);
        const cplx dh = specfun::hankel1_int_derivative(nu, kappa);
        const cplx step = h / dh;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return {};
        kappa -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(kappa))) return {true, kappa};
    }
    return {};
}

// (1/2 pi i) sum over nodes of H'/H dkappa, for a closed path sampled at n
// points by `path` (returns point and dkappa weight).
using Path = std::function<void(int n, int j, cplx& z, cplx& dz)>;

int count_on(int nu, int first_n, const Path& path, const std::string& what) {
    long long previous = 0;
    bool have_previous = false;
    for (int n = first_n; n <= kMaxNodes; n *= 2) {
        cplx sum = 0.0;
        for (int j = 0; j < n; ++j) {
            cplx z, dz;
            path(n, j, z, dz);
            const cplx h = specfun::hankel1_int(nu, z);
            const cplx dh = specfun::hankel1_int_derivative(nu, z);
            if (std::abs(h) < kMinDistance * std::abs(dh)) {
                throw CountError(what + " passes within 1e-6 of a zero of H_" + std::to_string(nu));
            }
            sum += dh / h * dz;
        }
        const cplx value = sum / cplx(0.0, 2.0 * kPi);
        const long long rounded = std::llround(value.real());
        const bool near = std::abs(value - double(rounded)) < 1e-3;
        if (near && have_previous && rounded == previous) return static_cast<int>(rounded);
        previous = rounded;
        have_previous = near;
    }
    throw CountError(what + ": argument principle did not settle on an integer");
}

}  // namespace

ZeroSearch hankel_zeros_in_region(int nu_max, const nepsolve::SearchRegion& region, const OracleOptions& options) {
    if (nu_max < 2) throw std::invalid_argument("nu_max must be >= 2");
    if (options.seeds_re < 1 || options.seeds_im < 1 || options.max_iterations < 1) {
        throw std::invalid_argument("oracle seed grid and iteration count must be positive");
    }
    region.validate();
    const int orders = nu_max - 1;
    std::vector<ZeroSearch> per_order(orders);
    parallel_for(static_cast<std::size_t>(orders), options.threads, [&](std::size_t k) {
        const int nu = static_cast<int>(k) + 2;
        ZeroSearch& out = per_order[k];
        for (int i = 0; i < options.seeds_re; ++i) {
            for (int j = 0; j < options.seeds_im; ++j) {
                const cplx seed(region.re_min + (i + 0.5) * (region.re_max - region.re_min) / options.seeds_re,
                                region.im_min + (j + 0.5) * (region.im_max - region.im_min) / options.seeds_im);
                Newton r;
                try {
                    r = newton(nu, seed, options.max_iterations);
                } catch (const specfun::DomainError&) {
                    r = {};
                }
                if (!r.converged) {
                    ++out.dropped;
                    continue;
                }
                if (!region.contains(r.kappa) || !(r.kappa.imag() < 0.0)) continue;
                const double res = std::abs(specfun::hankel1_int(nu, r.kappa));
                if (!(res <= options.accept_residual)) {
                    ++out.dropped;
                    continue;
                }
                const bool seen = std::any_of(out.zeros.begin(), out.zeros.end(),
                                              [&](const HankelZero& z) { return std::abs(z.kappa - r.kappa) <= kDedupTol; });
                if (!seen) out.zeros.push_back({nu, r.kappa, res});
            }
        }
        std::sort(out.zeros.begin(), out.zeros.end(),
                  [](const HankelZero& a, const HankelZero& b) { return a.kappa.real() < b.kappa.real(); });
    });
    ZeroSearch all;
    for (const ZeroSearch& z : per_order) {
        all.zeros.insert(all.zeros.end(), z.zeros.begin(), z.zeros.end());
        all.dropped += z.dropped;
    }
    return all;
}

int argument_principle_count(int nu, const nepsolve::Contour& contour) {
    if (!(contour.radius > 0.0)) throw std::invalid_argument("contour radius must be positive");
    const Path circle = [&](int n, int j, cplx& z, cplx& dz) {
        const cplx e = std::polar(1.0, 2.0 * kPi * j / n);
        z = contour.center + contour.radius * e;
        dz = cplx(0.0, 2.0 * kPi / n) * contour.radius * e;
    };
    return count_on(nu, 64, circle, "circle");
}

int argument_principle_count(int nu, double re_min, double re_max, double im_min, double im_max) {
    if (!(re_min < re_max) || !(im_min < im_max)) throw std::invalid_argument("empty rectangle");
    const cplx corners[4] = {{re_min, im_min}, {re_max, im_min}, {re_max, im_max}, {re_min, im_max}};
    // n nodes per side at midpoints of n equal panels; edges traversed counterclockwise
    const Path rect = [&](int n, int j, cplx& z, cplx& dz) {
        const int side = j / n, k = j % n;
        const cplx a = corners[side], b = corners[(side + 1) % 4];
        z = a + (b - a) * ((k + 0.5) / n);
        dz = (b - a) / double(n);
    };
    const Path wrapped = [&](int n, int j, cplx& z, cplx& dz) { rect(n / 4, j, z, dz); };
    return count_on(nu, 256, wrapped, "rectangle");
}

std::vector<CompletenessRow> completeness(const std::vector<HankelZero>& zeros, int nu_max,
                                          const nepsolve::SearchRegion& region, int tiles_re, int tiles_im,
                                          double inset) {
    if (tiles_re < 1 || tiles_im < 1 || !(inset >= 0.0)) throw std::invalid_argument("bad tiling");
    const double re_lo = region.re_min + (region.re_min <= 0.0 ? inset : 0.0);
    const double im_hi = region.im_max - (region.im_max >= 0.0 ? inset : 0.0);
    const double re_hi = region.re_max, im_lo = region.im_min;
    std::vector<CompletenessRow> rows;
    for (int nu = 2; nu <= nu_max; ++nu) {
        CompletenessRow row;
        row.nu = nu;
        for (const HankelZero& z : zeros) {
            if (z.nu == nu && z.kappa.real() > re_lo && z.kappa.real() < re_hi && z.kappa.imag() > im_lo &&
                z.kappa.imag() < im_hi) {
                ++row.newton;
            }
        }
        for (int i = 0; i < tiles_re; ++i) {
            for (int j = 0; j < tiles_im; ++j) {
                const double a = re_lo + (re_hi - re_lo) * i / tiles_re, b = re_lo + (re_hi - re_lo) * (i + 1) / tiles_re;
                const double c = im_lo + (im_hi - im_lo) * j / tiles_im, d = im_lo + (im_hi - im_lo) * (j + 1) / tiles_im;
                row.counted += argument_principle_count(nu, a, b, c, d);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

void write_zeros_json(std::ostream& out, const std::vector<HankelZero>& zeros) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const HankelZero& z : zeros) {
        arr.push_back({{"nu", z.nu},
                       {"kappa_re", z.kappa.real()},
                       {"kappa_im", z.kappa.imag()},
                       {"newton_residual", z.newton_residual}});
    }
    out << arr.dump(2) << "\n";
}

}  // namespace scatpoles::diskoracle
