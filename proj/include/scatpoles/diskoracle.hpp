#pragma once

// Scattering poles of the sound-soft unit disk: zeros of H_nu^(1)(kappa), nu >= 2.

#include "scatpoles/nepsolve.hpp"

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace scatpoles::diskoracle {

using cplx = std::complex<double>;

struct HankelZero {
    int nu = 2;
    cplx kappa;
    double newton_residual = 0.0;  ///< |H_nu(kappa)|
};

struct OracleOptions {
    int seeds_re = 24;  ///< Newton seed grid over the region
    int seeds_im = 24;
    int max_iterations = 60;
    double accept_residual = 1e-12;
    int threads = 1;
};

struct ZeroSearch {
    std::vector<HankelZero> zeros;  ///< sorted by nu, then real part
    int dropped = 0;                ///< seeds that did not converge to an accepted zero
};

ZeroSearch hankel_zeros_in_region(int nu_max, const nepsolve::SearchRegion& region, const OracleOptions& options = {});

class CountError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Zeros of H_nu inside the circle, from (1/2 pi i) \oint H_nu'/H_nu. The node
/// count doubles from 64 until two successive values round to the same integer
/// and sit within 1e-3 of it; CountError after 2^14 nodes or when a node lies
/// closer than 1e-6 (Newton distance estimate) to a zero.
int argument_principle_count(int nu, const nepsolve::Contour& contour);

/// Same count over the boundary of [re_min, re_max] x [im_min, im_max], with
/// the node count per side doubling from 64.
int argument_principle_count(int nu, double re_min, double re_max, double im_min, double im_max);

struct CompletenessRow {
    int nu = 2;
    int newton = 0;   ///< accepted Newton zeros inside the certified rectangle
    int counted = 0;  ///< argument-principle total over the tiles
};

/// Tiles the region, pulled in by `inset` on the sides touching Re = 0 and
/// Im = 0, and compares per-order counts with the Newton zeros.
std::vector<CompletenessRow> completeness(const std::vector<HankelZero>& zeros, int nu_max,
                                          const nepsolve::SearchRegion& region, int tiles_re = 4, int tiles_im = 4,
                                          double inset = 0.05);

void write_zeros_json(std::ostream& out, const std::vector<HankelZero>& zeros);

}  // namespace scatpoles::diskoracle
