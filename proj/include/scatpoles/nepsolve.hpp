#pragma once

// Pole location for kappa -> W_n(kappa): a spectral-indicator scan over a
// rectangle of the kappa plane followed by contour-moment extraction.

#include "scatpoles/galerkin.hpp"
#include "scatpoles/geometry.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace scatpoles::nepsolve {

using cplx = std::complex<double>;
using galerkin::ComplexMatrix;
using galerkin::OperatorFlavor;
using Vector = Eigen::VectorXcd;

inline constexpr std::uint64_t kDefaultSeed = 20240917;

class SingularShiftError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IllConditionedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Circle z0 + r e^{i theta_j}, theta_j = pi j/m, j = 0..2m-1.
struct Contour {
    cplx center = 0.0;
    double radius = 0.3;
    int m = 16;

    void validate() const;
    cplx node(int j) const;
    int node_count() const { return 2 * m; }
};

/// Rectangle (re_min, re_max) x (im_min, im_max), sampled at the centers of an
/// n_re x n_im cell grid.
struct SearchRegion {
    double re_min = 0.0, re_max = 4.0;
    double im_min = -4.0, im_max = 0.0;
    int n_re = 40, n_im = 40;

    void validate() const;
    double cell_re() const { return (re_max - re_min) / n_re; }
    double cell_im() const { return (im_max - im_min) / n_im; }
    double cell_diagonal() const;
    cplx point(int i, int j) const;
    bool contains(cplx z) const;
};

/// Seeded unit-norm complex Gaussian vector.
Vector random_unit_vector(int size, std::uint64_t seed);
/// Seeded complex Gaussian block with unit-norm columns.
ComplexMatrix random_block(int rows, int cols, std::uint64_t seed);

/// R f = (1/2m) sum_j (z_j - z0) (z_j I - W)^{-1} f over the contour nodes z_j.
Vector rim_apply(const ComplexMatrix& w, const Contour& contour, const Vector& f);
/// |R (R f / |R f|)|; f must have unit norm.
double rim_indicator(const ComplexMatrix& w, const Contour& contour, const Vector& f);

/// Matrix the scan indicator is applied to. I + D_n is used as is. S_n is
/// conjugated by diag(sqrt(max(1, |m|))), which removes the 1/|m| accumulation
/// of its spectrum at zero without moving the singular points.
ComplexMatrix scan_matrix(const galerkin::OperatorMatrix& w);

struct IndicatorField {
    SearchRegion region;
    int n = 0;
    OperatorFlavor flavor = OperatorFlavor::S_n;
    Contour contour;
    std::uint64_t seed = kDefaultSeed;
    std::vector<double> rim;          ///< rim[i * n_im + j] at region.point(i, j)
    std::vector<std::string> errors;  ///< empty where the point succeeded

    double value(int i, int j) const { return rim[static_cast<std::size_t>(i) * region.n_im + j]; }
    double log10_value(int i, int j) const;
    bool ok(int i, int j) const { return errors[static_cast<std::size_t>(i) * region.n_im + j].empty(); }
    double max_log10() const;
};

IndicatorField scan_region(const geometry::Curve& curve, int n, OperatorFlavor flavor, const SearchRegion& region,
                           const Contour& contour, std::uint64_t seed, int threads = 1);

struct Candidate {
    cplx kappa;
    double log10_rim = 0.0;
};

/// Cells whose log10 RIM is a strict maximum over their 8 neighbours and above
/// threshold, brightest first.
std::vector<Candidate> find_candidates(const IndicatorField& field, double threshold = -8.0);

struct RefineOptions {
    double radius = 0.0;  ///< 0: one cell diagonal of the scan region
    int nodes = 64;       ///< m'; 2m' quadrature nodes
    int block = 8;        ///< columns of the probing block
    double rank_tol = 1e-8;
    double accept_residual = 1e-8;
    bool polish = true;
    std::uint64_t seed = kDefaultSeed;
    int threads = 1;

    void validate() const;
};

struct PoleEstimate {
    cplx kappa;
    double residual = 0.0;
    int count = 1;
    OperatorFlavor flavor = OperatorFlavor::S_n;
    int n = 0;
};

struct MomentResult {
    std::vector<cplx> eigenvalues;  ///< inside the circle
    std::vector<cplx> nearby;       ///< just outside (1 <= |mu| < 2), seen through the rank
    std::vector<double> singular_values;
    int rank = 0;
};

/// Contour moments A_p = (1/2m') sum_j R e^{i phi_j} ((kappa_j - c)/R)^p W(kappa_j)^{-1} V,
/// p = 0, 1, reduced by a rank-truncated SVD of A_0. rank 0 means no pole.
MomentResult contour_moments(const geometry::Curve& curve, int n, OperatorFlavor flavor, cplx center, double radius,
                             const RefineOptions& options);

struct RefineResult {
    std::vector<PoleEstimate> poles;
    std::vector<std::string> warnings;
};

/// Refines every candidate and merges duplicates. Poles are reported once per
/// cluster of eigenvalues closer than 1e-6, count being the cluster size.
/// Eigenvalues seen just outside a contour become extra candidates unless an
/// earlier contour centre lies within R/2.
RefineResult refine_poles(const geometry::Curve& curve, int n, OperatorFlavor flavor,
                          const std::vector<Candidate>& candidates, const SearchRegion& region,
                          const RefineOptions& options);

/// Smallest singular value of W_n(kappa).
double residual(const geometry::Curve& curve, int n, OperatorFlavor flavor, cplx kappa);

void write_field_csv(std::ostream& out, const IndicatorField& field);
void write_poles_json(std::ostream& out, const std::vector<PoleEstimate>& poles, std::uint64_t seed);

}  // namespace scatpoles::nepsolve
