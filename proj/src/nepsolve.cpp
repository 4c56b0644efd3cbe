#include "scatpoles/nepsolve.hpp"
#include "scatpoles/parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace scatpoles::nepsolve {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClusterTol = 1e-6;
constexpr double kMinRcond = 1e-14;
constexpr double kRealAxisTol = 1e-8;

// Mixes the user seed into separate streams for f and V.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

ComplexMatrix gaussian(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    ComplexMatrix out(rows, cols);
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) {
            const double re = g(rng);
            out(r, c) = {re, g(rng)};
        }
    }
    return out;
}

Eigen::PartialPivLU<ComplexMatrix> factor(const ComplexMatrix& m, cplx at) {
    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    const double rc = lu.rcond();
    if (!(rc > kMinRcond)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "singular shifted system at %.6g%+.6gi (rcond %.3g)", at.real(), at.imag(), rc);
        throw SingularShiftError(buf);
    }
    return lu;
}

struct Cluster {
    cplx kappa;
    int count;
};

std::vector<Cluster> cluster(std::vector<cplx> values) {
    std::sort(values.begin(), values.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<Cluster> out;
    std::vector<bool> used(values.size(), false);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (used[i]) continue;
        cplx sum = values[i];
        int count = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            if (!used[j] && std::abs(values[j] - values[i]) < kClusterTol) {
                sum += values[j];
                ++count;
                used[j] = true;
            }
        }
        out.push_back({sum / double(count), count});
    }
    return out;
}

std::string format_kappa(cplx k) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.10f%+.10fi", k.real(), k.imag());
    return buf;
}

}  // namespace

void Contour::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("contour radius must be positive");
    if (m < 4) throw std::invalid_argument("contour m must be >= 4");
    if (!std::isfinite(center.real()) || !std::isfinite(center.imag())) {
        throw std::invalid_argument("contour center must be finite");
    }
}

cplx Contour::node(int j) const { return center + std::polar(radius, kPi * j / m); }

void SearchRegion::validate() const {
    if (!(re_min < re_max) || !(im_min < im_max)) throw std::invalid_argument("search region bounds are empty");
    if (!std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_min) || !std::isfinite(im_max)) {
        throw std::invalid_argument("search region bounds must be finite");
    }
    if (n_re < 2 || n_im < 2) throw std::invalid_argument("scan grid counts must be >= 2");
}

double SearchRegion::cell_diagonal() const { return std::hypot(cell_re(), cell_im()); }

cplx SearchRegion::point(int i, int j) const {
    return {re_min + (i + 0.5) * cell_re(), im_min + (j + 0.5) * cell_im()};
}

bool SearchRegion::contains(cplx z) const {
    return z.real() > re_min && z.real() < re_max && z.imag() > im_min && z.imag() < im_max;
}

Vector random_unit_vector(int size, std::uint64_t seed) {
    Vector v = gaussian(size, 1, stream_seed(seed, 0)).col(0);
    return v / v.norm();
}

ComplexMatrix random_block(int rows, int cols, std::uint64_t seed) {
    ComplexMatrix v = gaussian(rows, cols, stream_seed(seed, 1));
    for (int c = 0; c < cols; ++c) v.col(c) /= v.col(c).norm();
    return v;
}

namespace {

class ShiftedSolver {
public:
    ShiftedSolver(const ComplexMatrix& w, const Contour& contour) : contour_(contour) {
        contour.validate();
        lus_.reserve(contour.node_count());
        for (int j = 0; j < contour.node_count(); ++j) {
            const cplx z = contour.node(j);
            ComplexMatrix shifted = -w;
            shifted.diagonal().array() += z;
            lus_.push_back(factor(shifted, z));
        }
    }

    Vector apply(const Vector& f) const {
        Vector sum = Vector::Zero(f.size());
        for (int j = 0; j < contour_.node_count(); ++j) {
            sum += (contour_.node(j) - contour_.center) * lus_[j].solve(f);
        }
        return sum / double(contour_.node_count());
    }

private:
    Contour contour_;
    std::vector<Eigen::PartialPivLU<ComplexMatrix>> lus_;
};

}  // namespace

Vector rim_apply(const ComplexMatrix& w, const Contour& contour, const Vector& f) {
    return ShiftedSolver(w, contour).apply(f);
}

double rim_indicator(const ComplexMatrix& w, const Contour& contour, const Vector& f) {
    if (w.rows() != w.cols() || w.rows() != f.size()) throw std::invalid_argument("rim_indicator: size mismatch");
    const ShiftedSolver solver(w, contour);
    const Vector rf = solver.apply(f);
    const double norm = rf.norm();
    if (norm == 0.0) return 0.0;
    return solver.apply(rf / norm).norm();
}

ComplexMatrix scan_matrix(const galerkin::OperatorMatrix& w) {
    if (w.flavor == OperatorFlavor::I_plus_D_n) return w.entries;
    Eigen::VectorXd d(w.size());
    for (int m = -w.n; m <= w.n; ++m) d(m + w.n) = std::sqrt(std::max(1.0, double(std::abs(m))));
    return d.asDiagonal() * w.entries * d.asDiagonal();
}

double IndicatorField::log10_value(int i, int j) const {
    if (!ok(i, j)) return std::numeric_limits<double>::quiet_NaN();
    return std::log10(std::max(value(i, j), 1e-300));
}

double IndicatorField::max_log10() const {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < region.n_re; ++i) {
        for (int j = 0; j < region.n_im; ++j) {
            if (ok(i, j)) best = std::max(best, log10_value(i, j));
        }
    }
    return best;
}

IndicatorField scan_region(const geometry::Curve& curve, int n, OperatorFlavor flavor, const SearchRegion& region,
                           const Contour& contour, std::uint64_t seed, int threads) {
    region.validate();
    contour.validate();
    IndicatorField field;
    field.region = region;
    field.n = n;
    field.flavor = flavor;
    field.contour = contour;
    field.seed = seed;
    const std::size_t count = static_cast<std::size_t>(region.n_re) * region.n_im;
    field.rim.assign(count, 0.0);
    field.errors.assign(count, std::string());
    const Vector f = random_unit_vector(2 * n + 1, seed);

    parallel_for(count, threads, [&](std::size_t k) {
        const int i = static_cast<int>(k / region.n_im), j = static_cast<int>(k % region.n_im);
        const cplx kappa = region.point(i, j);
        try {
            const auto w = galerkin::assemble_operator(curve, kappa, n, flavor);
            field.rim[k] = rim_indicator(scan_matrix(w), contour, f);
        } catch (const std::exception& e) {
            field.rim[k] = 0.0;
            field.errors[k] = e.what();
            if (field.errors[k].empty()) field.errors[k] = "error";
        }
    });
    return field;
}

std::vector<Candidate> find_candidates(const IndicatorField& field, double threshold) {
    const int nr = field.region.n_re, ni = field.region.n_im;
    std::vector<std::pair<Candidate, int>> found;
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < ni; ++j) {
            if (!field.ok(i, j)) continue;
            const double v = field.log10_value(i, j);
            if (!(v > threshold)) continue;
            bool peak = true;
            for (int di = -1; di <= 1 && peak; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    const int a = i + di, b = j + dj;
                    if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= nr || b >= ni || !field.ok(a, b)) continue;
                    const double u = field.log10_value(a, b);
                    // ties go to the first cell in scan order
                    if (u > v || (u == v && a * ni + b < i * ni + j)) {
                        peak = false;
                        break;
                    }
                }
            }
            if (peak) found.push_back({{field.region.point(i, j), v}, i * ni + j});
        }
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        return a.first.log10_rim != b.first.log10_rim ? a.first.log10_rim > b.first.log10_rim : a.second < b.second;
    });
    std::vector<Candidate> out;
    for (const auto& c : found) out.push_back(c.first);
    return out;
}

void RefineOptions::validate() const {
    if (!(radius >= 0.0) || !std::isfinite(radius)) throw std::invalid_argument("refine radius must be >= 0");
    if (nodes < 4) throw std::invalid_argument("refine nodes must be >= 4");
    if (block < 1) throw std::invalid_argument("refine block must be >= 1");
    if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw std::invalid_argument("rank tol must lie in (0, 1)");
    if (!(accept_residual > 0.0)) throw std::invalid_argument("acceptance residual must be positive");
}

MomentResult contour_moments(const geometry::Curve& curve, int n, OperatorFlavor flavor, cplx center, double radius,
                             const RefineOptions& options) {
    options.validate();
    if (!(radius > 0.0)) throw std::invalid_argument("contour_moments: radius must be positive");
    const int size = 2 * n + 1;
    const int block = std::min(options.block, size);
    const int count = 2 * options.nodes;
    const ComplexMatrix v = random_block(size, block, options.seed);

    std::vector<ComplexMatrix> solves(count);
    parallel_for(static_cast<std::size_t>(count), options.threads, [&](std::size_t j) {
        const cplx zeta = std::polar(1.0, kPi * double(j) / options.nodes);
        const cplx kappa = center + radius * zeta;
        const auto w = galerkin::assemble_operator(curve, kappa, n, flavor);
        solves[j] = factor(w.entries, kappa).solve(v);
    });

    ComplexMatrix a0 = ComplexMatrix::Zero(size, block), a1 = ComplexMatrix::Zero(size, block);
    double scale = 0.0;
    for (int j = 0; j < count; ++j) {
        const cplx zeta = std::polar(1.0, kPi * double(j) / options.nodes);
        const cplx weight = radius * zeta / double(count);
        a0 += weight * solves[j];
        a1 += (weight * zeta) * solves[j];
        scale = std::max(scale, solves[j].norm());
    }

    Eigen::JacobiSVD<ComplexMatrix> svd(a0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    MomentResult out;
    out.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
    // quadrature of a holomorphic integrand leaves only rounding noise
    const double floor = 1e-11 * radius * scale;
    const double cut = std::max(options.rank_tol * sigma(0), floor);
    int rank = 0;
    while (rank < sigma.size() && sigma(rank) > cut) ++rank;
    out.rank = rank;
    if (rank == 0) return out;
    if (rank == sigma.size()) {
        throw IllConditionedError("contour encloses at least as many eigenvalues as probing columns near " +
                                  format_kappa(center));
    }
    if (sigma(rank - 1) / sigma(rank) < 10.0) {
        throw IllConditionedError("no singular value gap in contour moments near " + format_kappa(center));
    }

    const ComplexMatrix u = svd.matrixU().leftCols(rank);
    const ComplexMatrix w = svd.matrixV().leftCols(rank);
    const Eigen::VectorXd inv = sigma.head(rank).cwiseInverse();
    const ComplexMatrix b = u.adjoint() * a1 * w * inv.asDiagonal();
    Eigen::ComplexEigenSolver<ComplexMatrix> es(b, false);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const cplx mu = es.eigenvalues()(k);
        if (std::abs(mu) < 1.0) {
            out.eigenvalues.push_back(center + radius * mu);
        } else if (std::abs(mu) < 2.0) {
            out.nearby.push_back(center + radius * mu);
        }
    }
    return out;
}

double residual(const geometry::Curve& curve, int n, OperatorFlavor flavor, cplx kappa) {
    const auto w = galerkin::assemble_operator(curve, kappa, n, flavor);
    // BDCSVD can report exact zeros for the smallest values here; Jacobi does not
    const Eigen::JacobiSVD<ComplexMatrix> svd(w.entries);
    return svd.singularValues().minCoeff();
}

RefineResult refine_poles(const geometry::Curve& curve, int n, OperatorFlavor flavor,
                          const std::vector<Candidate>& candidates, const SearchRegion& region,
                          const RefineOptions& options) {
    options.validate();
    const double radius = options.radius > 0.0 ? options.radius : region.cell_diagonal();
    RefineResult result;
    std::vector<Candidate> queue(candidates.begin(), candidates.end());
    for (std::size_t next = 0; next < queue.size(); ++next) {
        const Candidate cand = queue[next];
        // log branch point of the kernels at kappa = 0; keep the contour at least R away
        if (std::abs(cand.kappa) <= 2.0 * radius) {
            result.warnings.push_back("candidate " + format_kappa(cand.kappa) + " skipped, contour too close to kappa = 0");
            continue;
        }
        const MomentResult coarse = contour_moments(curve, n, flavor, cand.kappa, radius, options);
        for (cplx z : coarse.nearby) {
            const bool covered = std::any_of(queue.begin(), queue.end(),
                                             [&](const Candidate& q) { return std::abs(q.kappa - z) < 0.5 * radius; });
            if (!covered && region.contains(z)) queue.push_back({z, std::numeric_limits<double>::quiet_NaN()});
        }
        if (coarse.rank == 0) {
            result.warnings.push_back("no pole inside contour around " + format_kappa(cand.kappa));
            continue;
        }
        for (Cluster c : cluster(coarse.eigenvalues)) {
            // trapezoid error grows like |mu|^(2m'), so only estimates far from the center need a second pass
            if (options.polish && std::abs(c.kappa - cand.kappa) > 0.5 * radius) {
                const MomentResult fine = contour_moments(curve, n, flavor, c.kappa, 0.5 * radius, options);
                const cplx coarse_kappa = c.kappa;
                double best = 0.25 * radius;
                for (const Cluster& f : cluster(fine.eigenvalues)) {
                    const double d = std::abs(f.kappa - coarse_kappa);
                    if (d < best) {
                        best = d;
                        c = f;
                    }
                }
            }
            if (!region.contains(c.kappa)) continue;
            if (std::abs(c.kappa.imag()) <= kRealAxisTol) {
                // interior Dirichlet/Neumann eigenvalues make W_n singular on the real axis
                result.warnings.push_back("real root " + format_kappa(c.kappa) + " is not a scattering pole");
                continue;
            }
            const double res = residual(curve, n, flavor, c.kappa);
            if (!(res <= options.accept_residual)) {
                char buf[64];
                std::snprintf(buf, sizeof buf, " rejected, residual %.3g", res);
                result.warnings.push_back("estimate " + format_kappa(c.kappa) + buf);
                continue;
            }
            bool merged = false;
            for (PoleEstimate& p : result.poles) {
                if (std::abs(p.kappa - c.kappa) < kClusterTol) {
                    if (res < p.residual) p = {c.kappa, res, c.count, flavor, n};
                    merged = true;
                    break;
                }
            }
            if (!merged) result.poles.push_back({c.kappa, res, c.count, flavor, n});
        }
    }
    std::sort(result.poles.begin(), result.poles.end(), [](const PoleEstimate& a, const PoleEstimate& b) {
        return a.kappa.real() != b.kappa.real() ? a.kappa.real() < b.kappa.real() : a.kappa.imag() < b.kappa.imag();
    });
    return result;
}

void write_field_csv(std::ostream& out, const IndicatorField& field) {
    out << "kappa_re,kappa_im,log10_rim\n";
    char buf[128];
    for (int i = 0; i < field.region.n_re; ++i) {
        for (int j = 0; j < field.region.n_im; ++j) {
            const cplx k = field.region.point(i, j);
            if (field.ok(i, j)) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", k.real(), k.imag(), field.log10_value(i, j));
            } else {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,nan\n", k.real(), k.imag());
            }
            out << buf;
        }
    }
}

void write_poles_json(std::ostream& out, const std::vector<PoleEstimate>& poles, std::uint64_t seed) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const PoleEstimate& p : poles) {
        arr.push_back({{"kappa_re", p.kappa.real()},
                       {"kappa_im", p.kappa.imag()},
                       {"residual", p.residual},
                       {"count", p.count},
                       {"flavor", galerkin::to_string(p.flavor)},
                       {"n", p.n},
                       {"seed", seed}});
    }
    out << arr.dump(2) << "\n";
}

}  // namespace scatpoles::nepsolve
