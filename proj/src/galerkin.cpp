#include "scatpoles/galerkin.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace scatpoles::galerkin {

namespace {

constexpr double kPi = std::numbers::pi;

// F(j + n, l) = exp(-i j s_l), with the phase reduced exactly modulo 2n+1.
ComplexMatrix dft_matrix(int n) {
    const int size = 2 * n + 1;
    ComplexMatrix f(size, size);
    for (int j = -n; j <= n; ++j) {
        for (int l = 0; l < size; ++l) {
            const long long r = ((static_cast<long long>(j) * l) % size + size) % size;
            const double phase = -2.0 * kPi * static_cast<double>(r) / size;
            f(j + n, l) = std::polar(1.0, phase);
        }
    }
    return f;
}

}  // namespace

std::vector<double> knots(int n) {
    const int size = 2 * n + 1;
    std::vector<double> out(size);
    for (int l = 0; l < size; ++l) out[l] = 2.0 * kPi * l / size;
    return out;
}

cplx TrigCoeffs::evaluate(double s, double t) const {
    cplx sum = 0.0;
    for (int j = -n; j <= n; ++j) {
        for (int k = -n; k <= n; ++k) {
            sum += (*this)(j, k) * std::polar(1.0, j * s + k * t);
        }
    }
    return sum / (2.0 * kPi);
}

TrigCoeffs interpolate2d(const ComplexMatrix& samples, int n) {
    const int size = 2 * n + 1;
    if (n < 1 || samples.rows() != size || samples.cols() != size) {
        throw std::invalid_argument("interpolate2d: samples must be (2n+1) x (2n+1)");
    }
    const ComplexMatrix f = dft_matrix(n);
    TrigCoeffs out;
    out.n = n;
    out.c = (2.0 * kPi / (static_cast<double>(size) * size)) * (f * samples * f.transpose());
    return out;
}

ComplexMatrix assemble_B(const TrigCoeffs& coeffs) {
    const int n = coeffs.n;
    const int size = 2 * n + 1;
    ComplexMatrix m(size, size);
    for (int i = -n; i <= n; ++i) {
        for (int l = -n; l <= n; ++l) m(i + n, l + n) = coeffs(i, -l);
    }
    return m;
}

ComplexMatrix assemble_A(const TrigCoeffs& coeffs) {
    const int n = coeffs.n;
    const int size = 2 * n + 1;
    std::vector<double> inv_abs(2 * size + 1);
    for (int p = -size; p <= size; ++p) inv_abs[p + size] = p == 0 ? 0.0 : 1.0 / std::abs(p);

    ComplexMatrix m(size, size);
    for (int l = -n; l <= n; ++l) {
        for (int i = -n; i <= n; ++i) {
            const int p_lo = std::max(l - n, i - n);
            const int p_hi = std::min(l + n, i + n);
            cplx sum = 0.0;
            for (int p = p_lo; p <= p_hi; ++p) {
                sum += coeffs.c(i - p + n, p - l + n) * inv_abs[p + size];
            }
            m(i + n, l + n) = -sum;
        }
    }
    return m;
}

std::string to_string(OperatorFlavor flavor) {
    return flavor == OperatorFlavor::S_n ? "S_n" : "I_plus_D_n";
}

OperatorFlavor operator_flavor_from_string(const std::string& name) {
    if (name == "S_n" || name == "single") return OperatorFlavor::S_n;
    if (name == "I_plus_D_n" || name == "double") return OperatorFlavor::I_plus_D_n;
    throw std::invalid_argument("unknown operator flavor '" + name + "'");
}

kernels::Flavor kernel_flavor(OperatorFlavor flavor) {
    return flavor == OperatorFlavor::S_n ? kernels::Flavor::single_layer : kernels::Flavor::double_layer;
}

KernelSamples sample_kernels(const kernels::KernelSplit& split, int n) {
    const int size = 2 * n + 1;
    const std::vector<double> t = knots(n);
    std::vector<geometry::CurveFrame> frames;
    frames.reserve(size);
    for (double v : t) frames.push_back(split.curve().frame(v));
    std::vector<double> log_factor(size, 0.0);
    for (int d = 1; d < size; ++d) log_factor[d] = kernels::log_sin2(2.0 * kPi * d / size);

    KernelSamples out{ComplexMatrix(size, size), ComplexMatrix(size, size)};
    for (int l = 0; l < size; ++l) {
        const kernels::KernelSplit::Values diag = split.diagonal(frames[l]);
        out.a(l, l) = diag.a;
        out.b(l, l) = diag.b;
        for (int m = l + 1; m < size; ++m) {
            // rho and therefore J, Y are symmetric in the knot pair
            const geometry::Chord lm = geometry::chord(frames[l], frames[m]);
            const geometry::Chord ml = geometry::chord(frames[m], frames[l]);
            const specfun::BesselPair jy = specfun::bessel_jy(split.bessel_order(), split.kappa() * lm.rho);
            const auto v_lm = split.off_diagonal(frames[m], lm, log_factor[(l - m + size) % size], jy);
            const auto v_ml = split.off_diagonal(frames[l], ml, log_factor[(m - l) % size], jy);
            out.a(l, m) = v_lm.a;
            out.b(l, m) = v_lm.b;
            out.a(m, l) = v_ml.a;
            out.b(m, l) = v_ml.b;
        }
    }
    return out;
}

OperatorMatrix assemble_operator(const geometry::Curve& curve, cplx kappa, int n, OperatorFlavor flavor) {
    if (n < 2) throw std::invalid_argument("assemble_operator: n must be >= 2");
    const kernels::KernelSplit split(curve, kappa, kernel_flavor(flavor));
    const KernelSamples samples = sample_kernels(split, n);
    OperatorMatrix out;
    out.n = n;
    out.flavor = flavor;
    out.kappa = kappa;
    out.entries = assemble_A(interpolate2d(samples.a, n)) + assemble_B(interpolate2d(samples.b, n));
    if (flavor == OperatorFlavor::I_plus_D_n) {
        out.entries += ComplexMatrix::Identity(out.size(), out.size());
    }
    return out;
}

OperatorMatrix k_operator_matrix(int n) {
    if (n < 1) throw std::invalid_argument("k_operator_matrix: n must be >= 1");
    const int size = 2 * n + 1;
    const ComplexMatrix a = ComplexMatrix::Constant(size, size, -1.0 / (2.0 * kPi));
    const ComplexMatrix b = ComplexMatrix::Constant(size, size, 1.0 / (2.0 * kPi));
    OperatorMatrix out;
    out.n = n;
    out.flavor = OperatorFlavor::S_n;
    out.kappa = 0.0;
    out.entries = assemble_A(interpolate2d(a, n)) + assemble_B(interpolate2d(b, n));
    return out;
}

double off_diagonal_ratio(const ComplexMatrix& m) {
    double max_diag = 0.0, max_off = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = std::abs(m(i, j));
            if (i == j) {
                max_diag = std::max(max_diag, v);
            } else {
                max_off = std::max(max_off, v);
            }
        }
    }
    return max_off / max_diag;
}

void write_matrix_dump(std::ostream& out, const OperatorMatrix& m) {
    char buf[128];
    out << "scatpoles-matrix 1\n";
    out << "n " << m.n << "\n";
    out << "flavor " << to_string(m.flavor) << "\n";
    std::snprintf(buf, sizeof buf, "kappa %.17g %.17g\n", m.kappa.real(), m.kappa.imag());
    out << buf;
    for (int i = -m.n; i <= m.n; ++i) {
        for (int l = -m.n; l <= m.n; ++l) {
            const cplx v = m(i, l);
            std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", i, l, v.real(), v.imag());
            out << buf;
        }
    }
}

OperatorMatrix read_matrix_dump(std::istream& in) {
    std::string tag;
    int version = 0;
    if (!(in >> tag >> version) || tag != "scatpoles-matrix" || version != 1) {
        throw std::runtime_error("matrix dump: bad header");
    }
    OperatorMatrix m;
    std::string key, flavor;
    double kre = 0.0, kim = 0.0;
    if (!(in >> key >> m.n) || key != "n" || m.n < 1) throw std::runtime_error("matrix dump: bad n");
    if (!(in >> key >> flavor) || key != "flavor") throw std::runtime_error("matrix dump: bad flavor");
    m.flavor = operator_flavor_from_string(flavor);
    if (!(in >> key >> kre >> kim) || key != "kappa") throw std::runtime_error("matrix dump: bad kappa");
    m.kappa = {kre, kim};
    m.entries.resize(m.size(), m.size());
    for (int k = 0; k < m.size() * m.size(); ++k) {
        int i = 0, l = 0;
        double re = 0.0, im = 0.0;
        if (!(in >> i >> l >> re >> im) || std::abs(i) > m.n || std::abs(l) > m.n) {
            throw std::runtime_error("matrix dump: truncated or malformed entry");
        }
        m.entries(i + m.n, l + m.n) = {re, im};
    }
    return m;
}

}  // namespace scatpoles::galerkin
