#include "qlqg/gaussian.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qlqg {

namespace {

Eigen::Matrix2d sigma_2x2() {
    Eigen::Matrix2d s;
    s << 0.0, 1.0, -1.0, 0.0;
    return s;
}

std::string entry_tag(const char* name, double defect) {
    std::ostringstream os;
    os << name << " (max defect " << defect << ")";
    return os.str();
}

}  // namespace

SymplecticForm symplectic(int n) {
    if (n < 1) throw std::invalid_argument("symplectic: mode count must be >= 1");
    SymplecticForm f;
    f.n = n;
    f.matrix = Mat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) f.matrix.block<2, 2>(2 * i, 2 * i) = sigma_2x2();
    return f;
}

NoiseBlock noise_block_from_nm(double n_mean, std::complex<double> m_corr) {
    NoiseBlock blk;
    blk.mean_excitation = n_mean;
    blk.correlation = m_corr;
    const std::complex<double> i_half(0.0, 0.5);
    blk.theta(0, 0) = n_mean + m_corr.real() + 0.5;
    blk.theta(0, 1) = m_corr.imag() + i_half;
    blk.theta(1, 0) = m_corr.imag() - i_half;
    blk.theta(1, 1) = n_mean - m_corr.real() + 0.5;
    // Physicality: the Hermitian matrix Re(theta) - (i/2) sigma must be PSD,
    // which is the matrix form of N(N+1) >= |M|^2.
    Eigen::Matrix2cd herm = blk.theta.real().cast<std::complex<double>>();
    herm(0, 1) -= i_half;
    herm(1, 0) += i_half;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        std::ostringstream os;
        os << "noise_block_from_nm: unphysical parameters N=" << n_mean << ", |M|=" << std::abs(m_corr)
           << " (require N(N+1) >= |M|^2)";
        throw std::domain_error(os.str());
    }
    return blk;
}

NoiseBlock squeezed_theta(double r) {
    NoiseBlock blk;
    blk.mean_excitation = (std::cosh(r) - 1.0) / 2.0;
    blk.correlation = -std::sinh(r) / 2.0;
    const std::complex<double> i_half(0.0, 0.5);
    blk.theta(0, 0) = 0.5 * std::exp(-r);
    blk.theta(0, 1) = i_half;
    blk.theta(1, 0) = -i_half;
    blk.theta(1, 1) = 0.5 * std::exp(r);
    return blk;
}

NoiseCorrelation noise_from_blocks(std::vector<NoiseBlock> blocks) {
    NoiseCorrelation nc;
    const int m = static_cast<int>(blocks.size());
    nc.blocks = std::move(blocks);
    nc.re_theta = Mat::Zero(2 * m, 2 * m);
    nc.im_theta = Mat::Zero(2 * m, 2 * m);
    for (int j = 0; j < m; ++j) {
        nc.re_theta.block<2, 2>(2 * j, 2 * j) = nc.blocks[j].theta.real();
        nc.im_theta.block<2, 2>(2 * j, 2 * j) = nc.blocks[j].theta.imag();
    }
    return nc;
}

CMat NoiseCorrelation::full_theta() const {
    return re_theta.cast<std::complex<double>>() +
           std::complex<double>(0.0, 1.0) * im_theta.cast<std::complex<double>>();
}

std::pair<Mat, Mat> build_structured_matrices(const Mat& g, const Mat& b, const Mat& d) {
    const long two_n = g.rows();
    const long two_m = b.cols();
    if (g.cols() != two_n || two_n % 2 != 0)
        throw std::invalid_argument("build_structured_matrices: G must be square with even dimension");
    if (b.rows() != two_n || two_m % 2 != 0)
        throw std::invalid_argument("build_structured_matrices: B must be 2n x 2m");
    if (d.cols() != two_m)
        throw std::invalid_argument("build_structured_matrices: D must have 2m columns");
    if (max_abs(g - g.transpose()) > 1e-12 * std::max(1.0, max_abs(g)))
        throw std::invalid_argument("build_structured_matrices: G must be symmetric");
    const Mat sn = symplectic(static_cast<int>(two_n / 2)).matrix;
    const Mat sm = symplectic(static_cast<int>(two_m / 2)).matrix;
    Mat a = sn * (g + sn.transpose() * b * sm * b.transpose() * sn / 2.0);
    Mat c = d * sm * b.transpose() * sn;
    return {std::move(a), std::move(c)};
}

std::vector<std::string> validate_system(const SystemModel& sys, double tol) {
    std::vector<std::string> violations;
    const int two_n = 2 * sys.n;
    const int two_m = 2 * sys.m;

    auto dims_ok = [&](const Mat& m, long r, long c) { return m.rows() == r && m.cols() == c; };
    if (!dims_ok(sys.a, two_n, two_n) || !dims_ok(sys.b, two_n, two_m) ||
        !dims_ok(sys.c, sys.ell, two_n) || !dims_ok(sys.d, sys.ell, two_m)) {
        violations.push_back("dimension mismatch among A, B, C, D");
        return violations;  // nothing else is meaningful
    }
    if (sys.noise.channels() != sys.m)
        violations.push_back("noise correlation channel count differs from m");

    double g_defect = max_abs(sys.g - sys.g.transpose());
    if (g_defect > tol) violations.push_back(entry_tag("G is not symmetric", g_defect));

    const Mat sm = symplectic(sys.m).matrix;
    double d_defect = max_abs(sys.d * sm * sys.d.transpose());
    if (d_defect > tol) violations.push_back(entry_tag("D Sigma_m D^T != 0", d_defect));

    auto [a_ref, c_ref] = build_structured_matrices(sys.g, sys.b, sys.d);
    double a_defect = max_abs(sys.a - a_ref);
    if (a_defect > tol) violations.push_back(entry_tag("A inconsistent with (G, B)", a_defect));
    double c_defect = max_abs(sys.c - c_ref);
    if (c_defect > tol) violations.push_back(entry_tag("C inconsistent with (B, D)", c_defect));

    if (sys.extra_drift.size() > 0 && !dims_ok(sys.extra_drift, two_n, two_n))
        violations.push_back("extra_drift has wrong dimensions");
    if (sys.extra_diffusion.size() > 0) {
        if (!dims_ok(sys.extra_diffusion, two_n, two_n)) {
            violations.push_back("extra_diffusion has wrong dimensions");
        } else {
            double sym_defect = max_abs(sys.extra_diffusion - sys.extra_diffusion.transpose());
            if (sym_defect > tol) violations.push_back(entry_tag("extra_diffusion not symmetric", sym_defect));
            double min_eig = min_eigenvalue_sym(sys.extra_diffusion);
            if (min_eig < -tol) violations.push_back(entry_tag("extra_diffusion not PSD", -min_eig));
        }
    }
    return violations;
}

}  // namespace qlqg
