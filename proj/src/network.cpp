#include "qlqg/network.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qlqg {

namespace {

void check_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << name << " must lie in [0,1], got " << v;
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

CouplingMatrix coupling_from_vector(const CVec& c) {
    CouplingMatrix cm;
    cm.c = c;
    cm.cbar = Mat(2, c.size());
    cm.cbar.row(0) = std::sqrt(2.0) * c.real().transpose();
    cm.cbar.row(1) = std::sqrt(2.0) * c.imag().transpose();
    return cm;
}

Mat beam_splitter(double beta_sq) {
    check_unit_interval(beta_sq, "beam_splitter reflectivity");
    const double beta = std::sqrt(beta_sq);
    const double alpha = std::sqrt(1.0 - beta_sq);
    Mat t = Mat::Identity(6, 6);
    t.block<2, 2>(0, 0) = alpha * Mat::Identity(2, 2);
    t.block<2, 2>(0, 2) = beta * Mat::Identity(2, 2);
    t.block<2, 2>(2, 0) = -beta * Mat::Identity(2, 2);
    t.block<2, 2>(2, 2) = alpha * Mat::Identity(2, 2);
    return t;
}

Mat loss_stage(double delta_sq) {
    check_unit_interval(delta_sq, "loss reflectivity");
    const double delta = std::sqrt(delta_sq);
    const double alpha = std::sqrt(1.0 - delta_sq);
    Mat t = Mat::Identity(6, 6);
    t.block<2, 2>(0, 0) = alpha * Mat::Identity(2, 2);
    t.block<2, 2>(0, 4) = delta * Mat::Identity(2, 2);
    t.block<2, 2>(4, 0) = -delta * Mat::Identity(2, 2);
    t.block<2, 2>(4, 4) = alpha * Mat::Identity(2, 2);
    return t;
}

Mat homodyne_selectors(double theta1, double theta2) {
    Mat h = Mat::Zero(2, 6);
    h(0, 0) = std::cos(theta1);
    h(0, 1) = std::sin(theta1);
    h(1, 2) = std::cos(theta2);
    h(1, 3) = std::sin(theta2);
    return h;
}

SystemModel assemble_network(const NetworkConfig& cfg, const CouplingMatrix& coupling,
                             const Mat& g, const Mat& f) {
    check_unit_interval(cfg.beta1_sq, "beta1_sq");
    check_unit_interval(cfg.beta2_sq, "beta2_sq");
    check_unit_interval(cfg.delta_sq, "delta_sq");
    const long two_n = coupling.cbar.cols();
    if (g.rows() != two_n || g.cols() != two_n)
        throw std::invalid_argument("assemble_network: G size inconsistent with coupling");

    SystemModel sys;
    sys.n = static_cast<int>(two_n / 2);
    sys.m = 3;
    sys.ell = 2;
    sys.g = g;
    sys.f = f;

    const Mat sn = symplectic(sys.n).matrix;
    Eigen::Matrix2d sigma;
    sigma << 0.0, 1.0, -1.0, 0.0;

    const double alpha1 = std::sqrt(1.0 - cfg.beta1_sq);
    const double beta1 = std::sqrt(cfg.beta1_sq);
    const Mat column = sn * coupling.cbar.transpose() * sigma;  // 2n x 2
    sys.b = Mat::Zero(two_n, 6);
    sys.b.block(0, 0, two_n, 2) = alpha1 * column;
    sys.b.block(0, 2, two_n, 2) = beta1 * column;

    sys.d = homodyne_selectors(cfg.theta1, cfg.theta2) * beam_splitter(cfg.beta2_sq) *
            loss_stage(cfg.delta_sq) * beam_splitter(cfg.beta1_sq);

    sys.noise = noise_from_blocks({squeezed_theta(cfg.r), vacuum_block(), vacuum_block()});

    auto [a, c] = build_structured_matrices(sys.g, sys.b, sys.d);
    sys.a = std::move(a);
    sys.c = std::move(c);
    sys.extra_drift = Mat::Zero(two_n, two_n);
    sys.extra_diffusion = Mat::Zero(two_n, two_n);

    auto violations = validate_system(sys);
    if (!violations.empty()) {
        std::ostringstream os;
        os << "assemble_network produced an inconsistent model:";
        for (const auto& v : violations) os << " [" << v << "]";
        throw std::logic_error(os.str());
    }
    return sys;
}

SystemModel swap_detectors(SystemModel sys) {
    if (sys.ell != 2) throw std::invalid_argument("swap_detectors: expects two outputs");
    sys.c.row(0).swap(sys.c.row(1));
    sys.d.row(0).swap(sys.d.row(1));
    return sys;
}

}  // namespace qlqg
