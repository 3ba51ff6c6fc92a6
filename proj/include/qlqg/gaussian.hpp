#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "qlqg/linalg.hpp"

namespace qlqg {

// Block-diagonal symplectic form diag{sigma, ..., sigma} with
// sigma = [[0,1],[-1,0]]. Encodes the commutation relations of n
// (position, momentum) quadrature pairs.
struct SymplecticForm {
    int n = 0;
    Mat matrix;  // 2n x 2n, antisymmetric, squares to -I
};

SymplecticForm symplectic(int n);

// Single-channel quantum Ito correlation block. The 2x2 Hermitian matrix
// theta has real part [[N+Re M+1/2, Im M],[Im M, N-Re M+1/2]] and fixed
// imaginary part (i/2)*sigma, so theta(0,1)-theta(1,0) = i always.
struct NoiseBlock {
    double mean_excitation = 0.0;             // N
    std::complex<double> correlation{0.0};    // M
    Eigen::Matrix2cd theta;
};

// Builds the block from (N, M). Throws std::domain_error if the parameters
// are unphysical, i.e. N(N+1) < |M|^2 (equivalently the Hermitian block
// fails its positivity condition).
NoiseBlock noise_block_from_nm(double n_mean, std::complex<double> m_corr);

// Quadrature-squeezed input block (1/2)[[e^-r, i],[-i, e^r]]. r = 0 is vacuum.
NoiseBlock squeezed_theta(double r);

inline NoiseBlock vacuum_block() { return noise_block_from_nm(0.0, 0.0); }

// Block-diagonal correlation matrix of m input channels, stored as the pair
// of real matrices (Re Theta, Im Theta). Downstream solvers consume only
// re_theta; im_theta is kept for physicality checks.
struct NoiseCorrelation {
    std::vector<NoiseBlock> blocks;
    Mat re_theta;  // 2m x 2m symmetric
    Mat im_theta;  // 2m x 2m antisymmetric; full Theta = re + i*im
    int channels() const { return static_cast<int>(blocks.size()); }
    CMat full_theta() const;
};

NoiseCorrelation noise_from_blocks(std::vector<NoiseBlock> blocks);

// Linear quantum state-space model
//   dx = A x dt + F u dt + B dW,   dy = C x dt + D dW,
// with dW dW^T = Theta dt. A and C are not free: given (G, B, D) they are
// fixed by the commutation-preserving structure (build_structured_matrices).
// Thermal-bath corrections are kept separate from the structural matrices:
// the propagated drift is A + extra_drift, and extra_diffusion adds to the
// Riccati/Lyapunov constant term.
struct SystemModel {
    int n = 0;    // system modes
    int m = 0;    // input channels
    int ell = 0;  // measured outputs
    Mat a;        // 2n x 2n
    Mat b;        // 2n x 2m
    Mat c;        // ell x 2n
    Mat d;        // ell x 2m
    Mat f;        // 2n x k actuation
    Mat g;        // 2n x 2n symmetric Hamiltonian matrix
    NoiseCorrelation noise;
    Mat extra_drift;      // 2n x 2n, default zero
    Mat extra_diffusion;  // 2n x 2n symmetric PSD, default zero

    Mat effective_drift() const { return a + extra_drift; }
};

// A = Sigma_n (G + Sigma_n^T B Sigma_m B^T Sigma_n / 2), C = D Sigma_m B^T Sigma_n.
// Throws std::invalid_argument on dimension mismatch or asymmetric G.
std::pair<Mat, Mat> build_structured_matrices(const Mat& g, const Mat& b, const Mat& d);

// Returns human-readable descriptions of every violated structural
// invariant (empty vector if the model is consistent). Checks are absolute
// entrywise with the given tolerance.
std::vector<std::string> validate_system(const SystemModel& sys, double tol = 1e-10);

}  // namespace qlqg
