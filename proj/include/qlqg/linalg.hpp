#pragma once

#include <Eigen/Dense>

namespace qlqg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Largest absolute entry; zero for empty matrices.
double max_abs(const Mat& m);

// Maximum real part over the eigenvalues of a (general, square) matrix.
double max_real_eigenvalue(const Mat& a);

// True iff all eigenvalues of a satisfy Re(lambda) < -margin.
bool is_hurwitz(const Mat& a, double margin = 0.0);

// Smallest eigenvalue of a real symmetric matrix (symmetrized internally).
double min_eigenvalue_sym(const Mat& m);

// Smallest eigenvalue of a complex Hermitian matrix.
double min_eigenvalue_herm(const CMat& m);

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

// Symmetric PSD square root with negative eigenvalues clamped to zero.
Mat psd_sqrt(const Mat& m);

// Solves A X + X A^T + W = 0 for X, with W symmetric. Dense Kronecker
// vectorization; intended for small state dimensions. Throws
// std::runtime_error if the Lyapunov operator is singular.
Mat solve_lyapunov(const Mat& a, const Mat& w);

// 2-norm condition number via SVD.
double condition_number(const Mat& m);

}  // namespace qlqg
