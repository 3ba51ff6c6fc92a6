#include "qlqg/linalg.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace qlqg {

double max_abs(const Mat& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

double max_real_eigenvalue(const Mat& a) {
    Eigen::EigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Mat& a, double margin) {
    return max_real_eigenvalue(a) < -margin;
}

double min_eigenvalue_sym(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double min_eigenvalue_herm(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Mat psd_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
    Vec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

Mat solve_lyapunov(const Mat& a, const Mat& w) {
    const long n = a.rows();
    if (a.cols() != n || w.rows() != n || w.cols() != n)
        throw std::invalid_argument("solve_lyapunov: dimension mismatch");
    Mat id = Mat::Identity(n, n);
    Mat op = Eigen::kroneckerProduct(id, a) + Eigen::kroneckerProduct(a, id);
    Eigen::PartialPivLU<Mat> lu(op);
    // vec(AX + XA^T) = (I (x) A + A (x) I) vec(X) for column-major vec.
    Vec rhs = Eigen::Map<const Vec>(w.data(), n * n);
    Vec x = lu.solve(-rhs);
    // One round of iterative refinement; the operator can be stiff when the
    // drift carries widely separated rates.
    Vec resid = op * x + rhs;
    x -= lu.solve(resid);
    if (!x.allFinite()) throw std::runtime_error("solve_lyapunov: singular Lyapunov operator");
    Mat sol = Eigen::Map<const Mat>(x.data(), n, n);
    return symmetrize(sol);
}

double condition_number(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / (s(s.size() - 1));
}

}  // namespace qlqg
