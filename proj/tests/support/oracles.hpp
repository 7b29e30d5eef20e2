#pragma once

// Reference computations used only by the tests. Each one takes a route
// that differs from the library's: closed-form invariants instead of
// eigensolvers, precision matrices instead of Schur complements, direct
// density evaluation instead of exponent formulas.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix sigma(int n) {
    Matrix s = Matrix::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        s(2 * k, 2 * k + 1) = 1.0;
        s(2 * k + 1, 2 * k) = -1.0;
    }
    return s;
}

/// Two-mode symplectic eigenvalues from the invariants det(gamma) and
/// Delta = det A + det B + 2 det C (sign of the last term flipped for the
/// partial transpose). Returned as {nu_minus, nu_plus}.
inline std::pair<double, double> two_mode_symplectic(const Matrix& g, bool partial_transpose = false) {
    const Matrix A = g.topLeftCorner(2, 2), B = g.bottomRightCorner(2, 2), C = g.topRightCorner(2, 2);
    const double delta = A.determinant() + B.determinant() +
                         (partial_transpose ? -2.0 : 2.0) * C.determinant();
    const double disc = std::sqrt(std::max(0.0, delta * delta - 4.0 * g.determinant()));
    return {std::sqrt((delta - disc) / 2.0), std::sqrt((delta + disc) / 2.0)};
}

/// Symplectic eigenvalues of any mode count from the real spectrum of
/// (sigma g)^2, which is {-nu_k^2} with multiplicity two.
inline std::vector<double> symplectic_spectrum_real(const Matrix& g) {
    const int n = static_cast<int>(g.rows() / 2);
    const Matrix sg = sigma(n) * g;
    Eigen::EigenSolver<Matrix> es(sg * sg, false);
    std::vector<double> nu;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) nu.push_back(std::sqrt(-es.eigenvalues()(i).real()));
    std::sort(nu.begin(), nu.end());
    std::vector<double> out;
    for (std::size_t i = 0; i < nu.size(); i += 2) out.push_back(0.5 * (nu[i] + nu[i + 1]));
    return out;
}

/// Partial transpose on the last n_b modes.
inline Matrix partial_transpose(const Matrix& g, int n_b) {
    Matrix t = Matrix::Identity(g.rows(), g.cols());
    for (Eigen::Index k = g.rows() - 2 * n_b; k < g.rows(); k += 2) t(k + 1, k + 1) = -1.0;
    return t * g * t;
}

/// Gaussian conditioning through the precision matrix: the law of `keep`
/// given exact values on `given`, with probability covariance g / 2. Returns
/// {conditional gamma, conditional mean}.
inline std::pair<Matrix, Vector> condition(const Matrix& g, const Vector& mean, const std::vector<int>& given,
                                           const Vector& values, const std::vector<int>& keep) {
    std::vector<int> idx = given;
    idx.insert(idx.end(), keep.begin(), keep.end());
    const int n = static_cast<int>(idx.size());
    Matrix sub(n, n);
    Vector mu(n);
    for (int i = 0; i < n; ++i) {
        mu(i) = mean(idx[i]);
        for (int j = 0; j < n; ++j) sub(i, j) = g(idx[i], idx[j]);
    }
    const Matrix prec = sub.inverse();
    const int ng = static_cast<int>(given.size());
    const int nk = static_cast<int>(keep.size());
    const Matrix pkk = prec.bottomRightCorner(nk, nk);
    const Matrix pkg = prec.bottomLeftCorner(nk, ng);
    const Matrix cov = pkk.inverse();
    const Vector m = mu.tail(nk) - cov * pkg * (values - mu.head(ng));
    return {cov, m};
}

/// Bivariate normal density with probability covariance gx / 2.
inline double density2(const Eigen::Matrix2d& gx, const Eigen::Vector2d& mean, double x, double y) {
    const Eigen::Matrix2d cov = 0.5 * gx;
    const Eigen::Vector2d d(x - mean(0), y - mean(1));
    const double q = d.dot(cov.inverse() * d);
    return std::exp(-0.5 * q) / (2.0 * M_PI * std::sqrt(cov.determinant()));
}

/// eps_B at exact post-selection |x| = X0 from point densities.
inline double eps_B_point(const Eigen::Matrix2d& gx, double X0) {
    const Eigen::Vector2d m = Eigen::Vector2d::Zero();
    const double dis = density2(gx, m, X0, -X0) + density2(gx, m, -X0, X0);
    const double agr = density2(gx, m, X0, X0) + density2(gx, m, -X0, -X0);
    return dis / (dis + agr);
}

/// eps_B for the delta window by 2D Gauss-Legendre quadrature on each box.
inline double eps_B_window(const Eigen::Matrix2d& gx, const Eigen::Vector2d& mean, double X0, double delta) {
    // 8-point Gauss-Legendre nodes and weights on [-1, 1]
    static const double xs[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static const double ws[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    auto box = [&](double cx, double cy) {
        double s = 0.0;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) s += ws[i] * ws[j] * density2(gx, mean, cx + delta * xs[i], cy + delta * xs[j]);
        return s;
    };
    const double dis = box(X0, -X0) + box(-X0, X0);
    const double agr = box(X0, X0) + box(-X0, -X0);
    return dis / (dis + agr);
}

/// Binary entropy in bits.
inline double h2(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

}  // namespace oracle
