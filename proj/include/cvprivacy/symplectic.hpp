#pragma once

#include <Eigen/Dense>

#include <vector>

namespace cvprivacy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double lin = 1e-9;    // identity checks
inline constexpr double psd = 1e-10;   // positive-definiteness margins
inline constexpr double rank = 1e-10;  // relative cut for pseudo-inverses
}  // namespace tol

// Phase-space coordinates are always ordered (X1, P1, X2, P2, ..., Xn, Pn).

/// Direct sum of n blocks [[0, 1], [-1, 0]].
Matrix symplectic_form(int n_modes);

/// D(1, -1, 1, -1, ...): flips the sign of every momentum.
Matrix momentum_flip(int n_modes);

/// Largest absolute deviation of a square matrix from symmetry.
double asymmetry(const Matrix& m);

/// Symplectic eigenvalues in non-increasing order, read off the spectrum
/// of i*sigma*C (which is {+-lambda_k}).
std::vector<double> symplectic_eigenvalues(const Matrix& C);

struct WilliamsonDecomposition {
    Matrix S;                      // S C S^T = diag(l1, l1, l2, l2, ...)
    std::vector<double> spectrum;  // non-increasing
};

/// Williamson normal form of a symmetric positive-definite matrix.
///
/// S is built from the Hermitian eigenproblem of i C^{-1/2} sigma C^{-1/2};
/// correctness is defined only by S sigma S^T = sigma and S C S^T diagonal.
WilliamsonDecomposition williamson(const Matrix& C);

/// Four blocks of the inverse of [[A, C], [C^T, B]], assembled through the
/// Schur complements of A and B.
struct BlockInverse {
    Matrix top_left;
    Matrix top_right;
    Matrix bottom_left;
    Matrix bottom_right;

    Matrix assemble() const;
};

BlockInverse block_inverse(const Matrix& A, const Matrix& B, const Matrix& C);

/// Moore-Penrose inverse of a symmetric matrix: inverse on the range,
/// eigenvalues below tol::rank (relative to the largest) are dropped.
Matrix pseudo_inverse(const Matrix& M);

/// Square root R (R*R = M) of a diagonalizable matrix with real,
/// non-negative spectrum, via a general eigendecomposition.
Matrix psd_sqrt_of_similar(const Matrix& M);

/// Same contract, when T is known to make T M T^{-1} symmetric. Takes the
/// stable route through the symmetric eigensolver.
Matrix psd_sqrt_of_similar(const Matrix& M, const Matrix& T);

/// Symmetric square root and inverse square root of an SPD matrix.
Matrix spd_sqrt(const Matrix& C);
Matrix spd_inverse_sqrt(const Matrix& C);

bool is_symplectic(const Matrix& S, double tolerance = tol::lin);

/// A symplectic matrix whose first row is `row` (any nonzero vector of
/// even length). Remaining rows come from symplectic Gram-Schmidt.
Matrix symplectic_completion(const Vector& row);

}  // namespace cvprivacy
