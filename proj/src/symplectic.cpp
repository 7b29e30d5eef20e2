#include "cvprivacy/symplectic.hpp"

#include "cvprivacy/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace cvprivacy {

namespace {

using ComplexMatrix = Eigen::MatrixXcd;

double scale_of(const Matrix& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " must be a nonempty square matrix, got " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

void require_phase_space(const Matrix& m, const char* what) {
    require_square(m, what);
    if (m.rows() % 2 != 0) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " must have even dimension, got " + std::to_string(m.rows()));
    }
}

void require_spd(const Matrix& C) {
    require_phase_space(C, "matrix");
    if (asymmetry(C) > tol::lin * scale_of(C)) {
        throw Error(ErrorCode::NotSymmetric,
                    "asymmetry " + std::to_string(asymmetry(C)) + " exceeds tolerance");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(C, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues()(0) < tol::psd) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "smallest eigenvalue " + std::to_string(eig.eigenvalues()(0)));
    }
}

bool invertible(const Eigen::PartialPivLU<Matrix>& lu) { return lu.rcond() > 1e-13; }

}  // namespace

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::SingularBlock: return "SingularBlock";
        case ErrorCode::ComplexSpectrum: return "ComplexSpectrum";
        case ErrorCode::NegativeSpectrum: return "NegativeSpectrum";
        case ErrorCode::Unphysical: return "Unphysical";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SingularKernel: return "SingularKernel";
        case ErrorCode::NotSymplectic: return "NotSymplectic";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NoAcceptedSamples: return "NoAcceptedSamples";
        case ErrorCode::InsufficientStatistics: return "InsufficientStatistics";
        case ErrorCode::TailTooHeavy: return "TailTooHeavy";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

Matrix symplectic_form(int n_modes) {
    if (n_modes < 1) {
        throw Error(ErrorCode::InvalidArgument, "n_modes must be positive");
    }
    Matrix sigma = Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        sigma(2 * k, 2 * k + 1) = 1.0;
        sigma(2 * k + 1, 2 * k) = -1.0;
    }
    return sigma;
}

Matrix momentum_flip(int n_modes) {
    Vector diag(2 * n_modes);
    for (int k = 0; k < 2 * n_modes; ++k) diag(k) = (k % 2 == 0) ? 1.0 : -1.0;
    return diag.asDiagonal();
}

double asymmetry(const Matrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    if (m.size() == 0) return 0.0;
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

std::vector<double> symplectic_eigenvalues(const Matrix& C) {
    require_spd(C);
    const int n = static_cast<int>(C.rows() / 2);
    // i C^{1/2} sigma C^{1/2} is similar to i sigma C and Hermitian, so its
    // eigenvalues carry an absolute error of order eps |C| rather than eps |C|^2.
    const Matrix root = spd_sqrt(C);
    ComplexMatrix H = std::complex<double>(0.0, 1.0) * (root * symplectic_form(n) * root).cast<std::complex<double>>();
    H = 0.5 * (H + H.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(H, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "eigensolver did not converge");
    }
    // ascending: the positive half, reversed, is non-increasing
    std::vector<double> values(n);
    for (int k = 0; k < n; ++k) values[k] = eig.eigenvalues()(2 * n - 1 - k);
    return values;
}

WilliamsonDecomposition williamson(const Matrix& C) {
    require_spd(C);
    const int n = static_cast<int>(C.rows() / 2);
    const Matrix inv_sqrt = spd_inverse_sqrt(C);
    const Matrix K = inv_sqrt * symplectic_form(n) * inv_sqrt;

    // i*K is Hermitian with spectrum {+-1/lambda_k}. An eigenvector u of the
    // positive eigenvalue mu splits as u = (e - i f)/sqrt(2), and (e, f) span
    // a block on which K acts as [[0, mu], [-mu, 0]].
    ComplexMatrix H = std::complex<double>(0.0, 1.0) * K.cast<std::complex<double>>();
    H = 0.5 * (H + H.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(H);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "eigensolver did not converge");
    }

    Matrix O(2 * n, 2 * n);
    Vector d(2 * n);
    WilliamsonDecomposition out;
    out.spectrum.resize(n);
    // Ascending eigenvalues: the positive half sits at indices n..2n-1 and
    // ascending mu means non-increasing lambda.
    for (int k = 0; k < n; ++k) {
        const double mu = eig.eigenvalues()(n + k);
        if (mu <= 0.0) {
            throw Error(ErrorCode::NumericalFailure, "spectrum of i*K is not symmetric");
        }
        const auto u = eig.eigenvectors().col(n + k);
        O.col(2 * k) = std::sqrt(2.0) * u.real();
        O.col(2 * k + 1) = -std::sqrt(2.0) * u.imag();
        out.spectrum[k] = 1.0 / mu;
        d(2 * k) = d(2 * k + 1) = std::sqrt(1.0 / mu);
    }
    out.S = d.asDiagonal() * O.transpose() * inv_sqrt;
    return out;
}

Matrix BlockInverse::assemble() const {
    Matrix m(top_left.rows() + bottom_left.rows(), top_left.cols() + top_right.cols());
    m << top_left, top_right, bottom_left, bottom_right;
    return m;
}

BlockInverse block_inverse(const Matrix& A, const Matrix& B, const Matrix& C) {
    require_square(A, "A");
    require_square(B, "B");
    if (C.rows() != A.rows() || C.cols() != B.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "C must be rows(A) x rows(B)");
    }
    const Eigen::PartialPivLU<Matrix> lu_a(A);
    const Eigen::PartialPivLU<Matrix> lu_b(B);
    if (!invertible(lu_a) || !invertible(lu_b)) {
        throw Error(ErrorCode::SingularBlock, "diagonal block is singular");
    }
    const Matrix a_inv_c = lu_a.solve(C);
    const Eigen::PartialPivLU<Matrix> schur_b(B - C.transpose() * a_inv_c);
    const Eigen::PartialPivLU<Matrix> schur_a(A - C * lu_b.solve(C.transpose()));
    if (!invertible(schur_a) || !invertible(schur_b)) {
        throw Error(ErrorCode::SingularBlock, "Schur complement is singular");
    }

    BlockInverse out;
    out.top_left = schur_a.inverse();
    out.bottom_right = schur_b.inverse();
    // (C^T A^{-1} C - B)^{-1} = -(B - C^T A^{-1} C)^{-1}
    out.top_right = -a_inv_c * out.bottom_right;
    out.bottom_left = -out.bottom_right * C.transpose() * lu_a.inverse();
    return out;
}

Matrix pseudo_inverse(const Matrix& M) {
    require_square(M, "M");
    const Matrix sym = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const Vector& values = eig.eigenvalues();
    const double cut = tol::rank * std::max(values.cwiseAbs().maxCoeff(), 0.0);
    Vector inv = Vector::Zero(values.size());
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        if (std::abs(values(k)) > cut && values(k) != 0.0) inv(k) = 1.0 / values(k);
    }
    return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix psd_sqrt_of_similar(const Matrix& M) {
    require_square(M, "M");
    const double scale = scale_of(M);
    if (M.cwiseAbs().maxCoeff() == 0.0) return Matrix::Zero(M.rows(), M.cols());

    Eigen::ComplexEigenSolver<ComplexMatrix> eig(M.cast<std::complex<double>>());
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "eigensolver did not converge");
    }
    const Eigen::VectorXcd& values = eig.eigenvalues();
    Eigen::VectorXcd roots(values.size());
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        if (std::abs(values(k).imag()) > tol::psd * scale) {
            throw Error(ErrorCode::ComplexSpectrum,
                        "eigenvalue with imaginary part " + std::to_string(values(k).imag()));
        }
        if (values(k).real() < -tol::psd * scale) {
            throw Error(ErrorCode::NegativeSpectrum,
                        "eigenvalue " + std::to_string(values(k).real()));
        }
        roots(k) = std::sqrt(std::max(values(k).real(), 0.0));
    }
    const ComplexMatrix& V = eig.eigenvectors();
    const Eigen::PartialPivLU<ComplexMatrix> lu(V);
    const ComplexMatrix R = V * roots.asDiagonal() * lu.inverse();
    return R.real();
}

Matrix psd_sqrt_of_similar(const Matrix& M, const Matrix& T) {
    require_square(M, "M");
    if (T.rows() != M.rows() || T.cols() != M.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "similarity must match M");
    }
    const Eigen::PartialPivLU<Matrix> lu(T);
    if (!invertible(lu)) throw Error(ErrorCode::SingularBlock, "similarity is singular");
    const Matrix sym = T * M * lu.inverse();
    const double scale = scale_of(sym);
    if (asymmetry(sym) > 1e-7 * scale) {
        throw Error(ErrorCode::InvalidArgument, "T M T^-1 is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sym + sym.transpose()));
    Vector roots(eig.eigenvalues().size());
    for (Eigen::Index k = 0; k < roots.size(); ++k) {
        const double v = eig.eigenvalues()(k);
        if (v < -tol::psd * scale) {
            throw Error(ErrorCode::NegativeSpectrum, "eigenvalue " + std::to_string(v));
        }
        roots(k) = std::sqrt(std::max(v, 0.0));
    }
    const Matrix root = eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
    return lu.solve(root * T);
}

Matrix spd_sqrt(const Matrix& C) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (C + C.transpose()));
    return eig.operatorSqrt();
}

Matrix spd_inverse_sqrt(const Matrix& C) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (C + C.transpose()));
    return eig.operatorInverseSqrt();
}

bool is_symplectic(const Matrix& S, double tolerance) {
    if (S.rows() != S.cols() || S.rows() % 2 != 0 || S.rows() == 0) return false;
    const Matrix sigma = symplectic_form(static_cast<int>(S.rows() / 2));
    return (S * sigma * S.transpose() - sigma).cwiseAbs().maxCoeff() <= tolerance * scale_of(S) * scale_of(S);
}

Matrix symplectic_completion(const Vector& row) {
    const Eigen::Index dim = row.size();
    if (dim == 0 || dim % 2 != 0) {
        throw Error(ErrorCode::DimensionMismatch, "row must have even nonzero length");
    }
    const double norm2 = row.squaredNorm();
    if (norm2 == 0.0) throw Error(ErrorCode::InvalidArgument, "row must be nonzero");
    const int n = static_cast<int>(dim / 2);
    const Matrix sigma = symplectic_form(n);
    const auto omega = [&](const Vector& a, const Vector& b) { return a.dot(sigma * b); };

    std::vector<Vector> xs{row};
    std::vector<Vector> ps{sigma.transpose() * row / norm2};

    const auto reduce = [&](Vector w) {
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double wp = omega(w, ps[k]);
            const double wx = omega(w, xs[k]);
            w += -wp * xs[k] + wx * ps[k];
        }
        return w;
    };

    // Candidates are the standard basis; pick the best-conditioned pair
    // at each step.
    while (static_cast<int>(xs.size()) < n) {
        std::vector<Vector> cands;
        for (Eigen::Index k = 0; k < dim; ++k) cands.push_back(reduce(Vector::Unit(dim, k)));
        Eigen::Index best_x = 0;
        for (Eigen::Index k = 1; k < dim; ++k) {
            if (cands[k].norm() > cands[best_x].norm()) best_x = k;
        }
        Vector x = cands[best_x] / cands[best_x].norm();
        Eigen::Index best_p = -1;
        double best = 0.0;
        for (Eigen::Index k = 0; k < dim; ++k) {
            const double w = std::abs(omega(x, cands[k]));
            if (w > best) {
                best = w;
                best_p = k;
            }
        }
        if (best_p < 0 || best < 1e-12) {
            throw Error(ErrorCode::NumericalFailure, "symplectic completion degenerated");
        }
        Vector p = cands[best_p] / omega(x, cands[best_p]);
        // p is reduced against earlier pairs already; x is too.
        xs.push_back(x);
        ps.push_back(p);
    }

    Matrix S(dim, dim);
    for (int k = 0; k < n; ++k) {
        S.row(2 * k) = xs[k].transpose();
        S.row(2 * k + 1) = ps[k].transpose();
    }
    return S;
}

}  // namespace cvprivacy
