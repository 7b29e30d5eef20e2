#include "cvprivacy/fock_oracle.hpp"

#include "cvprivacy/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <string>

namespace cvprivacy {

namespace {

using cd = std::complex<double>;

constexpr double kNegativeEigenvalue = -1e-10;

ComplexMatrix annihilation(int cutoff) {
    ComplexMatrix a = ComplexMatrix::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

ComplexMatrix kron(const ComplexMatrix& x, const ComplexMatrix& y) {
    ComplexMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        }
    }
    return out;
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (m + m.adjoint()));
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "Hermitian eigensolver failed");
    }
    const Vector& w = eig.eigenvalues();
    if (w.minCoeff() < kNegativeEigenvalue) {
        throw Error(ErrorCode::NumericalFailure,
                    "density matrix has eigenvalue " + std::to_string(w.minCoeff()) + " < -1e-10");
    }
    const Vector root = w.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.cast<cd>().asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

int default_cutoff(int n_modes) { return n_modes == 1 ? 40 : 20; }

FockState gaussian_to_fock(const GaussianState& s) { return gaussian_to_fock(s, default_cutoff(s.n_modes())); }

FockState gaussian_to_fock(const GaussianState& s, int cutoff) {
    const int m = s.n_modes();
    if (m < 1 || m > 2) throw Error(ErrorCode::InvalidArgument, "Fock conversion supports 1 or 2 modes");
    if (cutoff < 1) throw Error(ErrorCode::InvalidArgument, "cutoff must be positive");
    require_physical(s);

    // Q-function covariance (gamma + I)/2 and the map from v = (z, w) =
    // (alpha*, alpha) to phase space: x = (z + w)/sqrt 2, p = i(z - w)/sqrt 2.
    const int dim = 2 * m;
    const Matrix sigma_q = 0.5 * (s.cov() + Matrix::Identity(dim, dim));
    const Eigen::LLT<Matrix> llt(sigma_q);
    const Matrix sigma_q_inv = llt.solve(Matrix::Identity(dim, dim));
    ComplexMatrix L = ComplexMatrix::Zero(dim, dim);
    const double r = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < m; ++k) {
        L(2 * k, k) = r;
        L(2 * k, m + k) = r;
        L(2 * k + 1, k) = cd(0.0, r);
        L(2 * k + 1, m + k) = cd(0.0, -r);
    }
    ComplexMatrix J = ComplexMatrix::Zero(dim, dim);
    J.topRightCorner(m, m).setIdentity();
    J.bottomLeftCorner(m, m).setIdentity();

    const ComplexMatrix A = J - L.transpose() * sigma_q_inv.cast<cd>() * L;
    const Eigen::VectorXcd b = L.transpose() * (sigma_q_inv * s.disp()).cast<cd>();
    double det_q = llt.matrixL().toDenseMatrix().diagonal().prod();
    det_q *= det_q;
    const double t = std::exp(-0.5 * s.disp().dot(sigma_q_inv * s.disp())) / std::sqrt(det_q);

    // g_k = c_k sqrt(k!) / T over the multi-index k in [0, cutoff)^{2m}, with
    // g_{k+e_i} = (b_i g_k + sum_j A_ij sqrt(k_j) g_{k-e_j}) / sqrt(k_i + 1).
    std::vector<long> stride(dim);
    long total = 1;
    for (int i = dim - 1; i >= 0; --i) {
        stride[i] = total;
        total *= cutoff;
    }
    std::vector<cd> g(static_cast<std::size_t>(total));
    std::vector<double> sqrt_n(cutoff + 1);
    for (int n = 0; n <= cutoff; ++n) sqrt_n[n] = std::sqrt(static_cast<double>(n));
    std::vector<int> k(dim, 0);
    g[0] = 1.0;
    for (long idx = 1; idx < total; ++idx) {
        // advance the multi-index k to match idx
        for (int i = dim - 1; i >= 0; --i) {
            if (++k[i] < cutoff) break;
            k[i] = 0;
        }
        int i = 0;
        while (k[i] == 0) ++i;
        const long prev = idx - stride[i];
        cd acc = b(i) * g[prev];
        for (int j = 0; j < dim; ++j) {
            const int kj = k[j] - (j == i ? 1 : 0);
            if (kj == 0) continue;
            acc += A(i, j) * sqrt_n[kj] * g[prev - stride[j]];
        }
        g[idx] = acc / sqrt_n[k[i]];
    }

    // v = (z_1..z_m, w_1..w_m): the z powers index the row, the w powers the
    // column, so with cutoff^m = D the flat index is row * D + col.
    const long D = static_cast<long>(std::pow(cutoff, m));
    FockState f;
    f.cutoff = cutoff;
    f.n_modes = m;
    f.rho.resize(D, D);
    for (long row = 0; row < D; ++row) {
        for (long col = 0; col < D; ++col) f.rho(row, col) = t * g[row * D + col];
    }
    const double trace = f.rho.trace().real();
    f.tail_mass = 1.0 - trace;
    if (!(f.tail_mass < kTailTolerance)) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "truncated trace misses %.3e at cutoff %d", f.tail_mass, cutoff);
        throw Error(ErrorCode::TailTooHeavy, msg);
    }
    f.rho = 0.5 * (f.rho + f.rho.adjoint()) / trace;
    return f;
}

FockMoments fock_moments(const FockState& f) {
    const int m = f.n_modes;
    const ComplexMatrix a1 = annihilation(f.cutoff);
    const ComplexMatrix id = ComplexMatrix::Identity(f.cutoff, f.cutoff);
    std::vector<ComplexMatrix> R;
    const double r = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < m; ++k) {
        ComplexMatrix a = (m == 1) ? a1 : (k == 0 ? kron(a1, id) : kron(id, a1));
        R.push_back(r * (a + a.adjoint()));
        R.push_back(cd(0.0, r) * (a.adjoint() - a));
    }
    FockMoments out;
    out.disp.resize(2 * m);
    out.cov.resize(2 * m, 2 * m);
    for (int k = 0; k < 2 * m; ++k) out.disp(k) = (f.rho * R[k]).trace().real();
    for (int k = 0; k < 2 * m; ++k) {
        for (int l = 0; l < 2 * m; ++l) {
            const double second = 2.0 * (f.rho * R[k] * R[l]).trace().real();
            out.cov(k, l) = second - 2.0 * out.disp(k) * out.disp(l);
        }
    }
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

double uhlmann_fidelity(const FockState& r0, const FockState& r1) {
    if (r0.rho.rows() != r1.rho.rows() || r0.n_modes != r1.n_modes) {
        throw Error(ErrorCode::DimensionMismatch, "states live in different truncated spaces");
    }
    const ComplexMatrix s1 = hermitian_sqrt(r1.rho);
    hermitian_sqrt(r0.rho);  // positivity check only
    const ComplexMatrix inner = s1 * r0.rho * s1;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (inner + inner.adjoint()),
                                                     Eigen::EigenvaluesOnly);
    double fid = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        fid += std::sqrt(std::max(0.0, eig.eigenvalues()(i)));
    }
    return std::min(fid, 1.0);
}

double minimal_discrimination_overlap(const FockState& r0, const FockState& r1,
                                      const std::vector<MeasurementBasis>& measurements) {
    if (r0.rho.rows() != r1.rho.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "states live in different truncated spaces");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const MeasurementBasis& u : measurements) {
        if (u.rows() != r0.rho.rows()) {
            throw Error(ErrorCode::DimensionMismatch, "measurement basis has the wrong dimension");
        }
        double sum = 0.0;
        for (Eigen::Index i = 0; i < u.cols(); ++i) {
            const auto col = u.col(i);
            const double p0 = std::max(0.0, (col.adjoint() * r0.rho * col)(0, 0).real());
            const double p1 = std::max(0.0, (col.adjoint() * r1.rho * col)(0, 0).real());
            sum += std::sqrt(p0 * p1);
        }
        best = std::min(best, sum);
    }
    return best;
}

std::vector<MeasurementBasis> qubit_basis_grid(int n_theta, int n_phi) {
    if (n_theta < 2 || n_phi < 1) throw Error(ErrorCode::InvalidArgument, "grid too small");
    const double pi = std::acos(-1.0);
    std::vector<MeasurementBasis> out;
    out.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    for (int i = 0; i < n_theta; ++i) {
        const double th = pi * i / (n_theta - 1);
        for (int j = 0; j < n_phi; ++j) {
            const cd phase = std::polar(1.0, 2.0 * pi * j / n_phi);
            MeasurementBasis u(2, 2);
            u(0, 0) = std::cos(th / 2);
            u(1, 0) = phase * std::sin(th / 2);
            u(0, 1) = -std::conj(u(1, 0));
            u(1, 1) = std::conj(u(0, 0));
            out.push_back(u);
        }
    }
    return out;
}

FockState truncate(const FockState& f, int dim) {
    if (f.n_modes != 1) throw Error(ErrorCode::InvalidArgument, "truncate supports one mode");
    if (dim < 1 || dim > f.cutoff) throw Error(ErrorCode::InvalidArgument, "invalid truncation");
    FockState out;
    out.cutoff = dim;
    out.n_modes = 1;
    out.rho = f.rho.topLeftCorner(dim, dim);
    const double trace = out.rho.trace().real();
    out.tail_mass = 1.0 - trace;
    out.rho /= trace;
    return out;
}

}  // namespace cvprivacy
