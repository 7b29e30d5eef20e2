#include "cvprivacy/gaussian_ops.hpp"

#include "cvprivacy/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace cvprivacy {

namespace {

void require_permutation(std::span<const int> perm, int n) {
    if (static_cast<int>(perm.size()) != n) {
        throw Error(ErrorCode::DimensionMismatch, "permutation length differs from mode count");
    }
    std::vector<bool> seen(n, false);
    for (int m : perm) {
        if (m < 0 || m >= n || seen[m]) throw Error(ErrorCode::InvalidArgument, "not a permutation");
        seen[m] = true;
    }
}

}  // namespace

GaussianChannel::GaussianChannel(Matrix gamma, Vector delta, int n_in, int n_out)
    : gamma_(std::move(gamma)), delta_(std::move(delta)), n_in_(n_in), n_out_(n_out) {
    if (n_in < 1 || n_out < 1 || gamma_.rows() != 2 * (n_in + n_out) || delta_.size() != gamma_.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "channel moments do not match n_in + n_out modes");
    }
    if (!is_physical(GaussianState(gamma_, delta_))) {
        throw Error(ErrorCode::Unphysical, "channel Gamma is not a physical covariance matrix");
    }
}

namespace {

// Choi-type moments of n two-mode squeezed pairs, output modes first.
Matrix tmsv_pairs(int n, double r) {
    const double ch = std::cosh(2.0 * r);
    const double sh = std::sinh(2.0 * r);
    const int d = 2 * n;
    Matrix g = ch * Matrix::Identity(2 * d, 2 * d);
    for (int k = 0; k < n; ++k) {
        g(2 * k, d + 2 * k) = g(d + 2 * k, 2 * k) = sh;
        g(2 * k + 1, d + 2 * k + 1) = g(d + 2 * k + 1, 2 * k + 1) = -sh;
    }
    return g;
}

}  // namespace

GaussianChannel identity_channel(int n_modes, double squeezing_r) {
    return GaussianChannel(tmsv_pairs(n_modes, squeezing_r), Vector::Zero(4 * n_modes), n_modes,
                           n_modes);
}

GaussianChannel attenuator_channel(double eta, double squeezing_r) {
    if (eta < 0.0 || eta > 1.0) throw Error(ErrorCode::InvalidArgument, "eta must lie in [0, 1]");
    Matrix g = tmsv_pairs(1, squeezing_r);
    // Loss on the output half: G1 -> eta G1 + (1 - eta) I, G12 -> sqrt(eta) G12.
    g.topLeftCorner(2, 2) = eta * g.topLeftCorner(2, 2) + (1.0 - eta) * Matrix::Identity(2, 2);
    g.topRightCorner(2, 2) *= std::sqrt(eta);
    g.bottomLeftCorner(2, 2) *= std::sqrt(eta);
    return GaussianChannel(g, Vector::Zero(4), 1, 1);
}

GaussianState apply_channel(const GaussianChannel& ch, const GaussianState& s) {
    if (s.n_modes() != ch.n_in()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "channel expects " + std::to_string(ch.n_in()) + " input modes, state has " +
                        std::to_string(s.n_modes()));
    }
    const int d_out = 2 * ch.n_out();
    const int d_in = 2 * ch.n_in();
    Matrix flip = Matrix::Identity(d_out + d_in, d_out + d_in);
    flip.bottomRightCorner(d_in, d_in) = momentum_flip(ch.n_in());
    const Matrix g = flip * ch.gamma() * flip;

    const Matrix g1 = g.topLeftCorner(d_out, d_out);
    const Matrix g12 = g.topRightCorner(d_out, d_in);
    const Matrix kernel = g.bottomRightCorner(d_in, d_in) + s.cov();
    const Eigen::PartialPivLU<Matrix> lu(kernel);
    if (lu.rcond() < tol::rank) {
        throw Error(ErrorCode::SingularKernel, "Gamma_2 + gamma is singular");
    }
    const Matrix cov = g1 - g12 * lu.solve(g12.transpose());
    const Vector disp =
        ch.delta().head(d_out) + g12 * lu.solve(ch.delta().tail(d_in) + s.disp());
    return GaussianState(0.5 * (cov + cov.transpose()), disp);
}

GaussianState apply_symplectic(const Matrix& S, const Vector& T, const GaussianState& s) {
    if (S.rows() != s.cov().rows() || S.cols() != s.cov().cols() || T.size() != s.disp().size()) {
        throw Error(ErrorCode::DimensionMismatch, "transformation does not match state dimension");
    }
    if (!is_symplectic(S)) throw Error(ErrorCode::NotSymplectic, "S sigma S^T != sigma");
    const Matrix cov = S * s.cov() * S.transpose();
    return GaussianState(0.5 * (cov + cov.transpose()), S * s.disp() + T);
}

GaussianState apply_symplectic(const Matrix& S, const GaussianState& s) {
    return apply_symplectic(S, Vector::Zero(s.disp().size()), s);
}

std::vector<int> mode_coordinates(std::span<const int> modes) {
    std::vector<int> coords;
    coords.reserve(2 * modes.size());
    for (int m : modes) {
        coords.push_back(2 * m);
        coords.push_back(2 * m + 1);
    }
    return coords;
}

namespace {

struct ModePartition {
    std::vector<int> measured;
    std::vector<int> rest;
};

ModePartition partition_modes(int n_modes, std::span<const int> measured_modes) {
    if (measured_modes.empty()) throw Error(ErrorCode::InvalidArgument, "no modes to measure");
    ModePartition p;
    std::vector<bool> flag(n_modes, false);
    for (int m : measured_modes) {
        if (m < 0 || m >= n_modes || flag[m]) {
            throw Error(ErrorCode::InvalidArgument, "invalid or repeated measured mode");
        }
        flag[m] = true;
        p.measured.push_back(m);
    }
    for (int m = 0; m < n_modes; ++m) {
        if (!flag[m]) p.rest.push_back(m);
    }
    if (p.rest.empty()) throw Error(ErrorCode::InvalidArgument, "no modes left after measurement");
    return p;
}

Matrix cross_block(const Matrix& m, std::span<const int> rows, std::span<const int> cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
    }
    return out;
}

}  // namespace

HomodyneOutcome homodyne_x(const GaussianState& s, std::span<const int> measured_modes,
                           const Vector& results) {
    const ModePartition p = partition_modes(s.n_modes(), measured_modes);
    if (results.size() != static_cast<Eigen::Index>(p.measured.size())) {
        throw Error(ErrorCode::DimensionMismatch, "one result per measured mode is required");
    }
    const std::vector<int> a_idx = mode_coordinates(p.measured);
    const std::vector<int> b_idx = mode_coordinates(p.rest);

    const Matrix A = submatrix(s.cov(), a_idx);
    const Matrix B = submatrix(s.cov(), b_idx);
    const Matrix C = cross_block(s.cov(), a_idx, b_idx);

    const int na = static_cast<int>(p.measured.size());
    Matrix X = Matrix::Zero(2 * na, 2 * na);
    Vector x = Vector::Zero(2 * na);
    for (int k = 0; k < na; ++k) {
        X(2 * k, 2 * k) = 1.0;
        x(2 * k) = results(k);
    }
    const Matrix xax_pinv = pseudo_inverse(X * A * X);
    const Matrix gain = C.transpose() * xax_pinv;

    const Matrix cov = B - gain * C;
    const Vector disp = subvector(s.disp(), b_idx) + gain * (x - subvector(s.disp(), a_idx));
    return {results, GaussianState(0.5 * (cov + cov.transpose()), disp)};
}

HomodyneOutcome homodyne_x(const GaussianState& s, std::span<const int> measured_modes,
                           CounterRng& rng) {
    std::vector<int> x_coords;
    for (int m : measured_modes) {
        if (m < 0 || m >= s.n_modes()) throw Error(ErrorCode::InvalidArgument, "invalid measured mode");
        x_coords.push_back(2 * m);
    }
    const GaussianDensity density = quadrature_density(s, x_coords);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(density.covariance);
    const Matrix factor =
        eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Vector z(density.mean.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
    return homodyne_x(s, measured_modes, Vector(density.mean + factor * z));
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    const auto da = a.cov().rows();
    const auto db = b.cov().rows();
    Matrix cov = Matrix::Zero(da + db, da + db);
    cov.topLeftCorner(da, da) = a.cov();
    cov.bottomRightCorner(db, db) = b.cov();
    Vector disp(da + db);
    disp << a.disp(), b.disp();
    return GaussianState(cov, disp);
}

GaussianState reorder_modes(const GaussianState& s, std::span<const int> perm) {
    require_permutation(perm, s.n_modes());
    const std::vector<int> coords = mode_coordinates(perm);
    return GaussianState(submatrix(s.cov(), coords), subvector(s.disp(), coords));
}

}  // namespace cvprivacy
