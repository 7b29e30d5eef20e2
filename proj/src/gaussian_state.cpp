#include "cvprivacy/gaussian_state.hpp"

#include "cvprivacy/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cvprivacy {

namespace {

double scale_of(const Matrix& m) {
    return m.size() == 0 ? 1.0 : std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace

GaussianState::GaussianState(Matrix cov, Vector disp) : cov_(std::move(cov)), disp_(std::move(disp)) {
    if (cov_.rows() != cov_.cols() || cov_.rows() == 0 || cov_.rows() % 2 != 0) {
        throw Error(ErrorCode::DimensionMismatch,
                    "covariance must be 2n x 2n, got " + std::to_string(cov_.rows()) + "x" +
                        std::to_string(cov_.cols()));
    }
    if (disp_.size() != cov_.rows()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "displacement has length " + std::to_string(disp_.size()) + ", expected " +
                        std::to_string(cov_.rows()));
    }
    if (!cov_.allFinite() || !disp_.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "moments must be finite");
    }
    if (asymmetry(cov_) > tol::lin * scale_of(cov_)) {
        throw Error(ErrorCode::NotSymmetric,
                    "covariance asymmetry " + std::to_string(asymmetry(cov_)));
    }
    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
}

GaussianState::GaussianState(Matrix cov) : GaussianState(cov, Vector::Zero(cov.rows())) {}

GaussianState GaussianState::vacuum(int n_modes) {
    if (n_modes < 1) throw Error(ErrorCode::InvalidArgument, "n_modes must be positive");
    return GaussianState(Matrix::Identity(2 * n_modes, 2 * n_modes));
}

GaussianState GaussianState::thermal(int n_modes, double nu) {
    if (n_modes < 1) throw Error(ErrorCode::InvalidArgument, "n_modes must be positive");
    return GaussianState(nu * Matrix::Identity(2 * n_modes, 2 * n_modes));
}

void validate_split(const GaussianState& s, BipartiteSplit split) {
    if (split.n_a < 1 || split.n_b < 1 || split.n_modes() != s.n_modes()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "split " + std::to_string(split.n_a) + "+" + std::to_string(split.n_b) +
                        " does not partition " + std::to_string(s.n_modes()) + " modes");
    }
}

bool SymmetricStateParams::physical() const noexcept {
    return lambda * lambda - c_x * c_p - 1.0 >= lambda * (c_x - c_p);
}

bool SymmetricStateParams::entangled() const noexcept {
    return lambda * lambda + c_x * c_p - 1.0 < lambda * (c_x + c_p);
}

Matrix symmetric_state_cov(const SymmetricStateParams& p) {
    Matrix cov = p.lambda * Matrix::Identity(4, 4);
    cov(0, 2) = cov(2, 0) = p.c_x;
    cov(1, 3) = cov(3, 1) = -p.c_p;
    return cov;
}

GaussianState make_symmetric_state(const SymmetricStateParams& p) {
    if (p.lambda < 0.0 || p.c_p < 0.0 || p.c_x < p.c_p) {
        throw Error(ErrorCode::InvalidArgument, "require lambda >= 0 and c_x >= c_p >= 0");
    }
    if (!p.physical()) {
        throw Error(ErrorCode::Unphysical,
                    "lambda^2 - c_x c_p - 1 < lambda (c_x - c_p) for lambda=" + std::to_string(p.lambda) +
                        ", c_x=" + std::to_string(p.c_x) + ", c_p=" + std::to_string(p.c_p));
    }
    return GaussianState(symmetric_state_cov(p));
}

GaussianState two_mode_squeezed_vacuum(double r) {
    const double ch = std::cosh(2.0 * r);
    const double sh = std::sinh(2.0 * r);
    return GaussianState(symmetric_state_cov({ch, sh, sh}));
}

double min_symplectic_eigenvalue(const Matrix& cov) { return symplectic_eigenvalues(cov).back(); }

bool is_physical(const GaussianState& s) {
    try {
        // Rounding the entries alone moves the symplectic spectrum by up to
        // ~eps |gamma|^2, so the band widens for strongly squeezed states.
        const double scale = std::max(1.0, s.cov().cwiseAbs().rowwise().sum().maxCoeff());
        const double band = tol::psd * scale + 16.0 * std::numeric_limits<double>::epsilon() * scale * scale;
        return min_symplectic_eigenvalue(s.cov()) >= 1.0 - band;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotPositiveDefinite) return false;
        throw;
    }
}

void require_physical(const GaussianState& s) {
    if (!is_physical(s)) throw Error(ErrorCode::Unphysical, "covariance violates gamma >= i sigma");
}

double purity(const GaussianState& s) {
    require_physical(s);
    return 1.0 / std::sqrt(s.cov().determinant());
}

namespace {

Matrix bob_flip(BipartiteSplit split) {
    Matrix theta = Matrix::Identity(2 * split.n_modes(), 2 * split.n_modes());
    theta.bottomRightCorner(2 * split.n_b, 2 * split.n_b) = momentum_flip(split.n_b);
    return theta;
}

}  // namespace

GaussianState partial_transpose(const GaussianState& s, BipartiteSplit split) {
    validate_split(s, split);
    const Matrix theta = bob_flip(split);
    return GaussianState(theta * s.cov() * theta, theta * s.disp());
}

double min_pt_symplectic_eigenvalue(const GaussianState& s, BipartiteSplit split) {
    return min_symplectic_eigenvalue(partial_transpose(s, split).cov());
}

Matrix partially_transposed_form(BipartiteSplit split) {
    const Matrix theta = bob_flip(split);
    return theta * symplectic_form(split.n_modes()) * theta;
}

double nppt_witness_eigenvalue(const GaussianState& s, BipartiteSplit split) {
    validate_split(s, split);
    const Matrix st = partially_transposed_form(split);
    const Matrix m = s.cov() - st * s.cov().inverse() * st.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
}

bool is_nppt(const GaussianState& s, BipartiteSplit split) {
    validate_split(s, split);
    require_physical(s);
    return min_pt_symplectic_eigenvalue(s, split) < 1.0 - tol::psd;
}

std::string_view to_string(Separability v) {
    switch (v) {
        case Separability::Separable: return "separable";
        case Separability::Entangled: return "entangled";
        case Separability::Undecided: return "undecided";
    }
    return "undecided";
}

Separability is_separable(const GaussianState& s, BipartiteSplit split) {
    if (is_nppt(s, split)) return Separability::Entangled;
    if (split.n_a == 1 || split.n_b == 1) return Separability::Separable;
    return Separability::Undecided;
}

bool is_distillable(const GaussianState& s, BipartiteSplit split) { return is_nppt(s, split); }

Matrix submatrix(const Matrix& m, std::span<const int> coords) {
    const auto k = static_cast<Eigen::Index>(coords.size());
    Matrix out(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) out(i, j) = m(coords[i], coords[j]);
    }
    return out;
}

Vector subvector(const Vector& v, std::span<const int> coords) {
    Vector out(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(coords[i]);
    return out;
}

double GaussianDensity::pdf(const Vector& x) const {
    const Eigen::LLT<Matrix> llt(covariance);
    const Vector dx = x - mean;
    const double q = dx.dot(llt.solve(dx));
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double k = static_cast<double>(mean.size());
    return std::exp(-0.5 * q - 0.5 * logdet - 0.5 * k * std::log(2.0 * std::numbers::pi));
}

GaussianDensity quadrature_density(const GaussianState& s, std::span<const int> coords) {
    require_physical(s);
    if (coords.empty()) throw Error(ErrorCode::InvalidArgument, "no coordinates selected");
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] < 0 || coords[i] >= s.cov().rows()) {
            throw Error(ErrorCode::InvalidArgument, "coordinate index out of range");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (coords[i] == coords[j]) throw Error(ErrorCode::InvalidArgument, "repeated coordinate");
        }
    }
    return {subvector(s.disp(), coords), 0.5 * submatrix(s.cov(), coords)};
}

}  // namespace cvprivacy
