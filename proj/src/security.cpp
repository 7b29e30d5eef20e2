#include "cvprivacy/security.hpp"

#include "cvprivacy/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace cvprivacy {

namespace {

// Relative band below which an exponent comparison counts as a tie.
constexpr double kVerdictBand = tol::psd;
// Same for the key-condition margin, whose terms are O(1) rationals.
constexpr double kMarginBand = 1e-12;

Eigen::Matrix2d x_block(const Matrix& m, MeasuredCoords c) {
    Eigen::Matrix2d out;
    out << m(c.alice, c.alice), m(c.alice, c.bob), m(c.bob, c.alice), m(c.bob, c.bob);
    return out;
}

// sigma gamma^{-1} sigma^T, optionally with Bob's blocks of sigma negated.
Matrix conjugated_inverse(const GaussianState& s, const Matrix& form) {
    const Eigen::LDLT<Matrix> ldlt(s.cov());
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw Error(ErrorCode::NotPositiveDefinite, "covariance matrix is not positive definite");
    }
    const Matrix m = form * ldlt.solve(form.transpose());
    return 0.5 * (m + m.transpose());
}

double quad(const Eigen::Matrix2d& m, double u0, double u1) {
    return u0 * u0 * m(0, 0) + 2.0 * u0 * u1 * m(0, 1) + u1 * u1 * m(1, 1);
}

Eigen::Matrix2d inverse_2x2(const Eigen::Matrix2d& m) {
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (!(det > 0.0)) {
        throw Error(ErrorCode::SingularBlock, "measured 2x2 block is not positive definite");
    }
    Eigen::Matrix2d inv;
    inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return inv / det;
}

bool strictly_less(double lhs, double rhs) {
    return lhs < rhs - kVerdictBand * (1.0 + std::abs(lhs) + std::abs(rhs));
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace

MeasuredCoords default_coords(BipartiteSplit split) { return {0, 2 * split.n_a}; }

void validate_coords(const GaussianState& s, BipartiteSplit split, MeasuredCoords coords) {
    validate_split(s, split);
    const int a_end = 2 * split.n_a;
    const int b_end = 2 * split.n_modes();
    if (coords.alice < 0 || coords.alice >= a_end || coords.alice % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "Alice's coordinate must be an X quadrature of her modes, got " +
                        std::to_string(coords.alice));
    }
    if (coords.bob < a_end || coords.bob >= b_end || coords.bob % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "Bob's coordinate must be an X quadrature of his modes, got " +
                        std::to_string(coords.bob));
    }
}

Purification purify(const GaussianState& s) {
    require_physical(s);
    const int n = s.n_modes();
    const int d = 2 * n;
    const Matrix& g = s.cov();
    const Matrix sigma = symplectic_form(n);
    const Matrix theta = momentum_flip(n);

    const Matrix sg = sigma * g;
    const Matrix m = -sg * sg - Matrix::Identity(d, d);
    const Matrix F = sigma * psd_sqrt_of_similar(m, spd_sqrt(g)) * theta;
    const Matrix gamma_E = theta * g * theta;

    Matrix joint(2 * d, 2 * d);
    joint << g, F, F.transpose(), gamma_E;
    return {GaussianState(joint), F, gamma_E};
}

ConditionalEveState eve_conditional_state(const Purification& p, double X0, MeasuredCoords coords) {
    if (!(X0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "X0 must be positive");
    const Matrix& g = p.joint.cov();
    const int d = static_cast<int>(p.F.rows());
    if (coords.alice < 0 || coords.bob < 0 || coords.alice >= d || coords.bob >= d) {
        throw Error(ErrorCode::InvalidArgument, "measured coordinate outside the A+B block");
    }
    const Eigen::Matrix2d gx_inv = inverse_2x2(x_block(g, coords));
    Matrix E(2, p.F.cols());
    E.row(0) = p.F.row(coords.alice);
    E.row(1) = p.F.row(coords.bob);

    const Matrix beta_E = gx_inv * E;
    Matrix gamma = p.gamma_E - E.transpose() * beta_E;
    gamma = 0.5 * (gamma + gamma.transpose());
    const Vector d_E = beta_E.transpose() * Eigen::Vector2d(X0, X0);
    return {gamma, d_E};
}

double gaussian_fidelity_equal_cov(const Matrix& gamma, const Vector& d_plus, const Vector& d_minus) {
    if (d_plus.size() != gamma.rows() || d_minus.size() != gamma.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "displacements do not match the covariance");
    }
    require_physical(GaussianState(gamma));
    const Vector delta = d_plus - d_minus;
    const double q = delta.dot(Eigen::LDLT<Matrix>(gamma).solve(delta));
    return std::exp(-0.25 * q);
}

double eps_ratio_exponent(const GaussianState& s, MeasuredCoords coords) {
    const Eigen::Matrix2d gx = x_block(s.cov(), coords);
    const double det = gx.determinant();
    if (!(det > 0.0)) {
        throw Error(ErrorCode::SingularBlock, "gamma_x is not positive definite");
    }
    return -4.0 * gx(0, 1) / det;
}

double eps_ratio(const GaussianState& s, double X0, MeasuredCoords coords) {
    return std::exp(eps_ratio_exponent(s, coords) * X0 * X0);
}

double fidelity_exponent(const GaussianState& s, MeasuredCoords coords) {
    const int n = s.n_modes();
    const Eigen::Matrix2d q = x_block(conjugated_inverse(s, symplectic_form(n)), coords);
    const Eigen::Matrix2d diff = inverse_2x2(q) - inverse_2x2(x_block(s.cov(), coords));
    return -quad(diff, 1.0, 1.0);
}

double eve_fidelity(const GaussianState& s, double X0, MeasuredCoords coords) {
    require_physical(s);
    return std::exp(fidelity_exponent(s, coords) * X0 * X0);
}

bool individual_condition(const GaussianState& s, MeasuredCoords coords) {
    require_physical(s);
    return strictly_less(eps_ratio_exponent(s, coords), fidelity_exponent(s, coords));
}

bool collective_condition(const GaussianState& s, MeasuredCoords coords) {
    require_physical(s);
    return strictly_less(eps_ratio_exponent(s, coords), 2.0 * fidelity_exponent(s, coords));
}

namespace {

struct KeyMargin {
    double value;
    double scale;
};

KeyMargin key_margin(const GaussianState& s, MeasuredCoords coords) {
    const Eigen::Matrix2d gx = x_block(s.cov(), coords);
    const Eigen::Matrix2d qx = x_block(conjugated_inverse(s, symplectic_form(s.n_modes())), coords);
    const double a = gx(0, 0), b = gx(0, 1), c = gx(1, 1);
    const double dd = qx(0, 0), e = qx(0, 1), f = qx(1, 1);
    const double det_g = a * c - b * b;
    const double det_q = dd * f - e * e;
    if (!(det_g > 0.0) || !(det_q > 0.0)) {
        throw Error(ErrorCode::SingularBlock, "measured 2x2 block is not positive definite");
    }
    const double lhs = (dd + f - 2.0 * e) / det_q;
    const double rhs = (a + c + 2.0 * b) / det_g;
    return {lhs - rhs, std::abs(lhs) + std::abs(rhs)};
}

bool margin_negative(const KeyMargin& m) { return m.value < -kMarginBand * (1.0 + m.scale); }

}  // namespace

double general_key_margin(const GaussianState& s, BipartiteSplit split, MeasuredCoords coords) {
    require_physical(s);
    validate_coords(s, split, coords);
    return key_margin(s, coords).value;
}

bool general_key_condition(const GaussianState& s, BipartiteSplit split, MeasuredCoords coords) {
    require_physical(s);
    validate_coords(s, split, coords);
    return margin_negative(key_margin(s, coords));
}

Preprocessing distillation_preprocessing(const GaussianState& s, BipartiteSplit split) {
    require_physical(s);
    validate_split(s, split);
    const int da = 2 * split.n_a;
    const int db = 2 * split.n_b;
    const int dim = da + db;
    const MeasuredCoords first = default_coords(split);
    const Matrix form = partially_transposed_form(split);

    // Step 1: put the most negative direction of gamma - s~ gamma^{-1} s~^T
    // onto the measured X quadratures. The matrix transforms by congruence
    // under local symplectics.
    Matrix witness = s.cov() - conjugated_inverse(s, form);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (witness + witness.transpose()));
    Matrix S = Matrix::Identity(dim, dim);
    if (eig.eigenvalues()(0) >= 0.0) return {S, s};

    const Vector v = eig.eigenvectors().col(0);
    const Vector va = v.head(da);
    const Vector vb = v.tail(db);
    if (va.norm() == 0.0 || vb.norm() == 0.0) return {S, s};
    S.topLeftCorner(da, da) = symplectic_completion(va / va.norm());
    S.bottomRightCorner(db, db) = symplectic_completion(vb / vb.norm());
    Matrix g1 = S * s.cov() * S.transpose();
    g1 = 0.5 * (g1 + g1.transpose());

    // Step 2: local X squeezing (and a rotation by pi on Bob's side when
    // needed) so that (1, -1) probes the most negative direction of
    // Q~^{-1} - gamma_x^{-1}.
    const Eigen::Matrix2d q = x_block(conjugated_inverse(GaussianState(g1), form), first);
    const Eigen::Matrix2d n2 = inverse_2x2(q) - inverse_2x2(x_block(g1, first));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig2(n2);
    Eigen::Vector2d u = eig2.eigenvectors().col(0);
    const double floor = 1e-6 * u.norm();
    for (int k = 0; k < 2; ++k) {
        if (std::abs(u(k)) < floor) u(k) = (k == 0 ? floor : -floor);
    }

    Matrix local = Matrix::Identity(dim, dim);
    const double flip = (u(0) * u(1) > 0.0) ? -1.0 : 1.0;
    const double s_a = 1.0 / std::abs(u(0));
    const double s_b = 1.0 / std::abs(u(1));
    local(0, 0) = s_a;
    local(1, 1) = 1.0 / s_a;
    local.bottomRightCorner(db, db) *= flip;
    local(da, da) *= s_b;
    local(da + 1, da + 1) /= s_b;
    S = local * S;

    Matrix g2 = S * s.cov() * S.transpose();
    g2 = 0.5 * (g2 + g2.transpose());
    Vector d2 = S * s.disp();
    return {S, GaussianState(g2, d2)};
}

bool key_distillable(const GaussianState& s, BipartiteSplit split, MeasuredCoords coords) {
    if (general_key_condition(s, split, coords)) return true;
    const Preprocessing pre = distillation_preprocessing(s, split);
    if (!is_physical(pre.state)) return false;
    return margin_negative(key_margin(pre.state, default_coords(split)));
}

AdvantageExponents advantage_distillation_exponents(const GaussianState& s, MeasuredCoords coords,
                                                     int N) {
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "block length must be at least 1");
    const double kb = eps_ratio_exponent(s, coords);
    const double kf = fidelity_exponent(s, coords);
    return {N * kb, N * kf, 2.0 * N * kf};
}

double key_rate_estimate(const GaussianState& s, MeasuredCoords coords, int N, double X0) {
    const AdvantageExponents ex = advantage_distillation_exponents(s, coords, N);
    const double x2 = X0 * X0;
    // eps_BN = r^N / (1 + r^N), evaluated as a logistic to stay finite.
    const double eps_bn = 1.0 / (1.0 + std::exp(-ex.bob * x2));
    const double overlap = std::exp(ex.eve * x2);
    return 1.0 - binary_entropy(eps_bn) - binary_entropy(0.5 * (1.0 + overlap));
}

SecurityReport analyze(const GaussianState& s, BipartiteSplit split, MeasuredCoords coords, double X0,
                       int N) {
    require_physical(s);
    validate_coords(s, split, coords);
    if (!(X0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "X0 must be positive");
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "block length must be at least 1");

    SecurityReport r;
    r.split = split;
    r.coords = coords;
    r.x0 = X0;
    r.block_length = N;
    r.eps_ratio_exponent = eps_ratio_exponent(s, coords);
    r.fidelity_exponent = fidelity_exponent(s, coords);
    const double ratio = std::exp(r.eps_ratio_exponent * X0 * X0);
    r.eps_B = ratio / (1.0 + ratio);
    r.fidelity = std::exp(r.fidelity_exponent * X0 * X0);
    r.min_pt_symplectic_eigenvalue = min_pt_symplectic_eigenvalue(s, split);
    r.ppt = !is_nppt(s, split);
    r.individual_secure = strictly_less(r.eps_ratio_exponent, r.fidelity_exponent);
    r.collective_secure = strictly_less(r.eps_ratio_exponent, 2.0 * r.fidelity_exponent);
    r.general_key_condition = general_key_condition(s, split, coords);
    r.key_distillable = key_distillable(s, split, coords);
    r.key_rate_estimate = key_rate_estimate(s, coords, N, X0);

    if (r.individual_secure && r.ppt) {
        throw Error(ErrorCode::NumericalFailure, "individual security reported for a PPT state");
    }
    if (r.collective_secure && !r.individual_secure) {
        throw Error(ErrorCode::NumericalFailure, "collective security without individual security");
    }
    return r;
}

SecurityReport analyze(const GaussianState& s, BipartiteSplit split) {
    return analyze(s, split, default_coords(split));
}

}  // namespace cvprivacy
