#pragma once

#include "cvprivacy/symplectic.hpp"

#include <span>
#include <string_view>

namespace cvprivacy {

/// A Gaussian state is fixed by its covariance matrix and displacement.
///
/// Convention: gamma_kl = tr(rho {R_k - d_k, R_l - d_l}_+), so the vacuum
/// has gamma = I and the probability covariance of the quadratures is
/// gamma / 2. The class only enforces shape and symmetry; physicality is a
/// separate query because partial transposes are legitimately unphysical.
class GaussianState {
public:
    GaussianState(Matrix cov, Vector disp);
    explicit GaussianState(Matrix cov);

    static GaussianState vacuum(int n_modes);
    static GaussianState thermal(int n_modes, double nu);

    int n_modes() const noexcept { return static_cast<int>(cov_.rows() / 2); }
    const Matrix& cov() const noexcept { return cov_; }
    const Vector& disp() const noexcept { return disp_; }

private:
    Matrix cov_;
    Vector disp_;
};

/// Alice owns the first n_a modes, Bob the following n_b.
struct BipartiteSplit {
    int n_a = 1;
    int n_b = 1;

    int n_modes() const noexcept { return n_a + n_b; }
};

void validate_split(const GaussianState& s, BipartiteSplit split);

/// Two-mode family with A = B = lambda*I and C = diag(c_x, -c_p).
struct SymmetricStateParams {
    double lambda = 1.0;
    double c_x = 0.0;
    double c_p = 0.0;

    /// lambda^2 - c_x c_p - 1 >= lambda (c_x - c_p)
    bool physical() const noexcept;
    /// lambda^2 + c_x c_p - 1 < lambda (c_x + c_p)
    bool entangled() const noexcept;
};

/// Covariance of the symmetric family without any physicality check.
Matrix symmetric_state_cov(const SymmetricStateParams& p);

/// Throws Unphysical if the positivity condition fails.
GaussianState make_symmetric_state(const SymmetricStateParams& p);

/// Two-mode squeezed vacuum: lambda = cosh 2r, c_x = c_p = sinh 2r.
GaussianState two_mode_squeezed_vacuum(double r);

double min_symplectic_eigenvalue(const Matrix& cov);

bool is_physical(const GaussianState& s);

/// Throws Unphysical unless is_physical(s).
void require_physical(const GaussianState& s);

/// tr(rho^2) = det(gamma)^{-1/2}.
double purity(const GaussianState& s);

/// Flips the sign of Bob's momenta in both moments. The result is not
/// required to be physical.
GaussianState partial_transpose(const GaussianState& s, BipartiteSplit split);

/// Smallest symplectic eigenvalue of the partial transpose.
double min_pt_symplectic_eigenvalue(const GaussianState& s, BipartiteSplit split);

/// Smallest eigenvalue of gamma - sigma~ gamma^{-1} sigma~^T, with sigma~
/// the symplectic form with Bob's blocks conjugated by the momentum flip.
/// Negative exactly when the state is NPPT.
double nppt_witness_eigenvalue(const GaussianState& s, BipartiteSplit split);

/// sigma~ = (I_A + theta_B) sigma (I_A + theta_B).
Matrix partially_transposed_form(BipartiteSplit split);

/// Non-positive partial transpose. Ties within tol::psd of the boundary are
/// reported as PPT.
bool is_nppt(const GaussianState& s, BipartiteSplit split);

enum class Separability { Separable, Entangled, Undecided };

std::string_view to_string(Separability v);

/// NPPT states are entangled for every split; a PPT state is separable for
/// 1 x N and N x 1 splits and Undecided otherwise.
Separability is_separable(const GaussianState& s, BipartiteSplit split);

/// Gaussian states are distillable exactly when they are NPPT.
bool is_distillable(const GaussianState& s, BipartiteSplit split);

/// Marginal probability density of a subset of canonical coordinates.
struct GaussianDensity {
    Vector mean;
    Matrix covariance;  // probability covariance, i.e. gamma_sub / 2

    /// Normalized density at x.
    double pdf(const Vector& x) const;
};

GaussianDensity quadrature_density(const GaussianState& s, std::span<const int> coords);

/// Rows/columns `coords` of a matrix, in the order given.
Matrix submatrix(const Matrix& m, std::span<const int> coords);
Vector subvector(const Vector& v, std::span<const int> coords);

}  // namespace cvprivacy
