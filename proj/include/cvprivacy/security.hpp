#pragma once

#include "cvprivacy/gaussian_state.hpp"

#include <string>

namespace cvprivacy {

/// Canonical coordinates Alice and Bob measure in step 2 of the protocol.
/// Both must be X quadratures (even indices); Alice's lies in her modes,
/// Bob's in his.
struct MeasuredCoords {
    int alice = 0;
    int bob = 2;
};

/// X of the first mode on each side.
MeasuredCoords default_coords(BipartiteSplit split);

void validate_coords(const GaussianState& s, BipartiteSplit split, MeasuredCoords coords);

struct Purification {
    GaussianState joint;  // modes (A, B, E); E has as many modes as A + B
    Matrix F;             // off-diagonal block between A+B and E
    Matrix gamma_E;       // theta gamma_AB theta
};

/// F = sigma [-(sigma gamma)^2 - I]^{1/2} theta and gamma_E = theta gamma theta.
Purification purify(const GaussianState& s);

/// Eve's state after Alice and Bob obtain (+X0, +X0); the (-X0, -X0)
/// branch has the same covariance and opposite displacement.
struct ConditionalEveState {
    Matrix gamma_E_prime;
    Vector d_E_prime;
};

ConditionalEveState eve_conditional_state(const Purification& p, double X0,
                                          MeasuredCoords coords);

/// Uhlmann fidelity of two Gaussian states with common covariance:
/// exp(-(d+ - d-)^T gamma^{-1} (d+ - d-) / 4), i.e. exp(-d^T gamma^{-1} d)
/// for d+- = +-d.
double gaussian_fidelity_equal_cov(const Matrix& gamma, const Vector& d_plus, const Vector& d_minus);

// Exponents are coefficients of X0^2. Every verdict below compares
// exponents only, so none of them depends on X0.

/// log(eps_B / (1 - eps_B)) / X0^2 = -4b / (ac - b^2) with gamma_x = [[a, b], [b, c]].
double eps_ratio_exponent(const GaussianState& s, MeasuredCoords coords);
double eps_ratio(const GaussianState& s, double X0, MeasuredCoords coords);

/// log(F) / X0^2 = -(1,1) ((sigma gamma^{-1} sigma^T)_x^{-1} - gamma_x^{-1}) (1,1)^T.
double fidelity_exponent(const GaussianState& s, MeasuredCoords coords);
double eve_fidelity(const GaussianState& s, double X0, MeasuredCoords coords);

/// eps ratio < fidelity, strictly (a tie is insecure).
bool individual_condition(const GaussianState& s, MeasuredCoords coords);

/// eps ratio < fidelity^2, strictly.
bool collective_condition(const GaussianState& s, MeasuredCoords coords);

/// Left-hand side of
///     (d + f - 2e)/(df - e^2) - (a + c + 2b)/(ac - b^2) < 0,
/// with (a, b, c) from gamma_x and (d, e, f) from (sigma gamma^{-1} sigma^T)_x.
double general_key_margin(const GaussianState& s, BipartiteSplit split, MeasuredCoords coords);

/// general_key_margin < 0 with the fail-safe tolerance.
bool general_key_condition(const GaussianState& s, BipartiteSplit split, MeasuredCoords coords);

/// Local Gaussian preprocessing S_A + S_B chosen so that the condition
/// above, evaluated on the X of the first mode on each side, is as negative
/// as the state allows. Returns the transformed state.
struct Preprocessing {
    Matrix S;             // block-diagonal local symplectic
    GaussianState state;  // S gamma S^T
};

Preprocessing distillation_preprocessing(const GaussianState& s, BipartiteSplit split);

/// Whether some protocol run (after local Gaussian preprocessing) satisfies
/// the key condition. This is the quantity that coincides with NPPT.
bool key_distillable(const GaussianState& s, BipartiteSplit split, MeasuredCoords coords);

struct AdvantageExponents {
    double bob = 0.0;         // N log(eps ratio) / X0^2
    double eve = 0.0;         // N log(F) / X0^2
    double eve_collective = 0.0;  // N log(F^2) / X0^2
};

AdvantageExponents advantage_distillation_exponents(const GaussianState& s, MeasuredCoords coords,
                                                     int N);

/// ESTIMATE: 1 - h2(eps_BN) - h2((1 + F^N)/2), with eps_BN = r^N/(1 + r^N).
/// Bob's information after N-block advantage distillation minus the Holevo
/// quantity of two pure states with overlap F^N. Positive for large N
/// exactly when the collective condition holds; never positive when the
/// individual condition fails.
double key_rate_estimate(const GaussianState& s, MeasuredCoords coords, int N, double X0 = 1.0);

struct SecurityReport {
    BipartiteSplit split;
    MeasuredCoords coords;
    double x0 = 1.0;
    int block_length = 1;
    double eps_ratio_exponent = 0.0;
    double fidelity_exponent = 0.0;
    double eps_B = 0.5;
    double fidelity = 1.0;
    double min_pt_symplectic_eigenvalue = 1.0;
    bool ppt = true;
    bool individual_secure = false;
    bool collective_secure = false;
    bool general_key_condition = false;
    bool key_distillable = false;
    double key_rate_estimate = 0.0;
};

/// Throws Unphysical for unphysical input and NumericalFailure if the
/// verdicts break individual => nppt or collective => individual.
SecurityReport analyze(const GaussianState& s, BipartiteSplit split, MeasuredCoords coords,
                       double X0 = 1.0, int N = 1);
SecurityReport analyze(const GaussianState& s, BipartiteSplit split);

}  // namespace cvprivacy
