#pragma once

#include "cvprivacy/gaussian_state.hpp"
#include "cvprivacy/rng.hpp"

#include <span>
#include <vector>

namespace cvprivacy {

/// A Gaussian CP map given by the moments (Gamma, Delta) of its associated
/// Gaussian state on output + input modes. Gamma is ordered with the n_out
/// output modes first:
///
///     Gamma = [[Gamma_1, Gamma_12], [Gamma_12^T, Gamma_2]]
///
/// Construction rejects an unphysical Gamma.
class GaussianChannel {
public:
    GaussianChannel(Matrix gamma, Vector delta, int n_in, int n_out);

    const Matrix& gamma() const noexcept { return gamma_; }
    const Vector& delta() const noexcept { return delta_; }
    int n_in() const noexcept { return n_in_; }
    int n_out() const noexcept { return n_out_; }

private:
    Matrix gamma_;
    Vector delta_;
    int n_in_;
    int n_out_;
};

/// Identity channel on n modes from two-mode squeezed pairs of squeezing r.
/// Exact on the vacuum for every r; approaches the identity as r grows.
GaussianChannel identity_channel(int n_modes, double squeezing_r = 6.0);

/// Single-mode pure loss with transmissivity eta, same construction.
GaussianChannel attenuator_channel(double eta, double squeezing_r = 6.0);

/// gamma' = G1 - G12 (G2 + gamma)^{-1} G12^T and
/// d' = Delta1 + G12 (G2 + gamma)^{-1} (Delta2 + d), with G = (I + theta) Gamma (I + theta).
GaussianState apply_channel(const GaussianChannel& ch, const GaussianState& s);

/// R -> S R + T: cov' = S cov S^T, disp' = S disp + T.
GaussianState apply_symplectic(const Matrix& S, const Vector& T, const GaussianState& s);
GaussianState apply_symplectic(const Matrix& S, const GaussianState& s);

struct HomodyneOutcome {
    Vector measured_values;    // one X result per measured mode
    GaussianState post_state;  // remaining modes, original order
};

/// X-homodyne on `measured_modes` with given results.
///
/// B' = B - C^T (X A X)^+ C and d_B' = d_B + C^T (X A X)^+ (x - d_A), where
/// x carries the results in the X slots. For zero input displacement this is
/// the textbook update; the shift by d_A extends it to displaced inputs.
HomodyneOutcome homodyne_x(const GaussianState& s, std::span<const int> measured_modes,
                           const Vector& results);

/// Same, drawing the results from the marginal X density of the measured modes.
HomodyneOutcome homodyne_x(const GaussianState& s, std::span<const int> measured_modes,
                           CounterRng& rng);

GaussianState tensor(const GaussianState& a, const GaussianState& b);

/// Mode k of the result is mode perm[k] of the input.
GaussianState reorder_modes(const GaussianState& s, std::span<const int> perm);

/// Phase-space coordinate indices of the given modes, (X, P) pairs in order.
std::vector<int> mode_coordinates(std::span<const int> modes);

}  // namespace cvprivacy
