#pragma once

#include "cvprivacy/gaussian_state.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cvprivacy {

using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kTailTolerance = 1e-8;

/// Truncated Fock-space density matrix of one or two modes. Basis index of
/// |n_1 ... n_m> is n_1 cutoff^{m-1} + ... + n_m.
struct FockState {
    int cutoff = 0;
    int n_modes = 0;
    ComplexMatrix rho;       // renormalized to unit trace
    double tail_mass = 0.0;  // 1 - trace before renormalization
};

int default_cutoff(int n_modes);

/// Exact matrix elements <m|rho|n> for |m|, |n| < cutoff, read off the
/// Taylor coefficients of e^{alpha* . alpha} <alpha|rho|alpha>, which is
/// the exponential of a quadratic form in (alpha*, alpha). Throws
/// TailTooHeavy if the truncated trace misses at least kTailTolerance.
FockState gaussian_to_fock(const GaussianState& s, int cutoff);
FockState gaussian_to_fock(const GaussianState& s);

struct FockMoments {
    Vector disp;
    Matrix cov;
};

/// d_k = tr(rho R_k), gamma_kl = tr(rho {R_k - d_k, R_l - d_l}), with
/// X = (a + a^dag)/sqrt 2 and P = i(a^dag - a)/sqrt 2 truncated to the cutoff.
FockMoments fock_moments(const FockState& f);

/// tr sqrt(sqrt(rho_1) rho_0 sqrt(rho_1)). Throws NumericalFailure if either
/// input has an eigenvalue below -1e-10.
double uhlmann_fidelity(const FockState& r0, const FockState& r1);

/// An orthonormal basis, one vector per column; it defines the projective
/// measurement {|u_i><u_i|}.
using MeasurementBasis = ComplexMatrix;

/// min over the supplied bases of sum_i sqrt(<u_i|rho_0|u_i> <u_i|rho_1|u_i>).
double minimal_discrimination_overlap(const FockState& r0, const FockState& r1,
                                      const std::vector<MeasurementBasis>& measurements);

/// Qubit bases {|psi>, |psi_perp>} with |psi> = cos(t/2)|0> + e^{i p} sin(t/2)|1>,
/// t in [0, pi] and p in [0, 2 pi) on an n_theta x n_phi grid.
std::vector<MeasurementBasis> qubit_basis_grid(int n_theta, int n_phi);

/// Projection of a single-mode state onto its first `dim` levels, renormalized.
FockState truncate(const FockState& f, int dim);

}  // namespace cvprivacy
