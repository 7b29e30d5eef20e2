#pragma once

#include "cvprivacy/gaussian_state.hpp"
#include "cvprivacy/rng.hpp"

namespace cvprivacy {

struct RandomStateOptions {
    double generator_scale = 0.5;  // std-dev of the Hamiltonian entries
    double max_excess_noise = 2.0; // symplectic eigenvalues drawn from [1, 1 + max_excess_noise]
    double max_displacement = 0.0; // each displacement entry uniform in [-max, max]
};

/// exp(sigma H) for a random symmetric H with N(0, scale^2) entries.
Matrix random_symplectic(int n_modes, CounterRng& rng, double scale = 0.5);

/// S diag(nu_k) S^T with random S and nu_k >= 1; always physical.
GaussianState random_physical_state(int n_modes, CounterRng& rng, const RandomStateOptions& opts = {});

}  // namespace cvprivacy
