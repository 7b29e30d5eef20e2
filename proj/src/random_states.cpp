#include "cvprivacy/random_states.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace cvprivacy {

Matrix random_symplectic(int n_modes, CounterRng& rng, double scale) {
    const int dim = 2 * n_modes;
    Matrix h(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) h(i, j) = h(j, i) = scale * rng.normal();
    }
    const Matrix generator = symplectic_form(n_modes) * h;
    return generator.exp();
}

GaussianState random_physical_state(int n_modes, CounterRng& rng, const RandomStateOptions& opts) {
    const Matrix S = random_symplectic(n_modes, rng, opts.generator_scale);
    Vector nu(2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        nu(2 * k) = nu(2 * k + 1) = 1.0 + opts.max_excess_noise * rng.uniform();
    }
    Vector disp(2 * n_modes);
    for (int k = 0; k < 2 * n_modes; ++k) {
        disp(k) = opts.max_displacement * (2.0 * rng.uniform() - 1.0);
    }
    Matrix cov = S * nu.asDiagonal() * S.transpose();
    return GaussianState(0.5 * (cov + cov.transpose()), disp);
}

}  // namespace cvprivacy
