#include "cvprivacy/certification.hpp"

#include "cvprivacy/fock_oracle.hpp"
#include "cvprivacy/random_states.hpp"
#include "cvprivacy/security.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cvprivacy {

namespace {

// R(phi) diag(nu e^{2r}, nu e^{-2r}) R(phi)^T with nu in [1, 1.5] and
// r in [0, 0.4]: bounded so that cutoff 40 keeps all but 1e-8 of the trace.
Matrix random_single_mode_cov(CounterRng& rng) {
    const double nu = 1.0 + 0.5 * rng.uniform();
    const double r = 0.4 * rng.uniform();
    const double phi = std::numbers::pi * rng.uniform();
    Matrix rot(2, 2);
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    const Matrix diag = Vector{{nu * std::exp(2.0 * r), nu * std::exp(-2.0 * r)}}.asDiagonal();
    return rot * diag * rot.transpose();
}

CertificationCheck finish(std::string name, double residual, double tolerance, int n) {
    return {std::move(name), residual, tolerance, n, residual < tolerance};
}

Vector random_displacement(CounterRng& rng) {
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    const double radius = rng.uniform();
    return Vector{{radius * std::cos(angle), radius * std::sin(angle)}};
}

}  // namespace

bool CertificationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

CertificationReport run_certification(const CertificationOptions& opts) {
    CertificationReport report;
    CounterRng rng(opts.seed, 7);

    double fid_res = 0.0, conv_res = 0.0, moment_res = 0.0;
    for (int k = 0; k < opts.fidelity_states; ++k) {
        const GaussianState base(random_single_mode_cov(rng));
        const Vector d = random_displacement(rng);
        const GaussianState plus(base.cov(), d);
        const GaussianState minus(base.cov(), -d);
        const FockState fp = gaussian_to_fock(plus, opts.cutoff);
        const FockState fm = gaussian_to_fock(minus, opts.cutoff);
        const double f = uhlmann_fidelity(fp, fm);
        const double closed = gaussian_fidelity_equal_cov(base.cov(), d, -d);
        fid_res = std::max(fid_res, std::abs(f - closed));

        const double f_hi = uhlmann_fidelity(gaussian_to_fock(plus, opts.cutoff_check),
                                             gaussian_to_fock(minus, opts.cutoff_check));
        conv_res = std::max(conv_res, std::abs(f_hi - f));

        const FockMoments m = fock_moments(fp);
        moment_res = std::max({moment_res, (m.disp - d).cwiseAbs().maxCoeff(),
                               (m.cov - base.cov()).cwiseAbs().maxCoeff()});
    }
    report.checks.push_back(finish("uhlmann_vs_closed_form", fid_res, 1e-3, opts.fidelity_states));
    report.checks.push_back(finish("cutoff_convergence", conv_res, 1e-5, opts.fidelity_states));
    report.checks.push_back(finish("fock_moment_roundtrip", moment_res, 1e-6, opts.fidelity_states));

    // Coherent pair |alpha>, |-alpha>: overlap exp(-2 alpha^2).
    {
        const double alpha = 0.7;
        const Vector d{{std::sqrt(2.0) * alpha, 0.0}};
        const Matrix vac = Matrix::Identity(2, 2);
        const double closed = gaussian_fidelity_equal_cov(vac, d, -d);
        const double fock = uhlmann_fidelity(gaussian_to_fock(GaussianState(vac, d), opts.cutoff),
                                             gaussian_to_fock(GaussianState(vac, -d), opts.cutoff));
        const double exact = std::exp(-2.0 * alpha * alpha);
        report.checks.push_back(finish("coherent_overlap_closed_form", std::abs(closed - exact), 1e-12, 1));
        report.checks.push_back(finish("coherent_overlap_fock", std::abs(fock - exact), 1e-6, 1));
    }

    double chain_res = 0.0, purif_res = 0.0;
    const MeasuredCoords coords{0, 2};
    for (int k = 0; k < opts.chain_states; ++k) {
        const GaussianState s = random_physical_state(2, rng);
        const Purification p = purify(s);
        const ConditionalEveState e = eve_conditional_state(p, 1.0, coords);
        const double chain = gaussian_fidelity_equal_cov(e.gamma_E_prime, e.d_E_prime, -e.d_E_prime);
        chain_res = std::max(chain_res, std::abs(chain - eve_fidelity(s, 1.0, coords)));
        const Matrix sigma = symplectic_form(2);
        const Matrix lhs = s.cov() - p.F * p.gamma_E.ldlt().solve(p.F.transpose());
        const Matrix rhs = sigma * s.cov().ldlt().solve(sigma.transpose());
        purif_res = std::max(purif_res, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    report.checks.push_back(finish("eve_fidelity_chain", chain_res, 1e-9, opts.chain_states));
    report.checks.push_back(finish("purification_identity", purif_res, 1e-9, opts.chain_states));
    return report;
}

std::string certification_to_json(const CertificationReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"residual", c.residual},
                          {"tolerance", c.tolerance},
                          {"instances", c.instances},
                          {"pass", c.pass}});
    }
    return nlohmann::json{{"all_pass", r.all_pass()}, {"checks", checks}}.dump(2);
}

}  // namespace cvprivacy
