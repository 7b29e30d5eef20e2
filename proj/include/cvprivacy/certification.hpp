#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cvprivacy {

struct CertificationOptions {
    int fidelity_states = 20;      // random single-mode CMs with |d| <= 1
    int cutoff = 40;
    int cutoff_check = 60;         // rerun for the convergence check
    int chain_states = 500;        // random two-mode states
    std::uint64_t seed = 20050101;
};

struct CertificationCheck {
    std::string name;
    double residual = 0.0;  // worst case over the check's instances
    double tolerance = 0.0;
    int instances = 0;
    bool pass = false;
};

struct CertificationReport {
    std::vector<CertificationCheck> checks;
    bool all_pass() const;
};

/// Cross-checks the Gaussian closed forms against the Fock oracle and the
/// purification route.
CertificationReport run_certification(const CertificationOptions& opts = {});

std::string certification_to_json(const CertificationReport& r);

}  // namespace cvprivacy
