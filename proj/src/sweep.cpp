#include "cvprivacy/sweep.hpp"

#include "cvprivacy/errors.hpp"
#include "cvprivacy/parallel.hpp"
#include "cvprivacy/security.hpp"

#include <cmath>
#include <sstream>

namespace cvprivacy {

namespace {

void validate_range(const GridRange& r) {
    if (r.steps < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 steps");
    if (!(r.min <= r.max) || r.min < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "grid range must be non-negative with min <= max");
    }
}

}  // namespace

void SweepSpec::validate() const {
    validate_range(lambda);
    validate_range(c);
    if (!(x0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "X0 must be positive");
}

GridRange parse_grid_range(const std::string& text) {
    std::istringstream in(text);
    GridRange r;
    char c1 = 0, c2 = 0;
    if (!(in >> r.min >> c1 >> r.max >> c2 >> r.steps) || c1 != ':' || c2 != ':' || !in.eof()) {
        throw Error(ErrorCode::InvalidArgument, "expected min:max:steps, got '" + text + "'");
    }
    validate_range(r);
    return r;
}

std::vector<SweepCell> sweep(const SweepSpec& spec) {
    spec.validate();
    const auto nl = static_cast<std::size_t>(spec.lambda.steps);
    const auto nc = static_cast<std::size_t>(spec.c.steps);
    std::vector<SweepCell> cells(nl * nc);
    const BipartiteSplit split{1, 1};
    parallel_for(nl, [&](std::size_t i) {
        for (std::size_t k = 0; k < nc; ++k) {
            SweepCell& cell = cells[i * nc + k];
            cell.lambda = spec.lambda.at(static_cast<int>(i));
            cell.c = spec.c.at(static_cast<int>(k));
            const SymmetricStateParams p{cell.lambda, cell.c, cell.c};
            const GaussianState s(symmetric_state_cov(p));
            cell.physical = is_physical(s);
            if (!cell.physical) continue;
            const SecurityReport r = analyze(s, split, default_coords(split), spec.x0);
            cell.nppt = !r.ppt;
            cell.individual = r.individual_secure;
            cell.collective = r.collective_secure;
        }
    });
    return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
    std::ostringstream out;
    out.precision(10);
    out << "lambda,c,physical,nppt,individual,collective\n";
    for (const SweepCell& c : cells) {
        out << c.lambda << ',' << c.c << ',' << c.physical << ',' << c.nppt << ',' << c.individual << ','
            << c.collective << '\n';
    }
    return out.str();
}

double collective_boundary_residual(double lambda, double c) {
    return c / (lambda - c) - (lambda * lambda - c * c - 1.0);
}

namespace {

void require_entangling_lambda(double lambda) {
    if (!(lambda > 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must exceed 1");
}

}  // namespace

Boundary collective_boundary(double lambda) {
    require_entangling_lambda(lambda);
    double lo = lambda - 1.0;
    double hi = std::sqrt(lambda * lambda - 1.0);
    Boundary b;
    while (hi - lo > 1e-15 * hi && b.iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        (collective_boundary_residual(lambda, mid) < 0.0 ? lo : hi) = mid;
        ++b.iterations;
    }
    b.c = 0.5 * (lo + hi);
    b.residual = collective_boundary_residual(lambda, b.c);
    return b;
}

Boundary collective_boundary_by_verdict(double lambda) {
    require_entangling_lambda(lambda);
    const BipartiteSplit split{1, 1};
    auto secure = [&](double c) {
        return collective_condition(GaussianState(symmetric_state_cov({lambda, c, c})), default_coords(split));
    };
    double lo = lambda - 1.0;
    double hi = std::sqrt(lambda * lambda - 1.0) * (1.0 - 1e-12);
    Boundary b;
    while (hi - lo > 1e-12 * hi && b.iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        (secure(mid) ? hi : lo) = mid;
        ++b.iterations;
    }
    b.c = 0.5 * (lo + hi);
    b.residual = collective_boundary_residual(lambda, b.c);
    return b;
}

}  // namespace cvprivacy
