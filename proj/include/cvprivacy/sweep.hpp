#pragma once

#include <string>
#include <vector>

namespace cvprivacy {

struct GridRange {
    double min = 0.0;
    double max = 1.0;
    int steps = 2;  // number of points, endpoints included

    double at(int i) const { return min + (max - min) * i / (steps - 1); }
    double spacing() const { return (max - min) / (steps - 1); }
};

/// Grid over the symmetric family A = B = lambda I, C = diag(c, -c).
struct SweepSpec {
    GridRange lambda{1.0, 3.0, 200};
    GridRange c{0.0, 3.0, 200};
    double x0 = 1.0;

    /// Throws InvalidArgument unless steps >= 2, min <= max and both
    /// ranges are non-negative.
    void validate() const;
};

/// Parses "min:max:steps".
GridRange parse_grid_range(const std::string& text);

struct SweepCell {
    double lambda = 0.0;
    double c = 0.0;
    bool physical = false;
    bool nppt = false;
    bool individual = false;
    bool collective = false;
};

/// Row-major (lambda outer, c inner) classification. Cells are evaluated in
/// parallel; the order of the result is fixed.
std::vector<SweepCell> sweep(const SweepSpec& spec);

/// "lambda,c,physical,nppt,individual,collective" with 0/1 booleans.
std::string sweep_csv(const std::vector<SweepCell>& cells);

/// c/(lambda - c) - (lambda^2 - c^2 - 1): zero on the collective boundary.
double collective_boundary_residual(double lambda, double c);

struct Boundary {
    double c = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Root of collective_boundary_residual in (lambda - 1, sqrt(lambda^2 - 1))
/// by bisection; requires lambda > 1.
Boundary collective_boundary(double lambda);

/// Same boundary located by bisecting the collective_condition verdict on
/// actual states instead of the reduced formula.
Boundary collective_boundary_by_verdict(double lambda);

}  // namespace cvprivacy
