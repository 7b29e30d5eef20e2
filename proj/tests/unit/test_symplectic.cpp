#include "cvprivacy/errors.hpp"
#include "cvprivacy/gaussian_state.hpp"
#include "cvprivacy/random_states.hpp"
#include "cvprivacy/symplectic.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <complex>

using namespace cvprivacy;
using Catch::Matchers::WithinAbs;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix symmetric_ref() { return symmetric_state_cov({2.0, 1.2, 1.2}); }

}  // namespace

TEST_CASE("symplectic form is the direct sum of 2x2 blocks") {
    Matrix s1(2, 2);
    s1 << 0, 1, -1, 0;
    CHECK(symplectic_form(1) == s1);

    const Matrix s2 = symplectic_form(2);
    CHECK(s2.topLeftCorner(2, 2) == s1);
    CHECK(s2.bottomRightCorner(2, 2) == s1);
    CHECK(s2.topRightCorner(2, 2).isZero(0));

    for (int n = 1; n <= 3; ++n) {
        const Matrix s = symplectic_form(n);
        CHECK((s + s.transpose()).isZero(0));
        CHECK((s * s + Matrix::Identity(2 * n, 2 * n)).isZero(0));
    }
    CHECK_THROWS_AS(symplectic_form(0), Error);
}

TEST_CASE("symplectic eigenvalues on known matrices") {
    CHECK_THAT(symplectic_eigenvalues(Matrix::Identity(2, 2)).at(0), WithinAbs(1.0, 1e-12));

    Matrix c(2, 2);
    c << 4, 0, 0, 1;
    CHECK_THAT(symplectic_eigenvalues(c).at(0), WithinAbs(2.0, 1e-12));

    // Symmetric family: invariants give nu^2 = (lambda - c)(lambda + c), double.
    const auto nu = symplectic_eigenvalues(symmetric_ref());
    REQUIRE(nu.size() == 2);
    const auto [lo, hi] = oracle::two_mode_symplectic(symmetric_ref());
    CHECK_THAT(nu[0], WithinAbs(hi, 1e-10));
    CHECK_THAT(nu[1], WithinAbs(lo, 1e-10));
    CHECK_THAT(nu[1], WithinAbs(std::sqrt(0.8 * 3.2), 1e-10));
}

TEST_CASE("symplectic eigenvalues reject non-positive-definite input") {
    Matrix c(2, 2);
    c << 1, 0, 0, -1;
    try {
        symplectic_eigenvalues(c);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    }
}

TEST_CASE("symplectic eigenvalues agree with independent routes on random states") {
    CounterRng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 3;
        const Matrix g = random_physical_state(n, rng).cov();
        const auto nu = symplectic_eigenvalues(g);
        const auto ref = oracle::symplectic_spectrum_real(g);
        REQUIRE(nu.size() == ref.size());
        for (std::size_t k = 0; k < nu.size(); ++k) {
            CHECK_THAT(nu[k], WithinAbs(ref[ref.size() - 1 - k], 1e-8 * (1 + nu[k])));
        }
        if (n == 2) {
            const auto [lo, hi] = oracle::two_mode_symplectic(g);
            CHECK_THAT(nu[0], WithinAbs(hi, 1e-8 * hi));
            CHECK_THAT(nu[1], WithinAbs(lo, 1e-8 * hi));
        }
        // spectrum of i sigma C is {+-nu_k}
        const Eigen::MatrixXcd isc = std::complex<double>(0, 1) * (symplectic_form(n) * g).cast<std::complex<double>>();
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(isc);
        std::vector<double> ev;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            CHECK(std::abs(es.eigenvalues()(i).imag()) < 1e-8);
            ev.push_back(std::abs(es.eigenvalues()(i).real()));
        }
        std::sort(ev.rbegin(), ev.rend());
        for (std::size_t k = 0; k < nu.size(); ++k) CHECK_THAT(ev[2 * k], WithinAbs(nu[k], 1e-8 * (1 + nu[k])));
    }
}

TEST_CASE("williamson decomposition invariants") {
    SECTION("identity") {
        const auto w = williamson(Matrix::Identity(4, 4));
        CHECK(max_abs(w.S * w.S.transpose() - Matrix::Identity(4, 4)) < 1e-9);
        for (double l : w.spectrum) CHECK_THAT(l, WithinAbs(1.0, 1e-12));
    }
    SECTION("diag(4, 1)") {
        Matrix c(2, 2);
        c << 4, 0, 0, 1;
        const auto w = williamson(c);
        CHECK(is_symplectic(w.S));
        CHECK(max_abs(w.S * c * w.S.transpose() - 2.0 * Matrix::Identity(2, 2)) < 1e-9);
        // the textbook witness also satisfies both invariants
        Matrix s(2, 2);
        s << 1 / std::sqrt(2.0), 0, 0, std::sqrt(2.0);
        CHECK(is_symplectic(s));
        CHECK(max_abs(s * c * s.transpose() - 2.0 * Matrix::Identity(2, 2)) < 1e-12);
    }
    SECTION("random states, including round trip") {
        CounterRng rng(12);
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 1 + trial % 4;
            const Matrix g = random_physical_state(n, rng).cov();
            const auto w = williamson(g);
            CHECK(is_symplectic(w.S));
            Matrix d = Matrix::Zero(2 * n, 2 * n);
            for (int k = 0; k < n; ++k) d(2 * k, 2 * k) = d(2 * k + 1, 2 * k + 1) = w.spectrum[k];
            const Matrix scale = Matrix::Identity(2 * n, 2 * n) * (1.0 + max_abs(g));
            CHECK(max_abs(w.S * g * w.S.transpose() - d) < 1e-9 * scale(0, 0));
            const Matrix sinv = w.S.inverse();
            CHECK(max_abs(sinv * d * sinv.transpose() - g) < 1e-9 * scale(0, 0));
            const auto nu = symplectic_eigenvalues(g);
            for (int k = 0; k < n; ++k) CHECK_THAT(w.spectrum[k], WithinAbs(nu[k], 1e-9 * (1 + nu[k])));
            for (int k = 1; k < n; ++k) CHECK(w.spectrum[k] <= w.spectrum[k - 1]);
        }
    }
}

TEST_CASE("block inverse matches the dense inverse") {
    SECTION("identity blocks") {
        const auto bi = block_inverse(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Zero(2, 2));
        CHECK(max_abs(bi.assemble() - Matrix::Identity(4, 4)) < 1e-15);
    }
    SECTION("symmetric reference state") {
        const Matrix g = symmetric_ref();
        const auto bi = block_inverse(g.topLeftCorner(2, 2), g.bottomRightCorner(2, 2), g.topRightCorner(2, 2));
        CHECK(max_abs(bi.assemble() - g.inverse()) < 1e-9);
    }
    SECTION("1000 random well-conditioned instances") {
        CounterRng rng(13);
        int checked = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const int na = 1 + trial % 3, nb = 1 + (trial / 3) % 3;
            Matrix m(na + nb, na + nb);
            for (int i = 0; i < m.rows(); ++i)
                for (int j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
            if (trial % 2 == 0) m = m * m.transpose() + Matrix::Identity(m.rows(), m.cols());
            else m = 0.5 * (m + m.transpose().eval());
            const Eigen::JacobiSVD<Matrix> svd(m);
            const double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
            if (cond > 1e6) continue;
            try {
                const auto bi = block_inverse(m.topLeftCorner(na, na), m.bottomRightCorner(nb, nb),
                                              m.topRightCorner(na, nb));
                CHECK(max_abs(bi.assemble() - m.inverse()) < 1e-9 * cond * (1 + max_abs(m.inverse())));
                ++checked;
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::SingularBlock);
            }
        }
        CHECK(checked > 900);
    }
    SECTION("singular block") {
        CHECK_THROWS_AS(block_inverse(Matrix::Zero(2, 2), Matrix::Identity(2, 2), Matrix::Zero(2, 2)), Error);
    }
}

TEST_CASE("pseudo inverse") {
    Matrix p(2, 2);
    p << 1, 0, 0, 0;
    CHECK(max_abs(pseudo_inverse(p) - p) < 1e-15);
    Matrix q(2, 2);
    q << 2, 0, 0, 0;
    Matrix q_inv(2, 2);
    q_inv << 0.5, 0, 0, 0;
    CHECK(max_abs(pseudo_inverse(q) - q_inv) < 1e-15);

    CounterRng rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix a = random_physical_state(1, rng).cov();
        Matrix x = Matrix::Zero(2, 2);
        x(0, 0) = 1;
        const Matrix m = x * a * x;
        const Matrix mp = pseudo_inverse(m);
        CHECK(max_abs(m * mp * m - m) < 1e-9);
        CHECK(max_abs(mp * m * mp - mp) < 1e-9);
        CHECK_THAT(mp(0, 0), WithinAbs(1.0 / a(0, 0), 1e-12));
    }
}

TEST_CASE("square root of a matrix similar to a PSD matrix") {
    CHECK(max_abs(psd_sqrt_of_similar(Matrix::Zero(4, 4))) == 0.0);
    const Matrix three = 3.0 * Matrix::Identity(2, 2);
    CHECK(max_abs(psd_sqrt_of_similar(three) - std::sqrt(3.0) * Matrix::Identity(2, 2)) < 1e-14);

    const Matrix g = symmetric_ref();
    const Matrix sg = symplectic_form(2) * g;
    const Matrix m = -sg * sg - Matrix::Identity(4, 4);
    for (const Matrix& r : {psd_sqrt_of_similar(m), psd_sqrt_of_similar(m, spd_sqrt(g))}) {
        CHECK(max_abs(r * r - m) < 1e-9);
        // idempotence of the contract: feeding R^2 back reproduces a root of M
        const Matrix r2 = psd_sqrt_of_similar(r * r);
        CHECK(max_abs(r2 * r2 - m) < 1e-9);
    }

    Matrix rot(2, 2);
    rot << 0, -1, 1, 0;  // spectrum +-i
    try {
        psd_sqrt_of_similar(rot);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ComplexSpectrum);
    }
    try {
        psd_sqrt_of_similar(-Matrix::Identity(2, 2));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NegativeSpectrum);
    }
}

TEST_CASE("symplectic completion") {
    CounterRng rng(15);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 3;
        Vector row(2 * n);
        for (int k = 0; k < 2 * n; ++k) row(k) = rng.normal();
        const Matrix s = symplectic_completion(row);
        CHECK(is_symplectic(s, 1e-9 * (1 + row.squaredNorm())));
        CHECK(max_abs(s.row(0).transpose() - row) < 1e-14);
    }
    CHECK_THROWS_AS(symplectic_completion(Vector::Zero(2)), Error);
    CHECK_FALSE(is_symplectic(2.0 * Matrix::Identity(2, 2)));
}
