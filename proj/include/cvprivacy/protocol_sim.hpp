#pragma once

#include "cvprivacy/gaussian_state.hpp"
#include "cvprivacy/rng.hpp"
#include "cvprivacy/security.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace cvprivacy {

/// How post-selected pairs are produced.
///
/// Rejection draws (X_A, X_B) from the full Gaussian and keeps the pairs that
/// land in the window; n_samples counts raw draws. Window proposes uniformly
/// inside the four accepted boxes and accepts with probability
/// phi(x) / phi_max(box), which yields the same conditional law; n_samples
/// counts proposals.
enum class Sampler { Rejection, Window };

std::string_view to_string(Sampler s);

struct ProtocolConfig {
    double X0 = 1.0;
    double delta = 0.01;  // accept | |X_i| - X0 | <= delta on both sides
    int N = 1;
    std::int64_t n_samples = 1'000'000;
    std::uint64_t seed = kDefaultSeed;
    Sampler sampler = Sampler::Rejection;

    /// Throws InvalidArgument unless 0 < delta < X0, N >= 1, n_samples >= 1000.
    void validate() const;
};

/// A proportion with a standard error. The error uses the Laplace-smoothed
/// rate (k + 1)/(n + 2), so it is positive even for k = 0 or k = n.
struct Proportion {
    std::int64_t successes = 0;
    std::int64_t trials = 0;
    double value = 0.0;
    double std_error = 0.0;
};

Proportion make_proportion(std::int64_t successes, std::int64_t trials);

struct PostselectedBits {
    std::vector<std::uint8_t> alice;
    std::vector<std::uint8_t> bob;
    std::int64_t draws = 0;  // raw draws or proposals consumed
    Proportion eps_B;        // discordant fraction among accepted pairs
};

/// Step 2 of the protocol: sample, post-select on the window, binarize
/// (X near +X0 -> 0, near -X0 -> 1). Deterministic in cfg.seed regardless
/// of thread count. Throws NoAcceptedSamples if nothing passes.
PostselectedBits sample_postselected_bits(const GaussianState& s, const ProtocolConfig& cfg,
                                          MeasuredCoords coords);
PostselectedBits sample_postselected_bits(const GaussianState& s, const ProtocolConfig& cfg);

struct AdvantageResult {
    std::vector<std::uint8_t> alice;  // one bit per accepted block
    std::vector<std::uint8_t> bob;
    std::int64_t blocks = 0;
    std::int64_t accepted = 0;
    Proportion eps_BN;   // errors among accepted blocks
    double yield = 0.0;  // accepted / blocks
};

/// Step 3 (Maurer): random blocks of N positions, Alice announces
/// c_i = A_i xor c for a fresh random bit c, Bob accepts iff every
/// B_i xor c_i agrees. Positions left over after the last full block are
/// discarded.
AdvantageResult advantage_distillation(const std::vector<std::uint8_t>& alice,
                                       const std::vector<std::uint8_t>& bob, int N, CounterRng& rng);

/// eps^N / (eps^N + (1 - eps)^N): error after AD on i.i.d. pairs.
double distilled_error(double eps, int N);

struct NPoint {
    int N = 1;
    double log_odds = 0.0;  // estimate of log(eps_BN / (1 - eps_BN))
    double std_error = 0.0;
    std::int64_t blocks = 0;
    std::int64_t error_blocks = 0;  // raw count of accepted erroneous blocks
    std::int64_t accepted_blocks = 0;
};

enum class SlopeMethod {
    Direct,    // run AD on rejection-sampled bits, count errors
    Weighted,  // window proposals, blocks weighted by their density
};

std::string_view to_string(SlopeMethod m);

struct SlopeFit {
    SlopeMethod method = SlopeMethod::Weighted;
    std::vector<NPoint> points;
    double slope = 0.0;
    double slope_std_error = 0.0;
    double ci_low = 0.0;   // 95%
    double ci_high = 0.0;
    double intercept = 0.0;
    double expected_slope = 0.0;  // eps ratio exponent * X0^2 (window limit)
};

/// Weighted least-squares fit of log(eps_BN / (1 - eps_BN)) against N.
/// For i.i.d. pairs this is exactly N log(eps_B / (1 - eps_B)), so the slope
/// estimates the per-symbol log ratio. Throws InsufficientStatistics if any
/// N has fewer than 100 erroneous accepted blocks.
SlopeFit slope_check(const GaussianState& s, const ProtocolConfig& cfg,
                     const std::vector<int>& N_range, MeasuredCoords coords,
                     SlopeMethod method = SlopeMethod::Weighted);

inline constexpr std::int64_t kMinErrorBlocks = 100;

struct SimulationResult {
    ProtocolConfig config;
    MeasuredCoords coords;
    std::int64_t accepted_pairs = 0;
    Proportion eps_B;
    double eps_B_analytic = 0.0;  // window-free limit
    std::vector<AdvantageResult> ad;  // bits dropped, one entry per N in ad_N
    std::vector<int> ad_N;
};

/// Sampling, then AD for each N in N_range.
SimulationResult simulate(const GaussianState& s, const ProtocolConfig& cfg,
                          const std::vector<int>& N_range, MeasuredCoords coords);

}  // namespace cvprivacy
