#include "cvprivacy/protocol_sim.hpp"

#include "cvprivacy/errors.hpp"
#include "cvprivacy/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace cvprivacy {

namespace {

constexpr std::int64_t kChunk = 1 << 20;
// Stream ids: sampling chunks use [0, 2^32); AD for block length N uses
// kAdStream + N.
constexpr std::uint64_t kAdStream = std::uint64_t{1} << 40;

struct XModel {
    Eigen::Vector2d mean;
    Eigen::Matrix2d precision;  // gamma_x^{-1}: density is exp(-(x-m)^T P (x-m))
    Eigen::Matrix2d factor;     // L with L L^T = gamma_x / 2
};

XModel x_model(const GaussianState& s, MeasuredCoords coords) {
    XModel m;
    m.mean << s.disp()(coords.alice), s.disp()(coords.bob);
    Eigen::Matrix2d gx;
    gx << s.cov()(coords.alice, coords.alice), s.cov()(coords.alice, coords.bob),
        s.cov()(coords.bob, coords.alice), s.cov()(coords.bob, coords.bob);
    Eigen::LLT<Eigen::Matrix2d> llt(0.5 * gx);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::NotPositiveDefinite, "gamma_x is not positive definite");
    }
    m.factor = llt.matrixL();
    m.precision = gx.inverse();
    return m;
}

double quad_form(const Eigen::Matrix2d& p, const Eigen::Vector2d& v) { return v.dot(p * v); }

// Window boxes centred at (sa X0, sb X0); box index bit 0 is Alice's sign,
// bit 1 Bob's, with a set bit meaning the negative side.
Eigen::Vector2d box_centre(int box, double X0) {
    return {(box & 1) ? -X0 : X0, (box & 2) ? -X0 : X0};
}

double log_box_bound(const XModel& m, int box, double X0, double delta) {
    const Eigen::Vector2d c = box_centre(box, X0) - m.mean;
    const Eigen::Vector2d g = m.precision * c;
    return -quad_form(m.precision, c) + 2.0 * delta * g.cwiseAbs().sum();
}

struct Chunk {
    std::vector<std::uint8_t> alice;
    std::vector<std::uint8_t> bob;
    std::vector<double> log_weight;  // Weighted proposals only
};

std::int64_t chunk_count(std::int64_t n) { return (n + kChunk - 1) / kChunk; }

std::int64_t chunk_size(std::int64_t n, std::int64_t k) { return std::min(kChunk, n - k * kChunk); }

void rejection_chunk(const XModel& m, const ProtocolConfig& cfg, std::int64_t k, Chunk& out) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(k));
    const std::int64_t n = chunk_size(cfg.n_samples, k);
    for (std::int64_t i = 0; i < n; ++i) {
        const Eigen::Vector2d z(rng.normal(), rng.normal());
        const Eigen::Vector2d x = m.mean + m.factor * z;
        if (std::abs(std::abs(x(0)) - cfg.X0) <= cfg.delta &&
            std::abs(std::abs(x(1)) - cfg.X0) <= cfg.delta) {
            out.alice.push_back(x(0) < 0.0 ? 1 : 0);
            out.bob.push_back(x(1) < 0.0 ? 1 : 0);
        }
    }
}

// Uniform proposal over the four boxes. With `accept` the draw is kept with
// probability phi / phi_bound; otherwise every proposal is kept with its
// log density as weight.
void window_chunk(const XModel& m, const ProtocolConfig& cfg, std::int64_t k, bool accept,
                  Chunk& out) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(k));
    double log_bound = -1e300;
    for (int b = 0; b < 4; ++b) log_bound = std::max(log_bound, log_box_bound(m, b, cfg.X0, cfg.delta));
    const std::int64_t n = chunk_size(cfg.n_samples, k);
    for (std::int64_t i = 0; i < n; ++i) {
        const int box = static_cast<int>(rng() >> 62);
        const Eigen::Vector2d h(cfg.delta * (2.0 * rng.uniform() - 1.0),
                                cfg.delta * (2.0 * rng.uniform() - 1.0));
        const Eigen::Vector2d x = box_centre(box, cfg.X0) + h;
        const double log_phi = -quad_form(m.precision, x - m.mean);
        if (accept) {
            if (rng.uniform() >= std::exp(log_phi - log_bound)) continue;
        } else {
            out.log_weight.push_back(log_phi);
        }
        out.alice.push_back(static_cast<std::uint8_t>(box & 1));
        out.bob.push_back(static_cast<std::uint8_t>((box >> 1) & 1));
    }
}

Chunk merge(std::vector<Chunk>& chunks) {
    Chunk all;
    std::size_t total = 0;
    for (const auto& c : chunks) total += c.alice.size();
    all.alice.reserve(total);
    all.bob.reserve(total);
    for (auto& c : chunks) {
        all.alice.insert(all.alice.end(), c.alice.begin(), c.alice.end());
        all.bob.insert(all.bob.end(), c.bob.begin(), c.bob.end());
        all.log_weight.insert(all.log_weight.end(), c.log_weight.begin(), c.log_weight.end());
        c = Chunk{};
    }
    return all;
}

enum class Mode { Rejection, WindowAccept, WindowWeighted };

Chunk draw(const GaussianState& s, const ProtocolConfig& cfg, MeasuredCoords coords, Mode mode) {
    const XModel m = x_model(s, coords);
    const std::int64_t nchunks = chunk_count(cfg.n_samples);
    std::vector<Chunk> chunks(static_cast<std::size_t>(nchunks));
    parallel_for(chunks.size(), [&](std::size_t k) {
        const auto kk = static_cast<std::int64_t>(k);
        if (mode == Mode::Rejection) {
            rejection_chunk(m, cfg, kk, chunks[k]);
        } else {
            window_chunk(m, cfg, kk, mode == Mode::WindowAccept, chunks[k]);
        }
    });
    return merge(chunks);
}

// Positions of each N-block after a uniformly random permutation; the
// block j covers perm[j N .. j N + N).
std::vector<std::uint32_t> block_permutation(std::size_t n, CounterRng& rng) {
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

struct BlockOutcome {
    bool accepted;
    std::uint8_t alice_bit;
    std::uint8_t bob_bit;
};

BlockOutcome run_block(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                       const std::uint32_t* idx, int N, CounterRng& rng) {
    const std::uint8_t c = rng.bit() ? 1 : 0;
    std::uint8_t first = 0;
    for (int i = 0; i < N; ++i) {
        const std::uint8_t ci = a[idx[i]] ^ c;      // announced by Alice
        const std::uint8_t bob_view = b[idx[i]] ^ ci;
        if (i == 0) {
            first = bob_view;
        } else if (bob_view != first) {
            return {false, c, first};
        }
    }
    return {true, c, first};
}

void require_range(const std::vector<int>& N_range) {
    if (N_range.empty()) throw Error(ErrorCode::InvalidArgument, "empty block-length range");
    for (int N : N_range) {
        if (N < 1) throw Error(ErrorCode::InvalidArgument, "block lengths must be at least 1");
    }
}

}  // namespace

std::string_view to_string(Sampler s) {
    return s == Sampler::Rejection ? "rejection" : "window";
}

std::string_view to_string(SlopeMethod m) {
    return m == SlopeMethod::Direct ? "direct" : "weighted";
}

void ProtocolConfig::validate() const {
    if (!(X0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "X0 must be positive");
    if (!(delta > 0.0) || !(delta < X0)) {
        throw Error(ErrorCode::InvalidArgument, "delta must satisfy 0 < delta < X0");
    }
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be at least 1");
    if (n_samples < 1000) throw Error(ErrorCode::InvalidArgument, "n_samples must be at least 1000");
    if (n_samples / kChunk >= (std::int64_t{1} << 32)) {
        throw Error(ErrorCode::InvalidArgument, "n_samples too large");
    }
}

Proportion make_proportion(std::int64_t successes, std::int64_t trials) {
    Proportion p;
    p.successes = successes;
    p.trials = trials;
    if (trials <= 0) return p;
    p.value = static_cast<double>(successes) / static_cast<double>(trials);
    const double smoothed = (static_cast<double>(successes) + 1.0) / (static_cast<double>(trials) + 2.0);
    p.std_error = std::sqrt(smoothed * (1.0 - smoothed) / static_cast<double>(trials));
    return p;
}

PostselectedBits sample_postselected_bits(const GaussianState& s, const ProtocolConfig& cfg,
                                          MeasuredCoords coords) {
    cfg.validate();
    require_physical(s);
    Chunk all = draw(s, cfg, coords,
                     cfg.sampler == Sampler::Rejection ? Mode::Rejection : Mode::WindowAccept);
    if (all.alice.empty()) {
        throw Error(ErrorCode::NoAcceptedSamples,
                    "no pair passed the window after " + std::to_string(cfg.n_samples) + " draws");
    }
    std::int64_t discordant = 0;
    for (std::size_t i = 0; i < all.alice.size(); ++i) discordant += all.alice[i] != all.bob[i];
    PostselectedBits out;
    out.draws = cfg.n_samples;
    out.eps_B = make_proportion(discordant, static_cast<std::int64_t>(all.alice.size()));
    out.alice = std::move(all.alice);
    out.bob = std::move(all.bob);
    return out;
}

PostselectedBits sample_postselected_bits(const GaussianState& s, const ProtocolConfig& cfg) {
    return sample_postselected_bits(s, cfg, MeasuredCoords{0, 2});
}

AdvantageResult advantage_distillation(const std::vector<std::uint8_t>& alice,
                                       const std::vector<std::uint8_t>& bob, int N, CounterRng& rng) {
    if (alice.size() != bob.size()) {
        throw Error(ErrorCode::DimensionMismatch, "bit streams differ in length");
    }
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be at least 1");
    if (alice.size() < static_cast<std::size_t>(N)) {
        throw Error(ErrorCode::InvalidArgument, "fewer bits than one block");
    }
    const std::vector<std::uint32_t> perm = block_permutation(alice.size(), rng);
    AdvantageResult r;
    r.blocks = static_cast<std::int64_t>(alice.size() / N);
    std::int64_t errors = 0;
    for (std::int64_t j = 0; j < r.blocks; ++j) {
        const BlockOutcome o = run_block(alice, bob, perm.data() + j * N, N, rng);
        if (!o.accepted) continue;
        r.alice.push_back(o.alice_bit);
        r.bob.push_back(o.bob_bit);
        errors += o.alice_bit != o.bob_bit;
    }
    r.accepted = static_cast<std::int64_t>(r.alice.size());
    r.eps_BN = make_proportion(errors, r.accepted);
    r.yield = static_cast<double>(r.accepted) / static_cast<double>(r.blocks);
    return r;
}

double distilled_error(double eps, int N) {
    if (eps <= 0.0) return 0.0;
    if (eps >= 1.0) return 1.0;
    // log-odds scale linearly in N
    const double lo = N * (std::log(eps) - std::log1p(-eps));
    return 1.0 / (1.0 + std::exp(-lo));
}

namespace {

NPoint direct_point(const PostselectedBits& bits, int N, std::uint64_t seed) {
    NPoint p;
    p.N = N;
    if (bits.alice.size() < static_cast<std::size_t>(N)) return p;  // not a single block
    CounterRng rng(seed, kAdStream + static_cast<std::uint64_t>(N));
    const AdvantageResult ad = advantage_distillation(bits.alice, bits.bob, N, rng);
    p.blocks = ad.blocks;
    p.accepted_blocks = ad.accepted;
    p.error_blocks = ad.eps_BN.successes;
    const double k_err = static_cast<double>(p.error_blocks);
    const double k_ok = static_cast<double>(ad.accepted - p.error_blocks);
    if (p.error_blocks > 0 && k_ok > 0.0) {
        p.log_odds = std::log(k_err / k_ok);
        p.std_error = std::sqrt(1.0 / k_err + 1.0 / k_ok);
    }
    return p;
}

// Self-normalized importance estimate over uniform window proposals: each
// accepted block carries the product of its members' densities.
NPoint weighted_point(const Chunk& pool, int N, std::uint64_t seed) {
    CounterRng rng(seed, kAdStream + static_cast<std::uint64_t>(N));
    const std::vector<std::uint32_t> perm = block_permutation(pool.alice.size(), rng);
    NPoint p;
    p.N = N;
    p.blocks = static_cast<std::int64_t>(pool.alice.size() / N);

    struct Acc {
        std::vector<double> log_w;
        double max_log_w = -1e300;
    };
    Acc err, ok;
    for (std::int64_t j = 0; j < p.blocks; ++j) {
        const std::uint32_t* idx = perm.data() + j * N;
        const BlockOutcome o = run_block(pool.alice, pool.bob, idx, N, rng);
        if (!o.accepted) continue;
        double lw = 0.0;
        for (int i = 0; i < N; ++i) lw += pool.log_weight[idx[i]];
        Acc& acc = (o.alice_bit != o.bob_bit) ? err : ok;
        acc.log_w.push_back(lw);
        acc.max_log_w = std::max(acc.max_log_w, lw);
    }
    p.error_blocks = static_cast<std::int64_t>(err.log_w.size());
    p.accepted_blocks = p.error_blocks + static_cast<std::int64_t>(ok.log_w.size());
    if (err.log_w.empty() || ok.log_w.empty()) return p;

    // Sums scaled by exp(-max) to stay in range; the ratio is unaffected.
    auto scaled_sum = [](const Acc& a, double& sum, double& sum_sq) {
        sum = sum_sq = 0.0;
        for (double lw : a.log_w) {
            const double w = std::exp(lw - a.max_log_w);
            sum += w;
            sum_sq += w * w;
        }
    };
    double s_err, s2_err, s_ok, s2_ok;
    scaled_sum(err, s_err, s2_err);
    scaled_sum(ok, s_ok, s2_ok);
    p.log_odds = (std::log(s_err) + err.max_log_w) - (std::log(s_ok) + ok.max_log_w);
    // Delta method for log(sum_err) - log(sum_ok) over independent blocks;
    // the two sums come from disjoint blocks.
    p.std_error = std::sqrt(s2_err / (s_err * s_err) + s2_ok / (s_ok * s_ok));
    return p;
}

}  // namespace

SlopeFit slope_check(const GaussianState& s, const ProtocolConfig& cfg, const std::vector<int>& N_range,
                     MeasuredCoords coords, SlopeMethod method) {
    cfg.validate();
    require_physical(s);
    require_range(N_range);

    SlopeFit fit;
    fit.method = method;
    fit.expected_slope = eps_ratio_exponent(s, coords) * cfg.X0 * cfg.X0;
    fit.points.resize(N_range.size());

    if (method == SlopeMethod::Direct) {
        ProtocolConfig c = cfg;
        c.sampler = Sampler::Rejection;
        const PostselectedBits bits = sample_postselected_bits(s, c, coords);
        parallel_for(N_range.size(), [&](std::size_t i) {
            fit.points[i] = direct_point(bits, N_range[i], cfg.seed);
        });
    } else {
        const Chunk pool = draw(s, cfg, coords, Mode::WindowWeighted);
        parallel_for(N_range.size(), [&](std::size_t i) {
            fit.points[i] = weighted_point(pool, N_range[i], cfg.seed);
        });
    }

    for (const NPoint& p : fit.points) {
        if (p.error_blocks < kMinErrorBlocks || p.std_error <= 0.0) {
            throw Error(ErrorCode::InsufficientStatistics,
                        "N = " + std::to_string(p.N) + " has " + std::to_string(p.error_blocks) +
                            " erroneous blocks, need " + std::to_string(kMinErrorBlocks));
        }
    }

    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (const NPoint& p : fit.points) {
        const double w = 1.0 / (p.std_error * p.std_error);
        sw += w;
        swx += w * p.N;
        swy += w * p.log_odds;
        swxx += w * p.N * p.N;
        swxy += w * p.N * p.log_odds;
    }
    if (fit.points.size() == 1) {
        // A single point fixes the slope through the origin.
        const NPoint& p = fit.points.front();
        fit.slope = p.log_odds / p.N;
        fit.slope_std_error = p.std_error / p.N;
    } else {
        const double det = sw * swxx - swx * swx;
        if (!(det > 0.0)) {
            throw Error(ErrorCode::InsufficientStatistics, "block lengths must take two distinct values");
        }
        fit.slope = (sw * swxy - swx * swy) / det;
        fit.intercept = (swxx * swy - swx * swxy) / det;
        fit.slope_std_error = std::sqrt(sw / det);
    }
    fit.ci_low = fit.slope - 1.96 * fit.slope_std_error;
    fit.ci_high = fit.slope + 1.96 * fit.slope_std_error;
    return fit;
}

SimulationResult simulate(const GaussianState& s, const ProtocolConfig& cfg, const std::vector<int>& N_range,
                          MeasuredCoords coords) {
    require_range(N_range);
    PostselectedBits bits = sample_postselected_bits(s, cfg, coords);
    SimulationResult r;
    r.config = cfg;
    r.coords = coords;
    r.accepted_pairs = static_cast<std::int64_t>(bits.alice.size());
    r.eps_B = bits.eps_B;
    const double ratio = eps_ratio(s, cfg.X0, coords);
    r.eps_B_analytic = ratio / (1.0 + ratio);
    r.ad_N = N_range;
    r.ad.resize(N_range.size());
    parallel_for(N_range.size(), [&](std::size_t i) {
        const int N = N_range[i];
        if (bits.alice.size() < static_cast<std::size_t>(N)) return;
        CounterRng rng(cfg.seed, kAdStream + static_cast<std::uint64_t>(N));
        AdvantageResult ad = advantage_distillation(bits.alice, bits.bob, N, rng);
        ad.alice.clear();
        ad.alice.shrink_to_fit();
        ad.bob.clear();
        ad.bob.shrink_to_fit();
        r.ad[i] = std::move(ad);
    });
    return r;
}

}  // namespace cvprivacy
