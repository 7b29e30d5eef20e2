// cvprivacy: security reports, region sweeps, Monte Carlo runs and oracle
// certification for two-party Gaussian states.
//
// Exit codes: 0 success, 1 bad input (schema or arguments), 2 unphysical
// state, 3 insufficient Monte Carlo statistics, 4 failed certification.

#include "cvprivacy/certification.hpp"
#include "cvprivacy/errors.hpp"
#include "cvprivacy/json_io.hpp"
#include "cvprivacy/protocol_sim.hpp"
#include "cvprivacy/security.hpp"
#include "cvprivacy/sweep.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace cvprivacy;

namespace {

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::Unphysical:
        case ErrorCode::NotPositiveDefinite:
            return 2;
        case ErrorCode::InsufficientStatistics:
        case ErrorCode::NoAcceptedSamples:
            return 3;
        default:
            return 1;
    }
}

BipartiteSplit parse_split(const std::string& text) {
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos) throw std::invalid_argument(text);
        std::size_t used_a = 0, used_b = 0;
        const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
        BipartiteSplit s{std::stoi(a, &used_a), std::stoi(b, &used_b)};
        if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument(text);
        return s;
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidArgument, "--split expects nA,nB, got '" + text + "'");
    }
}

std::vector<int> parse_n_range(const std::string& text) {
    const auto colon = text.find(':');
    try {
        const int lo = std::stoi(text.substr(0, colon));
        const int hi = colon == std::string::npos ? lo : std::stoi(text.substr(colon + 1));
        if (lo < 1 || hi < lo) throw std::invalid_argument(text);
        std::vector<int> out;
        for (int n = lo; n <= hi; ++n) out.push_back(n);
        return out;
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidArgument, "--n-range expects lo:hi, got '" + text + "'");
    }
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("CVPRIVACY_SEED")) {
        try {
            std::size_t used = 0;
            const std::uint64_t v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::logic_error&) {
        }
        throw Error(ErrorCode::InvalidArgument, std::string("CVPRIVACY_SEED is not an integer: ") + env);
    }
    return kDefaultSeed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Security analysis of two-party Gaussian states"};
    app.require_subcommand(1);

    std::string state_file, split_text = "1,1", out_path, grid_text, n_range_text = "1:8";
    std::string sampler_text = "rejection", slope_text = "none", csv_path;
    double x0 = 1.0, delta = 0.01;
    int block_length = 1;
    std::int64_t samples = 1'000'000;
    std::optional<std::uint64_t> seed;
    CertificationOptions cert;

    auto* analyze_cmd = app.add_subcommand("analyze", "Security report for a state (JSON)");
    analyze_cmd->add_option("--state", state_file, "State JSON file")->required();
    analyze_cmd->add_option("--split", split_text, "Modes held by Alice and Bob, nA,nB");
    analyze_cmd->add_option("--x0", x0, "Post-selection value X0");
    analyze_cmd->add_option("--n", block_length, "AD block length for the rate estimate");
    analyze_cmd->add_option("--out", out_path, "Write the report here instead of stdout");

    auto* sweep_cmd = app.add_subcommand("sweep", "Classify the symmetric family on a grid (CSV)");
    sweep_cmd->add_option("--grid", grid_text, "lmin:lmax:steps,cmin:cmax:steps")
        ->default_val("1:3:200,0:3:200");
    sweep_cmd->add_option("--x0", x0, "Post-selection value X0");
    sweep_cmd->add_option("--out", out_path, "Write the CSV here instead of stdout");

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo run of the protocol (JSON)");
    sim_cmd->add_option("--state", state_file, "State JSON file")->required();
    sim_cmd->add_option("--split", split_text, "Modes held by Alice and Bob, nA,nB");
    sim_cmd->add_option("--x0", x0, "Post-selection value X0");
    sim_cmd->add_option("--delta", delta, "Window half-width");
    sim_cmd->add_option("--samples", samples, "Number of draws");
    sim_cmd->add_option("--seed", seed, "RNG seed (falls back to CVPRIVACY_SEED)");
    sim_cmd->add_option("--n-range", n_range_text, "AD block lengths lo:hi");
    sim_cmd->add_option("--sampler", sampler_text, "rejection or window")
        ->check(CLI::IsMember({"rejection", "window"}));
    sim_cmd->add_option("--slope", slope_text, "Also fit the AD slope: none, direct or weighted")
        ->check(CLI::IsMember({"none", "direct", "weighted"}));
    sim_cmd->add_option("--csv", csv_path, "Write N,eps_BN,se rows here");
    sim_cmd->add_option("--out", out_path, "Write the JSON here instead of stdout");

    auto* oracle_cmd = app.add_subcommand("oracle", "Certify closed forms against the Fock oracle");
    oracle_cmd->add_option("--cutoff", cert.cutoff, "Fock cutoff");
    oracle_cmd->add_option("--cutoff-check", cert.cutoff_check, "Cutoff for the convergence rerun");
    oracle_cmd->add_option("--states", cert.fidelity_states, "Random single-mode states");
    oracle_cmd->add_option("--chain-states", cert.chain_states, "Random two-mode states");
    oracle_cmd->add_option("--seed", seed, "RNG seed (falls back to CVPRIVACY_SEED)");
    oracle_cmd->add_option("--out", out_path, "Write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (analyze_cmd->parsed()) {
            const GaussianState s = load_state_file(state_file);
            const BipartiteSplit split = parse_split(split_text);
            const SecurityReport r = analyze(s, split, default_coords(split), x0, block_length);
            emit(report_to_json(r), out_path);
        } else if (sweep_cmd->parsed()) {
            const auto comma = grid_text.find(',');
            if (comma == std::string::npos) {
                throw Error(ErrorCode::InvalidArgument, "--grid expects two ranges separated by ','");
            }
            SweepSpec spec;
            spec.lambda = parse_grid_range(grid_text.substr(0, comma));
            spec.c = parse_grid_range(grid_text.substr(comma + 1));
            spec.x0 = x0;
            emit(sweep_csv(sweep(spec)), out_path);
        } else if (sim_cmd->parsed()) {
            const GaussianState s = load_state_file(state_file);
            const BipartiteSplit split = parse_split(split_text);
            validate_split(s, split);
            require_physical(s);
            ProtocolConfig cfg;
            cfg.X0 = x0;
            cfg.delta = delta;
            cfg.n_samples = samples;
            cfg.seed = resolve_seed(seed);
            cfg.sampler = sampler_text == "window" ? Sampler::Window : Sampler::Rejection;
            const MeasuredCoords coords = default_coords(split);
            const std::vector<int> n_range = parse_n_range(n_range_text);
            const SimulationResult r = simulate(s, cfg, n_range, coords);
            std::optional<SlopeFit> fit;
            if (slope_text != "none") {
                fit = slope_check(s, cfg, n_range, coords,
                                  slope_text == "direct" ? SlopeMethod::Direct : SlopeMethod::Weighted);
            }
            if (!csv_path.empty()) emit(simulation_csv(r), csv_path);
            emit(simulation_to_json(r, fit ? &*fit : nullptr), out_path);
        } else if (oracle_cmd->parsed()) {
            cert.seed = resolve_seed(seed);
            const CertificationReport r = run_certification(cert);
            emit(certification_to_json(r), out_path);
            return r.all_pass() ? 0 : 4;
        }
    } catch (const Error& e) {
        std::cerr << "cvprivacy: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "cvprivacy: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
