#include "cvprivacy/json_io.hpp"

#include "cvprivacy/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace cvprivacy {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::SchemaError, path + ": " + what);
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) schema_error(path, std::string("expected a number, got ") + j.type_name());
    return j.get<double>();
}

json proportion_json(const Proportion& p) {
    return {{"value", p.value}, {"std_error", p.std_error}, {"successes", p.successes}, {"trials", p.trials}};
}

json coords_json(MeasuredCoords c) { return {{"alice", c.alice}, {"bob", c.bob}}; }

}  // namespace

GaussianState parse_state_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        schema_error("$", std::string("invalid JSON at byte ") + std::to_string(e.byte));
    }
    if (!doc.is_object()) schema_error("$", "expected an object");

    if (!doc.contains("n_modes")) schema_error("n_modes", "missing");
    const json& nm = doc["n_modes"];
    if (!nm.is_number_integer() || nm.get<long long>() < 1) {
        schema_error("n_modes", "expected a positive integer");
    }
    const int n = nm.get<int>();
    const int dim = 2 * n;

    if (!doc.contains("cov")) schema_error("cov", "missing");
    const json& cov = doc["cov"];
    if (!cov.is_array() || static_cast<int>(cov.size()) != dim) {
        schema_error("cov", "expected an array of " + std::to_string(dim) + " rows");
    }
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const std::string row_path = "cov[" + std::to_string(i) + "]";
        const json& row = cov[i];
        if (!row.is_array() || static_cast<int>(row.size()) != dim) {
            schema_error(row_path, "expected an array of " + std::to_string(dim) + " numbers");
        }
        for (int k = 0; k < dim; ++k) m(i, k) = number_at(row[k], row_path + "[" + std::to_string(k) + "]");
    }

    Vector d = Vector::Zero(dim);
    if (doc.contains("disp")) {
        const json& disp = doc["disp"];
        if (!disp.is_array() || static_cast<int>(disp.size()) != dim) {
            schema_error("disp", "expected an array of " + std::to_string(dim) + " numbers");
        }
        for (int k = 0; k < dim; ++k) d(k) = number_at(disp[k], "disp[" + std::to_string(k) + "]");
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "n_modes" && key != "cov" && key != "disp") schema_error(key, "unknown field");
    }

    try {
        return GaussianState(m, d);
    } catch (const Error& e) {
        schema_error("cov", e.what());
    }
}

GaussianState load_state_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::SchemaError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_state_json(buf.str());
}

std::string state_to_json(const GaussianState& s) {
    json cov = json::array();
    for (Eigen::Index i = 0; i < s.cov().rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < s.cov().cols(); ++k) row.push_back(s.cov()(i, k));
        cov.push_back(row);
    }
    json disp(std::vector<double>(s.disp().data(), s.disp().data() + s.disp().size()));
    return json{{"n_modes", s.n_modes()}, {"cov", cov}, {"disp", disp}}.dump(2);
}

std::string report_to_json(const SecurityReport& r) {
    json j;
    j["split"] = {r.split.n_a, r.split.n_b};
    j["measured_coords"] = coords_json(r.coords);
    j["x0"] = r.x0;
    j["eps_ratio_exponent"] = r.eps_ratio_exponent;
    j["fidelity_exponent"] = r.fidelity_exponent;
    j["eps_B"] = r.eps_B;
    j["fidelity"] = r.fidelity;
    j["min_pt_symplectic_eigenvalue"] = r.min_pt_symplectic_eigenvalue;
    j["ppt"] = r.ppt;
    j["individual_secure"] = r.individual_secure;
    j["collective_secure"] = r.collective_secure;
    j["general_key_condition"] = r.general_key_condition;
    j["key_distillable"] = r.key_distillable;
    j["key_rate_estimate"] = {
        {"value", r.key_rate_estimate},
        {"block_length", r.block_length},
        {"kind", "ESTIMATE"},
        {"formula", "1 - h2(eps_BN) - h2((1 + F^N)/2)"},
    };
    return j.dump(2);
}

namespace {

json slope_json(const SlopeFit& fit) {
    json pts = json::array();
    for (const NPoint& p : fit.points) {
        pts.push_back({
            {"N", p.N},
            {"log_odds", p.log_odds},
            {"std_error", p.std_error},
            {"blocks", p.blocks},
            {"accepted_blocks", p.accepted_blocks},
            {"error_blocks", p.error_blocks},
        });
    }
    return json{
        {"method", std::string(to_string(fit.method))},
        {"slope", fit.slope},
        {"slope_std_error", fit.slope_std_error},
        {"ci95", {fit.ci_low, fit.ci_high}},
        {"intercept", fit.intercept},
        {"expected_slope", fit.expected_slope},
        {"points", pts},
    };
}

}  // namespace

std::string simulation_to_json(const SimulationResult& r, const SlopeFit* fit) {
    json j;
    j["config"] = {
        {"x0", r.config.X0},
        {"delta", r.config.delta},
        {"n_samples", r.config.n_samples},
        {"seed", r.config.seed},
        {"sampler", std::string(to_string(r.config.sampler))},
    };
    j["measured_coords"] = coords_json(r.coords);
    j["accepted_pairs"] = r.accepted_pairs;
    j["eps_B"] = proportion_json(r.eps_B);
    j["eps_B_analytic"] = r.eps_B_analytic;
    json ad = json::array();
    for (std::size_t i = 0; i < r.ad.size(); ++i) {
        ad.push_back({
            {"N", r.ad_N[i]},
            {"blocks", r.ad[i].blocks},
            {"accepted", r.ad[i].accepted},
            {"yield", r.ad[i].yield},
            {"eps_BN", proportion_json(r.ad[i].eps_BN)},
        });
    }
    j["advantage_distillation"] = ad;
    if (fit) j["slope"] = slope_json(*fit);
    return j.dump(2);
}

std::string slope_to_json(const SlopeFit& fit) { return slope_json(fit).dump(2); }

std::string simulation_csv(const SimulationResult& r) {
    std::ostringstream out;
    out.precision(17);
    out << "N,eps_BN,se\n";
    for (std::size_t i = 0; i < r.ad.size(); ++i) {
        out << r.ad_N[i] << ',' << r.ad[i].eps_BN.value << ',' << r.ad[i].eps_BN.std_error << '\n';
    }
    return out.str();
}

}  // namespace cvprivacy
