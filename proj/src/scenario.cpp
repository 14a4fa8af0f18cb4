#include "misobc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace misobc {

using nlohmann::json;

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

StepRule parse_rule(const std::string& s) {
    if (s == "constant") return StepRule::constant;
    if (s == "adaptive") return StepRule::adaptive;
    if (s == "cutting_plane") return StepRule::cutting_plane;
    throw ConfigError("solver.step_rule must be constant, adaptive or cutting_plane");
}

const char* rule_name(StepRule r) {
    switch (r) {
        case StepRule::constant: return "constant";
        case StepRule::adaptive: return "adaptive";
        case StepRule::cutting_plane: return "cutting_plane";
    }
    return "cutting_plane";
}

SolverConfig parse_solver(const json& j) {
    SolverConfig c;
    read_opt(j, "step_mu", c.step_mu);
    read_opt(j, "step_delta", c.step_delta);
    if (j.contains("step_rule")) c.step_rule = parse_rule(j.at("step_rule").get<std::string>());
    read_opt(j, "max_step", c.max_step);
    read_opt(j, "radius", c.radius);
    read_opt(j, "eps", c.eps);
    read_opt(j, "rate_tol", c.rate_tol);
    read_opt(j, "dc_tol", c.dc_tol);
    read_opt(j, "ndc_tol", c.ndc_tol);
    read_opt(j, "gap_tol", c.gap_tol);
    read_opt(j, "inner_gap_tol", c.inner_gap_tol);
    read_opt(j, "max_outer", c.max_outer);
    read_opt(j, "max_inner", c.max_inner);
    read_opt(j, "columns", c.columns);
    read_opt(j, "power_cap", c.power_cap);
    read_opt(j, "mu_init", c.mu_init);
    read_opt(j, "delta_init", c.delta_init);
    if (j.contains("p3")) {
        const auto& p = j.at("p3");
        read_opt(p, "obj_tol", c.p3.obj_tol);
        read_opt(p, "kkt_tol", c.p3.kkt_tol);
        read_opt(p, "q_tol", c.p3.q_tol);
        read_opt(p, "bisect_tol", c.p3.bisect_tol);
        read_opt(p, "root_tol", c.p3.root_tol);
        read_opt(p, "max_sweeps", c.p3.max_sweeps);
    }
    return c;
}

json solver_json(const SolverConfig& c) {
    return json{{"step_mu", c.step_mu},
                {"step_delta", c.step_delta},
                {"step_rule", rule_name(c.step_rule)},
                {"max_step", c.max_step},
                {"radius", c.radius},
                {"eps", c.eps},
                {"rate_tol", c.rate_tol},
                {"dc_tol", c.dc_tol},
                {"ndc_tol", c.ndc_tol},
                {"gap_tol", c.gap_tol},
                {"inner_gap_tol", c.inner_gap_tol},
                {"max_outer", c.max_outer},
                {"max_inner", c.max_inner},
                {"columns", c.columns},
                {"power_cap", c.power_cap},
                {"mu_init", c.mu_init},
                {"delta_init", c.delta_init},
                {"p3",
                 {{"obj_tol", c.p3.obj_tol},
                  {"kkt_tol", c.p3.kkt_tol},
                  {"q_tol", c.p3.q_tol},
                  {"bisect_tol", c.p3.bisect_tol},
                  {"root_tol", c.p3.root_tol},
                  {"max_sweeps", c.p3.max_sweeps}}}};
}

}  // namespace

std::vector<UserProfile> mixed_profiles(int users, double gamma, double sum_rate) {
    if (users < 2 || !(gamma >= 0.0 && gamma <= 1.0) || !(sum_rate >= 0.0)) {
        throw ConfigError("mixed traffic needs K >= 2, gamma in [0,1], sum_rate >= 0");
    }
    const int ndc = (users + 1) / 2;
    const int dc = users - ndc;
    std::vector<UserProfile> out;
    for (int k = 0; k < users; ++k) {
        if (k < ndc) {
            out.push_back({k, TrafficClass::ndc, gamma * sum_rate / ndc});
        } else {
            out.push_back({k, TrafficClass::dc, (1.0 - gamma) * sum_rate / dc});
        }
    }
    return out;
}

void Scenario::validate() const {
    fading.validate();
    solver.validate();
    if (gamma && !(*gamma >= 0.0 && *gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
    if (p_star && !(*p_star > 0.0)) throw ConfigError("p_star must be positive");
    if (sum_rate && !(*sum_rate >= 0.0)) throw ConfigError("sum_rate must be nonnegative");
    if (blocks < 0) throw ConfigError("blocks must be nonnegative");
    if (!profiles.empty()) {
        try {
            indexed_profiles(profiles, fading.users);
        } catch (const DimensionError& e) {
            throw ConfigError(std::string("profiles: ") + e.what());
        }
    }
    if (alpha) {
        if (alpha->size() != fading.users) throw ConfigError("alpha needs one entry per user");
        try {
            validate_profile(*alpha);
        } catch (const DimensionError& e) {
            throw ConfigError(std::string("alpha: ") + e.what());
        }
    }
}

RateProfile Scenario::rate_profile() const {
    if (alpha) return *alpha;
    const int users = fading.users;
    RateProfile a = RateProfile::Constant(users, 1.0 / users);
    double total = 0.0;
    for (const auto& p : profiles) total += p.target_rate;
    if (total > 0.0) {
        for (const auto& p : profiles) a(p.user_id) = p.target_rate / total;
    }
    return a;
}

Scenario parse_scenario(const std::string& json_text) {
    Scenario s;
    try {
        const json j = json::parse(json_text);
        if (!j.is_object() || !j.contains("fading")) throw ConfigError("config needs a \"fading\" section");
        read_opt(j, "name", s.name);
        const auto& f = j.at("fading");
        s.fading.users = f.at("users").get<int>();
        s.fading.antennas = f.at("antennas").get<int>();
        s.fading.states = f.value("states", 100);
        s.fading.seed = f.value("seed", std::uint64_t{1});
        if (f.contains("variances")) {
            s.fading.variances = f.at("variances").get<std::vector<double>>();
        } else {
            s.fading.variances.assign(static_cast<std::size_t>(std::max(s.fading.users, 0)), 1.0);
        }
        if (j.contains("gamma")) s.gamma = j.at("gamma").get<double>();
        if (j.contains("sum_rate")) s.sum_rate = j.at("sum_rate").get<double>();
        if (j.contains("p_star")) s.p_star = j.at("p_star").get<double>();
        if (j.contains("alpha")) {
            const auto v = j.at("alpha").get<std::vector<double>>();
            s.alpha = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        }
        read_opt(j, "blocks", s.blocks);
        read_opt(j, "output_path", s.output_path);
        if (j.contains("solver")) s.solver = parse_solver(j.at("solver"));
        if (j.contains("throughput")) {
            const auto& t = j.at("throughput");
            read_opt(t, "tol", s.throughput.tol);
            read_opt(t, "initial", s.throughput.initial);
            read_opt(t, "max_rate", s.throughput.max_rate);
        }
        if (j.contains("profiles")) {
            for (const auto& p : j.at("profiles")) {
                UserProfile u;
                u.user_id = p.at("user").get<int>();
                const auto cls = p.at("class").get<std::string>();
                if (cls == "ndc" || cls == "NDC") {
                    u.traffic = TrafficClass::ndc;
                } else if (cls == "dc" || cls == "DC") {
                    u.traffic = TrafficClass::dc;
                } else {
                    throw ConfigError("profile class must be ndc or dc");
                }
                u.target_rate = p.at("target").get<double>();
                s.profiles.push_back(u);
            }
        } else if (s.gamma && s.sum_rate) {
            s.profiles = mixed_profiles(s.fading.users, *s.gamma, *s.sum_rate);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const DimensionError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        s.validate();
    } catch (const DimensionError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["fading"] = {{"users", s.fading.users},
                   {"antennas", s.fading.antennas},
                   {"variances", s.fading.variances},
                   {"states", s.fading.states},
                   {"seed", s.fading.seed}};
    json profiles = json::array();
    for (const auto& p : s.profiles) {
        profiles.push_back({{"user", p.user_id},
                            {"class", p.traffic == TrafficClass::ndc ? "ndc" : "dc"},
                            {"target", p.target_rate}});
    }
    j["profiles"] = profiles;
    if (s.gamma) j["gamma"] = *s.gamma;
    if (s.sum_rate) j["sum_rate"] = *s.sum_rate;
    if (s.p_star) j["p_star"] = *s.p_star;
    if (s.alpha) j["alpha"] = std::vector<double>(s.alpha->data(), s.alpha->data() + s.alpha->size());
    j["blocks"] = s.blocks;
    j["solver"] = solver_json(s.solver);
    j["throughput"] = {{"tol", s.throughput.tol}, {"initial", s.throughput.initial},
                       {"max_rate", s.throughput.max_rate}};
    j["output_path"] = s.output_path;
    return j.dump(2);
}

}  // namespace misobc
