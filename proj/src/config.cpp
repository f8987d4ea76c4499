#include "madlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "madlab/errors.hpp"

namespace madlab {

using nlohmann::json;

namespace {

std::string to_string(StoppingKind kind) {
    switch (kind) {
        case StoppingKind::none: return "none";
        case StoppingKind::all_significant: return "all_significant";
        case StoppingKind::width_below: return "width_below";
    }
    return "unknown";
}

StoppingKind stopping_kind_from_string(const std::string& name) {
    if (name == "none") return StoppingKind::none;
    if (name == "all_significant") return StoppingKind::all_significant;
    if (name == "width_below") return StoppingKind::width_below;
    throw ConfigError("unknown stopping rule '" + name + "'");
}

// Wraps nlohmann type errors so the CLI reports them as validation failures.
template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

void require_object(const json& j, const char* what) {
    if (!j.is_object()) {
        throw ConfigError(std::string(what) + " must be a JSON object");
    }
}

json delta_to_json(const DeltaSequence& delta) {
    if (delta.is_constant()) {
        return json{{"constant", delta.parameter()}};
    }
    return json{{"exponent", delta.parameter()}};
}

DeltaSequence delta_from_json(const json& j) {
    require_object(j, "delta");
    if (j.contains("constant")) {
        return DeltaSequence::constant(get_or<double>(j, "constant", 1.0));
    }
    if (j.contains("exponent")) {
        return DeltaSequence::polynomial(get_or<double>(j, "exponent", 0.0));
    }
    throw ConfigError("delta needs either 'exponent' or 'constant'");
}

json policy_to_json(const PolicySpec& p) {
    return json{{"kind", to_string(p.kind)},
                {"mc_draws", p.mc_draws},
                {"ucb_constant", p.ucb_constant},
                {"beta_prior_a", p.beta_prior_a},
                {"beta_prior_b", p.beta_prior_b},
                {"normal_prior_mean", p.normal_prior_mean},
                {"normal_prior_var", p.normal_prior_var},
                {"noise_var", p.noise_var}};
}

PolicySpec policy_from_json(const json& j) {
    require_object(j, "policy");
    PolicySpec p;
    p.kind = policy_kind_from_string(get_or<std::string>(j, "kind", to_string(p.kind)));
    p.mc_draws = get_or<std::uint32_t>(j, "mc_draws", p.mc_draws);
    p.ucb_constant = get_or<double>(j, "ucb_constant", p.ucb_constant);
    p.beta_prior_a = get_or<double>(j, "beta_prior_a", p.beta_prior_a);
    p.beta_prior_b = get_or<double>(j, "beta_prior_b", p.beta_prior_b);
    p.normal_prior_mean = get_or<double>(j, "normal_prior_mean", p.normal_prior_mean);
    p.normal_prior_var = get_or<double>(j, "normal_prior_var", p.normal_prior_var);
    p.noise_var = get_or<double>(j, "noise_var", p.noise_var);
    return p;
}

json model_to_json(const OutcomeModelSpec& m) {
    json j{{"kind", to_string(m.kind)},
           {"refit_every", m.refit_every},
           {"refit_warmup", m.refit_warmup},
           {"min_obs_per_arm", m.min_obs_per_arm}};
    if (m.cap) {
        j["cap"] = *m.cap;
    } else {
        j["cap"] = "auto";
    }
    return j;
}

OutcomeModelSpec model_from_json(const json& j) {
    require_object(j, "outcome_model");
    OutcomeModelSpec m;
    m.kind = outcome_model_kind_from_string(get_or<std::string>(j, "kind", to_string(m.kind)));
    m.refit_every = get_or<std::uint32_t>(j, "refit_every", m.refit_every);
    m.refit_warmup = get_or<std::uint64_t>(j, "refit_warmup", m.refit_warmup);
    m.min_obs_per_arm = get_or<std::uint32_t>(j, "min_obs_per_arm", m.min_obs_per_arm);
    if (j.contains("cap") && !j.at("cap").is_null()) {
        const json& cap = j.at("cap");
        if (cap.is_string()) {
            if (cap.get<std::string>() != "auto") {
                throw ConfigError("outcome_model.cap must be a number or \"auto\"");
            }
        } else if (cap.is_number()) {
            m.cap = cap.get<double>();
        } else {
            throw ConfigError("outcome_model.cap must be a number or \"auto\"");
        }
    }
    return m;
}

json madmod_to_json(const ImportanceWeightSpec& s) {
    return json{{"kind", to_string(s.kind)},
                {"exponent", s.exponent},
                {"level", s.level},
                {"clock", to_string(s.clock)}};
}

ImportanceWeightSpec madmod_from_json(const json& j) {
    require_object(j, "madmod");
    ImportanceWeightSpec s;
    s.kind = decay_kind_from_string(get_or<std::string>(j, "kind", to_string(s.kind)));
    s.exponent = get_or<double>(j, "exponent", s.exponent);
    s.level = get_or<double>(j, "level", s.level);
    s.clock = decay_clock_from_string(get_or<std::string>(j, "clock", to_string(s.clock)));
    return s;
}

}  // namespace

void ExperimentConfig::validate(std::size_t covariate_dim) const {
    if (arms < 2) {
        throw ConfigError("experiment '" + name + "': arms must be >= 2");
    }
    policy.validate();
    outcome_model.validate(covariate_dim);
    if (madmod) {
        madmod->validate();
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("alpha must lie in (0, 1)");
    }
    if (!(t_star >= 1.0) || !std::isfinite(t_star)) {
        throw ConfigError("t_star must be >= 1");
    }
    if (max_t < 1) {
        throw ConfigError("max_t must be >= 1");
    }
    if (batch_size < 1) {
        throw ConfigError("batch_size must be >= 1");
    }
    if (stopping.kind == StoppingKind::width_below && !(stopping.width > 0.0)) {
        throw ConfigError("stopping.width must be positive for width_below");
    }
}

void RunSpec::validate() const {
    if (experiments.empty()) {
        throw ConfigError("at least one experiment is required");
    }
    if (dgps.empty()) {
        throw ConfigError("at least one dgp is required");
    }
    if (reps < 1) {
        throw ConfigError("reps must be >= 1");
    }
    const std::size_t k = arm_count(dgps.front());
    std::set<std::string> names;
    for (const auto& dgp : dgps) {
        dgp.validate();
        if (arm_count(dgp) != k) {
            throw ConfigError("all dgps in one run must have the same number of arms");
        }
    }
    for (const auto& e : experiments) {
        if (!names.insert(e.name).second) {
            throw ConfigError("duplicate experiment name '" + e.name + "'");
        }
        if (e.arms != k) {
            throw ConfigError("experiment '" + e.name + "' has " + std::to_string(e.arms) +
                              " arms but dgp " + to_string(dgps.front().kind) + " has " +
                              std::to_string(k));
        }
        for (const auto& dgp : dgps) {
            e.validate(covariate_dim(dgp));
        }
    }
}

json to_json(const ExperimentConfig& c) {
    json j{{"name", c.name},
           {"arms", c.arms},
           {"delta", delta_to_json(c.delta)},
           {"policy", policy_to_json(c.policy)},
           {"outcome_model", model_to_json(c.outcome_model)},
           {"alpha", c.alpha},
           {"t_star", c.t_star},
           {"max_t", c.max_t},
           {"batch_size", c.batch_size},
           {"stopping", json{{"kind", to_string(c.stopping.kind)}, {"width", c.stopping.width}}},
           {"seed", c.seed},
           {"radius_form", to_string(c.radius_form)}};
    j["madmod"] = c.madmod ? madmod_to_json(*c.madmod) : json(nullptr);
    return j;
}

ExperimentConfig experiment_from_json(const json& j) {
    require_object(j, "experiment");
    ExperimentConfig c;
    c.name = get_or<std::string>(j, "name", c.name);
    c.arms = get_or<std::size_t>(j, "arms", c.arms);
    if (j.contains("delta")) {
        c.delta = delta_from_json(j.at("delta"));
    }
    if (j.contains("policy")) {
        c.policy = policy_from_json(j.at("policy"));
    }
    if (j.contains("outcome_model")) {
        c.outcome_model = model_from_json(j.at("outcome_model"));
    }
    if (j.contains("madmod") && !j.at("madmod").is_null()) {
        c.madmod = madmod_from_json(j.at("madmod"));
    }
    c.alpha = get_or<double>(j, "alpha", c.alpha);
    c.t_star = get_or<double>(j, "t_star", c.t_star);
    c.max_t = get_or<std::uint64_t>(j, "max_t", c.max_t);
    c.batch_size = get_or<std::uint64_t>(j, "batch_size", c.batch_size);
    if (j.contains("stopping")) {
        const json& s = j.at("stopping");
        require_object(s, "stopping");
        c.stopping.kind = stopping_kind_from_string(get_or<std::string>(s, "kind", "none"));
        c.stopping.width = get_or<double>(s, "width", 0.0);
    }
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.radius_form = radius_form_from_string(get_or<std::string>(j, "radius_form", "log_inside"));
    return c;
}

json to_json(const DgpSpec& d) {
    return json{{"kind", to_string(d.kind)}, {"gamma", d.gamma}, {"n_irrelevant", d.n_irrelevant}};
}

DgpSpec dgp_from_json(const json& j) {
    require_object(j, "dgp");
    DgpSpec d;
    d.kind = dgp_kind_from_string(get_or<std::string>(j, "kind", to_string(d.kind)));
    d.gamma = get_or<double>(j, "gamma", d.gamma);
    d.n_irrelevant = get_or<std::size_t>(j, "n_irrelevant", d.n_irrelevant);
    return d;
}

json to_json(const RunSpec& run) {
    json experiments = json::array();
    for (const auto& e : run.experiments) {
        experiments.push_back(to_json(e));
    }
    json dgps = json::array();
    for (const auto& d : run.dgps) {
        dgps.push_back(to_json(d));
    }
    return json{{"seed", run.seed}, {"reps", run.reps}, {"dgps", dgps}, {"experiments", experiments}};
}

RunSpec run_spec_from_json(const json& j) {
    require_object(j, "config");
    RunSpec run;
    if (j.contains("experiments")) {
        const json& list = j.at("experiments");
        if (!list.is_array()) {
            throw ConfigError("'experiments' must be an array");
        }
        for (const auto& e : list) {
            run.experiments.push_back(experiment_from_json(e));
        }
    } else {
        run.experiments.push_back(experiment_from_json(j));
    }
    if (j.contains("dgps")) {
        const json& list = j.at("dgps");
        if (!list.is_array()) {
            throw ConfigError("'dgps' must be an array");
        }
        for (const auto& d : list) {
            run.dgps.push_back(dgp_from_json(d));
        }
    } else if (j.contains("dgp")) {
        run.dgps.push_back(dgp_from_json(j.at("dgp")));
    }
    run.reps = get_or<std::uint64_t>(j, "reps", run.reps);
    run.seed = get_or<std::uint64_t>(j, "seed", run.experiments.front().seed);
    return run;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace madlab
