#include "liemix/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "liemix/errors.hpp"

namespace liemix {

namespace {

using nlohmann::json;

void check_keys(const json& j, const char* section, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ParseError(std::string("config: '") + section + "' must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ParseError(std::string("config: unknown key '") + it.key() + "' in '" + section + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
        out.reset();
        return;
    }
    T v{};
    read(j, key, v);
    out = v;
}

template <int R, int C>
void read_matrix(const json& j, const char* key, Eigen::Matrix<double, R, C>& out) {
    if (!j.contains(key)) return;
    const json& a = j.at(key);
    try {
        if constexpr (C == 1) {
            if (!a.is_array() || a.size() != R) throw ParseError("");
            for (int i = 0; i < R; ++i) out(i) = a.at(i).get<double>();
        } else {
            if (!a.is_array() || a.size() != R) throw ParseError("");
            for (int r = 0; r < R; ++r) {
                if (!a.at(r).is_array() || a.at(r).size() != C) throw ParseError("");
                for (int c = 0; c < C; ++c) out(r, c) = a.at(r).at(c).get<double>();
            }
        }
    } catch (const std::exception&) {
        throw ParseError(std::string("config: '") + key + "' must be a " + std::to_string(R) +
                         (C == 1 ? "-vector" : "x" + std::to_string(C) + " nested array"));
    }
}

std::string read_string(const json& j, const char* key, const std::string& fallback) {
    std::string s = fallback;
    read(j, key, s);
    return s;
}

void parse_scenario(const json& j, ScenarioConfig& s) {
    check_keys(j, "scenario",
               {"steps", "n0_range", "p_S", "birth_rate", "clutter_rate", "p_D", "meas_noise", "dt", "region",
                "velocity_mean", "velocity_prior", "process_noise_std", "seed"});
    read(j, "steps", s.steps);
    if (j.contains("n0_range")) {
        const json& r = j.at("n0_range");
        if (!r.is_array() || r.size() != 2) throw ParseError("config: 'n0_range' must be [min, max]");
        read(json{{"a", r}}, "a", s.n0_range);
    }
    read(j, "p_S", s.p_S);
    read(j, "birth_rate", s.birth_rate);
    read(j, "clutter_rate", s.clutter_rate);
    read(j, "p_D", s.p_D);
    if (j.contains("meas_noise")) {
        const json& m = j.at("meas_noise");
        check_keys(m, "meas_noise", {"sigma_xy", "sigma_phi"});
        read(m, "sigma_xy", s.meas_noise.sigma_xy);
        read(m, "sigma_phi", s.meas_noise.sigma_phi);
    }
    read(j, "dt", s.dt);
    if (j.contains("region")) {
        const json& r = j.at("region");
        check_keys(r, "region", {"x_min", "x_max", "y_min", "y_max"});
        read(r, "x_min", s.region.x_min);
        read(r, "x_max", s.region.x_max);
        read(r, "y_min", s.region.y_min);
        read(r, "y_max", s.region.y_max);
    }
    read_matrix(j, "velocity_mean", s.velocity_mean);
    read_matrix(j, "velocity_prior", s.velocity_prior);
    read_matrix(j, "process_noise_std", s.process_noise_std);
    read(j, "seed", s.seed);
}

void parse_reduction(const json& j, ReductionConfig& r) {
    check_keys(j, "reduction", {"picking", "strategy", "max_components", "threshold", "spd_jitter"});
    r.picking = parse_picking(read_string(j, "picking", to_string(r.picking)));
    r.strategy = parse_strategy(read_string(j, "strategy", to_string(r.strategy)));
    read_optional(j, "max_components", r.max_components);
    read_optional(j, "threshold", r.threshold);
    read(j, "spd_jitter", r.spd_jitter);
}

void parse_phd(const json& j, FilterSettings& f) {
    check_keys(j, "phd",
               {"p_S", "p_D", "clutter_intensity", "birth", "prune_threshold", "extract_threshold", "reduction"});
    read_optional(j, "p_S", f.p_S);
    read_optional(j, "p_D", f.p_D);
    read_optional(j, "clutter_intensity", f.clutter_intensity);
    if (j.contains("birth")) {
        const json& b = j.at("birth");
        check_keys(b, "birth", {"rate", "position_std", "orientation_std"});
        read_optional(b, "rate", f.birth.rate);
        read(b, "position_std", f.birth.position_std);
        read(b, "orientation_std", f.birth.orientation_std);
    }
    read(j, "prune_threshold", f.prune_threshold);
    read(j, "extract_threshold", f.extract_threshold);
    if (j.contains("reduction")) parse_reduction(j.at("reduction"), f.reduction);
}

void parse_ospa(const json& j, OspaConfig& o) {
    check_keys(j, "ospa", {"cutoff", "order", "base_distance"});
    read(j, "cutoff", o.cutoff);
    read(j, "order", o.order);
    o.base_distance = parse_base_distance(read_string(j, "base_distance", to_string(o.base_distance)));
}

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    ExperimentConfig cfg;
    check_keys(j, "config", {"scenario", "phd", "ospa"});
    try {
        if (j.contains("scenario")) parse_scenario(j.at("scenario"), cfg.scenario);
        if (j.contains("phd")) parse_phd(j.at("phd"), cfg.phd);
        if (j.contains("ospa")) parse_ospa(j.at("ospa"), cfg.ospa);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    cfg.scenario.validate();
    cfg.phd.reduction.validate();
    cfg.ospa.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

std::string dump_experiment_config(const ExperimentConfig& cfg) {
    const ScenarioConfig& s = cfg.scenario;
    json vel_prior = json::array();
    for (int r = 0; r < 3; ++r) vel_prior.push_back({s.velocity_prior(r, 0), s.velocity_prior(r, 1), s.velocity_prior(r, 2)});
    json q = json::array();
    for (int i = 0; i < 6; ++i) q.push_back(s.process_noise_std(i));
    json scenario{{"steps", s.steps},
                  {"n0_range", s.n0_range},
                  {"p_S", s.p_S},
                  {"birth_rate", s.birth_rate},
                  {"clutter_rate", s.clutter_rate},
                  {"p_D", s.p_D},
                  {"meas_noise", {{"sigma_xy", s.meas_noise.sigma_xy}, {"sigma_phi", s.meas_noise.sigma_phi}}},
                  {"dt", s.dt},
                  {"region", {{"x_min", s.region.x_min}, {"x_max", s.region.x_max}, {"y_min", s.region.y_min}, {"y_max", s.region.y_max}}},
                  {"velocity_mean", {s.velocity_mean(0), s.velocity_mean(1), s.velocity_mean(2)}},
                  {"velocity_prior", vel_prior},
                  {"process_noise_std", q},
                  {"seed", s.seed}};
    const FilterSettings& f = cfg.phd;
    json reduction{{"picking", to_string(f.reduction.picking)},
                   {"strategy", to_string(f.reduction.strategy)},
                   {"max_components", optional_json(f.reduction.max_components)},
                   {"threshold", optional_json(f.reduction.threshold)},
                   {"spd_jitter", f.reduction.spd_jitter}};
    json phd{{"p_S", optional_json(f.p_S)},
             {"p_D", optional_json(f.p_D)},
             {"clutter_intensity", optional_json(f.clutter_intensity)},
             {"birth",
              {{"rate", optional_json(f.birth.rate)},
               {"position_std", f.birth.position_std},
               {"orientation_std", f.birth.orientation_std}}},
             {"prune_threshold", f.prune_threshold},
             {"extract_threshold", f.extract_threshold},
             {"reduction", reduction}};
    json ospa{{"cutoff", cfg.ospa.cutoff}, {"order", cfg.ospa.order}, {"base_distance", to_string(cfg.ospa.base_distance)}};
    return json{{"scenario", scenario}, {"phd", phd}, {"ospa", ospa}}.dump(2) + "\n";
}

}  // namespace liemix
