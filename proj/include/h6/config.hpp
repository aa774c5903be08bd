#pragma once

// Run configuration read from JSON. See README.md for the schema.

#include <json.hpp>

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "h6/continuum.hpp"

namespace h6 {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::size_t N = 0;
    std::vector<double> lambda;
    double h = 1.0;
    std::uint64_t seed = 1;
    PotentialSpec potential = V1{};
    json potential_json;
    std::optional<PhasePoint> initial;
    std::optional<ScalingRule> continuum;
    json continuum_json;
    double T = 1.0;
    std::vector<double> Q0, P0;

    ModelContext context() const { return {lambda, h}; }
    json resolved() const;
};

namespace detail {

inline double number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing parameter '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(where + ": parameter '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline ExprTree expression(const json& j, const std::string& key, const std::string& where, std::vector<std::string> vars) {
    if (!j.contains(key) || !j.at(key).is_string()) throw ConfigError(where + ": missing expression '" + key + "'");
    try {
        return parse_expr(j.at(key).get<std::string>(), std::move(vars));
    } catch (const SyntaxError& e) {
        throw ConfigError(where + ": expression '" + key + "': " + e.what());
    }
}

inline void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

inline std::vector<double> vector_of(const json& j, const std::string& key, std::size_t n, const std::string& where) {
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != n) throw ConfigError(where + ": '" + key + "' must be an array of length " + std::to_string(n));
    std::vector<double> v;
    for (const auto& x : a) {
        if (!x.is_number()) throw ConfigError(where + ": '" + key + "' must contain numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

}  // namespace detail

inline PotentialSpec parse_potential(const json& j) {
    const std::string where = "potential";
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
        throw ConfigError("potential: object with a 'family' string required");
    const std::string fam = j.at("family");
    using detail::number, detail::expression, detail::only_keys;
    if (fam == "V1") {
        only_keys(j, {"family", "alpha_plus", "varkappa"}, where);
        return V1{number(j, "alpha_plus", where), number(j, "varkappa", where)};
    }
    if (fam == "V2I") {
        only_keys(j, {"family", "kappa"}, where);
        return V2I{number(j, "kappa", where)};
    }
    if (fam == "V2II") {
        only_keys(j, {"family", "eta", "zeta", "kappa"}, where);
        return V2II{number(j, "eta", where), number(j, "zeta", where), number(j, "kappa", where)};
    }
    if (fam == "V1s") {
        only_keys(j, {"family", "F"}, where);
        return V1s{expression(j, "F", where, {"X", "Y"})};
    }
    if (fam == "V2Is") {
        only_keys(j, {"family", "alpha", "G"}, where);
        return V2Is{number(j, "alpha", where), expression(j, "G", where, {"X", "Y"})};
    }
    if (fam == "V2IIs") {
        only_keys(j, {"family", "alpha", "alpha_plus", "F"}, where);
        return V2IIs{number(j, "alpha", where), number(j, "alpha_plus", where), expression(j, "F", where, {"X", "Y"})};
    }
    if (fam == "dPIN") {
        only_keys(j, {"family", "alpha"}, where);
        return DPIN{number(j, "alpha", where)};
    }
    if (fam == "Custom") {
        only_keys(j, {"family", "expr"}, where);
        return Custom{expression(j, "expr", where, custom_vars())};
    }
    throw ConfigError("potential: unknown family '" + fam + "'");
}

inline ScalingRule parse_scaling(const json& j, const std::string& default_family) {
    const std::string where = "continuum";
    detail::only_keys(j, {"family", "omega", "gamma", "delta", "f", "g", "T", "Q0", "P0"}, where);
    ScalingRule r;
    try {
        r.family = parse_family(j.value("family", default_family));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("continuum: ") + e.what());
    }
    r.omega = j.value("omega", 1.0);
    r.gamma = j.value("gamma", 0.0);
    r.delta = j.value("delta", 0.0);
    if (r.family == Family::V1s || r.family == Family::V2IIs) r.f = detail::expression(j, "f", where, {"X", "Y"});
    if (r.family == Family::V2Is) r.g = detail::expression(j, "g", where, {"X", "Y"});
    return r;
}

inline RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    detail::only_keys(j, {"N", "lambda", "h", "seed", "potential", "initial", "continuum"}, "config");
    RunConfig c;
    if (!j.contains("N") || !j.at("N").is_number_integer() || j.at("N").get<long long>() < 1)
        throw ConfigError("config: 'N' must be a positive integer");
    c.N = j.at("N").get<std::size_t>();
    c.lambda = j.contains("lambda") ? detail::vector_of(j, "lambda", c.N, "config") : default_lambda(c.N);
    bool nonzero = false;
    for (double l : c.lambda) nonzero = nonzero || l != 0.0;
    if (!nonzero) throw ConfigError("config: lambda must not be the zero vector");
    c.h = j.value("h", 1.0);
    if (!(c.h > 0)) throw ConfigError("config: 'h' must be positive");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("config: 'seed' must be a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (!j.contains("potential")) throw ConfigError("config: 'potential' is required");
    c.potential = parse_potential(j.at("potential"));
    c.potential_json = j.at("potential");
    if (j.contains("initial")) {
        const auto& in = j.at("initial");
        detail::only_keys(in, {"q", "p"}, "initial");
        c.initial = PhasePoint{detail::vector_of(in, "q", c.N, "initial"), detail::vector_of(in, "p", c.N, "initial")};
    }
    if (j.contains("continuum")) {
        const auto& cj = j.at("continuum");
        c.continuum = parse_scaling(cj, c.potential_json.at("family").get<std::string>());
        c.continuum_json = cj;
        c.T = cj.value("T", 1.0);
        c.Q0 = cj.contains("Q0") ? detail::vector_of(cj, "Q0", c.N, "continuum") : std::vector<double>(c.N, 0.0);
        if (!cj.contains("Q0")) c.Q0[0] = 1.0;
        c.P0 = cj.contains("P0") ? detail::vector_of(cj, "P0", c.N, "continuum") : std::vector<double>(c.N, 0.0);
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline json RunConfig::resolved() const {
    json j;
    j["N"] = N;
    j["lambda"] = lambda;
    j["h"] = h;
    j["seed"] = seed;
    j["potential"] = potential_json;
    if (initial) j["initial"] = {{"q", initial->q}, {"p", initial->p}};
    if (continuum) {
        json c = continuum_json;
        c["family"] = family_label(continuum->family);
        c["omega"] = continuum->omega;
        c["gamma"] = continuum->gamma;
        c["delta"] = continuum->delta;
        c["T"] = T;
        c["Q0"] = Q0;
        c["P0"] = P0;
        j["continuum"] = c;
    }
    return j;
}

}  // namespace h6
