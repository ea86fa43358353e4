#include "rankspectra/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "rankspectra/criteria.hpp"
#include "rankspectra/csv.hpp"
#include "rankspectra/errors.hpp"

namespace rankspectra {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) {
        throw ConfigError(where + ": missing key '" + key + "'");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
    }
}

std::size_t get_size(const json& obj, const char* key, const std::string& where) {
    const auto v = get<long long>(obj, key, where);
    if (v < 0) {
        throw ConfigError(where + ": '" + key + "' must be nonnegative");
    }
    return static_cast<std::size_t>(v);
}

void check_schema(const json& doc) {
    if (!doc.contains("schema_version") || doc.at("schema_version") != kSchemaVersion) {
        throw ConfigError("schema_version must be " + std::to_string(kSchemaVersion));
    }
}

ScenarioConfig parse_setting(const json& s, const StudyConfig& study) {
    const std::string where = "setting '" + (s.contains("id") && s["id"].is_string() ? s["id"].get<std::string>() : "?") + "'";
    check_keys(s,
               {"id", "n", "p", "H", "r0", "lambda_r0", "spike_scheme", "gamma_scheme", "noise_law", "q",
                "pc_sigma2", "T", "exact_rotation"},
               where);
    ScenarioConfig c;
    c.id = get<std::string>(s, "id", where);
    c.n = get_size(s, "n", where);
    c.p = get_size(s, "p", where);
    c.H = parse_h_spec(get<std::string>(s, "H", where));
    c.r0 = get<int>(s, "r0", where);
    c.lambda_r0 = s.contains("lambda_r0") ? get<double>(s, "lambda_r0", where) : 0.0;
    c.master_seed = study.master_seed;
    c.T = s.contains("T") ? get<int>(s, "T", where) : study.T;
    c.q = s.contains("q") ? get<int>(s, "q", where) : 0;
    c.exact_rotation = s.contains("exact_rotation") ? get<bool>(s, "exact_rotation", where) : false;
    c.noise_law = s.contains("noise_law") ? parse_noise_law(get<std::string>(s, "noise_law", where))
                                          : NoiseLaw::gaussian;
    if (s.contains("spike_scheme")) {
        const auto& sp = s["spike_scheme"];
        std::string type;
        if (sp.is_string()) {
            type = sp.get<std::string>();
        } else {
            check_keys(sp, {"type", "lambda1", "alpha"}, where + " spike_scheme");
            type = get<std::string>(sp, "type", where);
        }
        if (type == "uniform_shift") {
            c.spike_scheme = SpikeScheme::uniform_shift;
        } else if (type == "explicit_lambda1") {
            c.spike_scheme = SpikeScheme::explicit_lambda1;
            c.lambda1 = get<double>(sp, "lambda1", where);
        } else if (type == "geometric") {
            c.spike_scheme = SpikeScheme::geometric;
            c.alpha = get<double>(sp, "alpha", where);
        } else {
            throw ConfigError(where + ": unknown spike_scheme '" + type + "'");
        }
    }
    if (s.contains("gamma_scheme")) {
        const auto& gs = s["gamma_scheme"];
        std::string type;
        if (gs.is_string()) {
            type = gs.get<std::string>();
        } else {
            check_keys(gs, {"type", "K"}, where + " gamma_scheme");
            type = get<std::string>(gs, "type", where);
        }
        if (type == "haar") {
            c.gamma_scheme = GammaScheme::haar;
        } else if (type == "block") {
            c.gamma_scheme = GammaScheme::block;
            c.blocks = get_size(gs, "K", where);
        } else {
            throw ConfigError(where + ": unknown gamma_scheme '" + type + "'");
        }
    }
    if (s.contains("pc_sigma2")) {
        const auto& v = s["pc_sigma2"];
        if (v.is_number()) {
            c.pc_sigma = PcSigma::value;
            c.pc_sigma2 = v.get<double>();
        } else if (v == "mu_H") {
            c.pc_sigma = PcSigma::mu_H;
        } else if (v == "estimate") {
            c.pc_sigma = PcSigma::estimate;
        } else {
            throw ConfigError(where + ": pc_sigma2 must be \"mu_H\", \"estimate\" or a number");
        }
    }
    c.validate();
    return c;
}

std::string spike_label(const ScenarioConfig& c) {
    switch (c.spike_scheme) {
        case SpikeScheme::uniform_shift: return "uniform_shift";
        case SpikeScheme::explicit_lambda1: return "explicit_lambda1(" + format_double(c.lambda1) + ")";
        case SpikeScheme::geometric: return "geometric(" + format_double(c.alpha) + ")";
    }
    return "?";
}

std::string gamma_label(const ScenarioConfig& c) {
    return c.gamma_scheme == GammaScheme::haar ? "haar" : "block(" + std::to_string(c.blocks) + ")";
}

}  // namespace

StudyConfig parse_study(const json& doc) {
    check_keys(doc, {"schema_version", "name", "master_seed", "T", "methods", "settings"}, "study");
    check_schema(doc);
    StudyConfig study;
    study.name = doc.contains("name") ? get<std::string>(doc, "name", "study") : "study";
    study.master_seed = get<std::uint64_t>(doc, "master_seed", "study");
    study.T = doc.contains("T") ? get<int>(doc, "T", "study") : 100;
    const auto& methods = doc.at("methods");
    if (methods.is_string()) {
        study.methods = parse_methods(methods.get<std::string>());
    } else if (methods.is_array()) {
        for (const auto& m : methods) {
            study.methods.push_back(parse_method(m.get<std::string>()));
        }
    } else {
        throw ConfigError("study: methods must be a list or a string");
    }
    if (study.methods.empty()) {
        throw ConfigError("study: no methods");
    }
    if (!doc.contains("settings") || !doc["settings"].is_array() || doc["settings"].empty()) {
        throw ConfigError("study: settings must be a nonempty list");
    }
    std::set<std::string> ids;
    for (const auto& s : doc["settings"]) {
        auto c = parse_setting(s, study);
        if (!ids.insert(c.id).second) {
            throw ConfigError("study: duplicate setting id '" + c.id + "'");
        }
        study.settings.push_back(std::move(c));
    }
    return study;
}

StudyConfig load_study(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_study(doc);
}

std::vector<GapSetting> load_gap_settings(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    check_keys(doc, {"schema_version", "name", "settings"}, "gap settings");
    check_schema(doc);
    std::vector<GapSetting> out;
    for (const auto& s : doc.at("settings")) {
        const std::string where = "gap setting";
        check_keys(s, {"id", "n", "p", "H", "lambda_r0"}, where);
        GapSetting g;
        g.id = get<std::string>(s, "id", where);
        g.n = get_size(s, "n", where);
        g.p = get_size(s, "p", where);
        g.H = parse_h_spec(get<std::string>(s, "H", where));
        g.lambda_r0 = get<double>(s, "lambda_r0", where);
        if (g.n < 1 || g.p < 1) {
            throw ConfigError(where + " '" + g.id + "': n and p must be positive");
        }
        out.push_back(std::move(g));
    }
    return out;
}

std::string accuracy_csv(std::span<const AccuracyTable> tables) {
    std::string out = csv_row({"setting", "n", "p", "H", "r0", "lambda_r0", "spike_scheme", "gamma_scheme",
                               "noise_law", "q", "T", "method", "hit_rate", "mean_r_hat", "failures",
                               "gap_first", "gap_second", "gap_flag"});
    for (const auto& t : tables) {
        const auto& c = t.config;
        for (const auto& row : t.rows) {
            std::vector<std::string> f{c.id,
                                       std::to_string(c.n),
                                       std::to_string(c.p),
                                       c.H.to_string(),
                                       std::to_string(c.r0),
                                       format_double(c.lambda_r0),
                                       spike_label(c),
                                       gamma_label(c),
                                       std::string(noise_law_name(c.noise_law)),
                                       std::to_string(c.effective_q()),
                                       std::to_string(c.T),
                                       std::string(method_name(row.method)),
                                       format_double(row.hit_rate),
                                       std::isfinite(row.mean_r_hat) ? format_double(row.mean_r_hat) : "",
                                       std::to_string(row.failures)};
            if (row.gap) {
                f.push_back(row.gap->first_ok ? "T" : "F");
                f.push_back(row.gap->second_ok ? "T" : "F");
                f.push_back(row.gap->ok() ? "T" : "F");
            } else {
                f.insert(f.end(), {"", "", ""});
            }
            out += csv_row(f);
        }
    }
    return out;
}

std::string config_digest(const json& doc) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash_string(doc.dump())));
    return buf;
}

}  // namespace rankspectra
