#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "flowerbed/errors.hpp"
#include "flowerbed/shortening.hpp"

namespace flowerbed {

// Experiment description: which model, which seeds, flow settings, and what
// to emit. Parsed from a plain `key = value` text file; unknown keys are
// hard errors with file:line positions so typos never silently change runs.
struct ExperimentConfig {
    std::string model_kind = "sphere";
    std::map<std::string, double> model_params;

    int random_flowers = 0;    // seeds.random
    int random_cages = 0;      // seeds.cages (alternating 2- and 3-cages)
    uint64_t rng_seed = 1;     // seeds.rng
    std::vector<std::string> flower_files;  // seed.flower.<i> = path
    std::vector<std::string> cage_files;    // seed.cage.<i> = path

    FlowConfig flow;
    double certify_delta = 1e-3;

    std::string out_dir = "out";
    bool emit_csv = true;
    bool emit_json = true;
    bool emit_svg = false;
    int threads = 0;  // 0 = hardware concurrency
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_num(const std::string& file, int line, const std::string& v) {
    const char* c = v.c_str();
    char* end = nullptr;
    double d = std::strtod(c, &end);
    if (end == c || *end != '\0')
        throw ConfigError(file, line, "expected a number, got '" + v + "'");
    return d;
}

inline int parse_int(const std::string& file, int line, const std::string& v) {
    double d = parse_num(file, line, v);
    int i = int(d);
    if (double(i) != d)
        throw ConfigError(file, line, "expected an integer, got '" + v + "'");
    return i;
}

inline bool parse_bool(const std::string& file, int line, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(file, line, "expected true/false, got '" + v + "'");
}

}  // namespace detail

inline ExperimentConfig parse_config_text(const std::string& text,
                                          const std::string& file_name) {
    ExperimentConfig cfg;
    std::map<int, std::string> flower_idx, cage_idx;
    std::map<std::string, int> seen;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty()) continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(file_name, line, "expected 'key = value'");
        std::string key = detail::trim(s.substr(0, eq));
        std::string val = detail::trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError(file_name, line, "empty key");
        if (val.empty()) throw ConfigError(file_name, line, "empty value for '" + key + "'");
        if (seen.count(key))
            throw ConfigError(file_name, line,
                              "duplicate key '" + key + "' (first at line " +
                                  std::to_string(seen[key]) + ")");
        seen[key] = line;

        auto num = [&] { return detail::parse_num(file_name, line, val); };
        auto integer = [&] { return detail::parse_int(file_name, line, val); };
        auto boolean = [&] { return detail::parse_bool(file_name, line, val); };

        if (key == "model") {
            cfg.model_kind = val;
        } else if (key.rfind("model.", 0) == 0) {
            cfg.model_params[key.substr(6)] = num();
        } else if (key == "seeds.random") {
            cfg.random_flowers = integer();
        } else if (key == "seeds.cages") {
            cfg.random_cages = integer();
        } else if (key == "seeds.rng") {
            long long v = integer();
            if (v < 0) throw ConfigError(file_name, line, "seeds.rng must be >= 0");
            cfg.rng_seed = uint64_t(v);
        } else if (key.rfind("seed.flower.", 0) == 0) {
            flower_idx[detail::parse_int(file_name, line, key.substr(12))] = val;
        } else if (key.rfind("seed.cage.", 0) == 0) {
            cage_idx[detail::parse_int(file_name, line, key.substr(10))] = val;
        } else if (key == "flow.k_subdiv") {
            cfg.flow.k_subdiv = integer();
        } else if (key == "flow.vertex_step0") {
            cfg.flow.vertex_step0 = num();
        } else if (key == "flow.backtrack_factor") {
            cfg.flow.backtrack_factor = num();
        } else if (key == "flow.max_iters") {
            cfg.flow.max_iters = integer();
        } else if (key == "flow.tol_v") {
            cfg.flow.tol_v = num();
        } else if (key == "flow.tol_e") {
            cfg.flow.tol_e = num();
        } else if (key == "flow.contraction_radius") {
            cfg.flow.contraction_radius = num();
        } else if (key == "certify.delta") {
            cfg.certify_delta = num();
        } else if (key == "output.dir") {
            cfg.out_dir = val;
        } else if (key == "emit.csv") {
            cfg.emit_csv = boolean();
        } else if (key == "emit.json") {
            cfg.emit_json = boolean();
        } else if (key == "emit.svg") {
            cfg.emit_svg = boolean();
        } else if (key == "threads") {
            cfg.threads = integer();
        } else {
            throw ConfigError(file_name, line, "unknown key '" + key + "'");
        }
    }
    for (auto& [i, path] : flower_idx) cfg.flower_files.push_back(path);
    for (auto& [i, path] : cage_idx) cfg.cage_files.push_back(path);

    try {
        cfg.flow.check();
    } catch (const Error& e) {
        throw ConfigError(file_name, 0, std::string("flow settings: ") + e.what());
    }
    if (cfg.random_flowers < 0 || cfg.random_cages < 0)
        throw ConfigError(file_name, 0, "seed counts must be >= 0");
    if (cfg.threads < 0) throw ConfigError(file_name, 0, "threads must be >= 0");
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

// Inverse of the parser; parse(write(cfg)) reproduces cfg exactly.
inline std::string write_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    auto g = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "model = " << cfg.model_kind << "\n";
    for (const auto& [k, v] : cfg.model_params)
        out << "model." << k << " = " << g(v) << "\n";
    out << "seeds.random = " << cfg.random_flowers << "\n";
    out << "seeds.cages = " << cfg.random_cages << "\n";
    out << "seeds.rng = " << cfg.rng_seed << "\n";
    for (size_t i = 0; i < cfg.flower_files.size(); ++i)
        out << "seed.flower." << i << " = " << cfg.flower_files[i] << "\n";
    for (size_t i = 0; i < cfg.cage_files.size(); ++i)
        out << "seed.cage." << i << " = " << cfg.cage_files[i] << "\n";
    out << "flow.k_subdiv = " << cfg.flow.k_subdiv << "\n";
    out << "flow.vertex_step0 = " << g(cfg.flow.vertex_step0) << "\n";
    out << "flow.backtrack_factor = " << g(cfg.flow.backtrack_factor) << "\n";
    out << "flow.max_iters = " << cfg.flow.max_iters << "\n";
    out << "flow.tol_v = " << g(cfg.flow.tol_v) << "\n";
    out << "flow.tol_e = " << g(cfg.flow.tol_e) << "\n";
    out << "flow.contraction_radius = " << g(cfg.flow.contraction_radius) << "\n";
    out << "certify.delta = " << g(cfg.certify_delta) << "\n";
    out << "output.dir = " << cfg.out_dir << "\n";
    out << "emit.csv = " << (cfg.emit_csv ? "true" : "false") << "\n";
    out << "emit.json = " << (cfg.emit_json ? "true" : "false") << "\n";
    out << "emit.svg = " << (cfg.emit_svg ? "true" : "false") << "\n";
    out << "threads = " << cfg.threads << "\n";
    return out.str();
}

}  // namespace flowerbed
