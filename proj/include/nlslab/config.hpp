#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nlslab/errors.hpp"

namespace nlslab {

/// Run configuration. Parsed from a flat key-value file with [section]
/// headers; command-line flags override file values. See configs/ for the
/// schema and examples.
struct Config {
    double a = -1.0;
    double b = 1.0;
    int n = 256;
    double beta = 1.0;
    double alpha = 1.0;

    // nonlinearity
    double theta = 0.0;
    double p = 1.2;
    double m = 1.0;
    std::string sign = "nonpositive";  // nonpositive | nonnegative | signed

    // boundary atoms
    double zeta_a = 1.0;
    double zeta_b = 1.0;

    double tol = 1e-8;
    int max_iter = 400;
    unsigned seed = 1;
    std::string out_dir = "out";

    // sweep parameters
    double p_min = 1.2;
    double p_max = 1.8;
    double p_step = 0.2;
    std::vector<int> n_levels = {256, 512, 1024};
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace detail

/// Parses "[section]" / "key = value" lines into dotted keys. '#' starts a
/// comment. Unknown keys are an error so typos cannot silently change runs.
inline std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(lineno) +
                               ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        kv[key] = detail::trim(line.substr(eq + 1));
    }
    return kv;
}

inline Config config_from_map(const std::map<std::string, std::string>& kv) {
    Config c;
    std::vector<std::string> errors;
    const auto num = [&](const std::string& key, double& slot) {
        try {
            std::size_t pos = 0;
            slot = std::stod(kv.at(key), &pos);
            if (pos != kv.at(key).size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            errors.push_back(key + ": not a number: '" + kv.at(key) + "'");
        }
    };
    for (const auto& [key, value] : kv) {
        if (key == "domain.a") num(key, c.a);
        else if (key == "domain.b") num(key, c.b);
        else if (key == "grid.n") { double v; num(key, v); c.n = static_cast<int>(v); }
        else if (key == "operator.beta") num(key, c.beta);
        else if (key == "operator.alpha") num(key, c.alpha);
        else if (key == "nonlinearity.theta") num(key, c.theta);
        else if (key == "nonlinearity.p") num(key, c.p);
        else if (key == "nonlinearity.m") num(key, c.m);
        else if (key == "nonlinearity.sign") c.sign = value;
        else if (key == "boundary.zeta_a") num(key, c.zeta_a);
        else if (key == "boundary.zeta_b") num(key, c.zeta_b);
        else if (key == "run.tol") num(key, c.tol);
        else if (key == "run.max_iter") { double v; num(key, v); c.max_iter = static_cast<int>(v); }
        else if (key == "run.seed") { double v; num(key, v); c.seed = static_cast<unsigned>(v); }
        else if (key == "run.out") c.out_dir = value;
        else if (key == "sweep.p_min") num(key, c.p_min);
        else if (key == "sweep.p_max") num(key, c.p_max);
        else if (key == "sweep.p_step") num(key, c.p_step);
        else if (key == "sweep.n_levels") {
            c.n_levels.clear();
            std::istringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ','))
                c.n_levels.push_back(std::stoi(detail::trim(tok)));
        } else {
            errors.push_back("unknown key: " + key);
        }
    }
    if (!errors.empty()) {
        std::string msg = "config errors:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw config_error(msg);
    }
    return c;
}

/// Cross-field validation against the module preconditions; all failures
/// are aggregated into one report.
inline void validate(const Config& c) {
    std::vector<std::string> errors;
    if (!(c.a < c.b)) errors.push_back("domain: requires a < b");
    if (c.n < 16) errors.push_back("grid: requires n >= 16, got " + std::to_string(c.n));
    if (!(c.beta > 0 && c.beta < 2))
        errors.push_back("operator: requires beta in (0,2)");
    if (!(c.alpha > 0 && c.alpha < 2))
        errors.push_back("operator: requires alpha in (0,2)");
    if (!(c.p > 0)) errors.push_back("nonlinearity: requires p > 0");
    if (!(c.m > 0)) errors.push_back("nonlinearity: requires m > 0");
    if (c.sign != "nonpositive" && c.sign != "nonnegative" && c.sign != "signed")
        errors.push_back("nonlinearity: sign must be nonpositive|nonnegative|signed");
    if (!(c.tol > 0)) errors.push_back("run: requires tol > 0");
    if (c.max_iter < 1) errors.push_back("run: requires max_iter >= 1");
    if (!(c.p_step > 0)) errors.push_back("sweep: requires p_step > 0");
    if (!(c.p_min <= c.p_max)) errors.push_back("sweep: requires p_min <= p_max");
    for (int n : c.n_levels)
        if (n < 16) errors.push_back("sweep: every n level must be >= 16");
    if (!errors.empty()) {
        std::string msg = "config errors:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw config_error(msg);
    }
}

}  // namespace nlslab
