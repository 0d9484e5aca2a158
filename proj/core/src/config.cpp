#include "ddspde/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace ddspde {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "experiment", "problem",  "grid",       "kmax",
        "delta",      "strips",   "overlap",    "h_list",
        "h_ref",      "samples",  "seed",       "out",
        "t_final",    "dump_partition",          "dump_fields_every",
        "moment_study"};
    return keys;
}

std::string trim(const std::string& text) {
    std::size_t a = 0, b = text.size();
    while (a < b && std::isspace(static_cast<unsigned char>(text[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
    return text.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError("config error: key '" + key + "': " + what);
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long parsed = std::stol(value, &pos);
        if (pos != value.size()) fail(key, "trailing characters in '" + value + "'");
        return parsed;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail(key, "expected an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double parsed = std::stod(value, &pos);
        if (pos != value.size()) fail(key, "trailing characters in '" + value + "'");
        return parsed;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail(key, "expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "on") return true;
    if (value == "0" || value == "false" || value == "off") return false;
    fail(key, "expected a boolean (0/1/true/false/on/off), got '" + value + "'");
}

std::string bool_text(bool v) { return v ? "1" : "0"; }

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "experiment") {
        if (value == "exp1") {
            cfg.experiment = Experiment::Exp1;
        } else if (value == "exp2") {
            cfg.experiment = Experiment::Exp2;
        } else if (value == "custom") {
            cfg.experiment = Experiment::Custom;
        } else {
            fail(key, "expected one of exp1|exp2|custom, got '" + value + "'");
        }
    } else if (key == "problem") {
        if (value == "exp1") {
            cfg.problem = CustomProblem::Exp1;
        } else if (value == "exp2") {
            cfg.problem = CustomProblem::Exp2;
        } else if (value == "heat") {
            cfg.problem = CustomProblem::Heat;
        } else {
            fail(key, "expected one of exp1|exp2|heat, got '" + value + "'");
        }
    } else if (key == "grid") {
        cfg.grid_n = static_cast<int>(parse_long(key, value));
    } else if (key == "kmax") {
        cfg.k_max = static_cast<int>(parse_long(key, value));
    } else if (key == "delta") {
        cfg.delta = parse_double(key, value);
    } else if (key == "strips") {
        cfg.strips = static_cast<int>(parse_long(key, value));
    } else if (key == "overlap") {
        cfg.overlap = parse_double(key, value);
    } else if (key == "h_list") {
        try {
            cfg.h_list = parse_step_list(value);
        } catch (const std::exception& e) {
            fail(key, e.what());
        }
    } else if (key == "h_ref") {
        try {
            cfg.h_ref = parse_step(value);
        } catch (const std::exception& e) {
            fail(key, e.what());
        }
    } else if (key == "samples") {
        cfg.samples = static_cast<int>(parse_long(key, value));
    } else if (key == "seed") {
        try {
            cfg.seed = parse_seed(value);
        } catch (const std::exception& e) {
            fail(key, e.what());
        }
    } else if (key == "out") {
        cfg.out_dir = value;
    } else if (key == "t_final") {
        cfg.t_final = parse_double(key, value);
    } else if (key == "dump_partition") {
        cfg.dump_partition = parse_bool(key, value);
    } else if (key == "dump_fields_every") {
        cfg.dump_fields_every = static_cast<int>(parse_long(key, value));
    } else if (key == "moment_study") {
        cfg.moment_study = parse_bool(key, value);
    } else {
        throw ConfigError("config error: unknown key '" + key + "'");
    }
}

}  // namespace

std::uint64_t parse_seed(const std::string& text) {
    const std::string value = trim(text);
    if (value.empty()) throw std::invalid_argument("seed: empty literal");
    const bool hex = value.size() > 2 && value[0] == '0' &&
                     (value[1] == 'x' || value[1] == 'X');
    std::size_t pos = 0;
    std::uint64_t parsed = 0;
    try {
        parsed = std::stoull(hex ? value.substr(2) : value, &pos, hex ? 16 : 10);
    } catch (const std::exception&) {
        throw std::invalid_argument("seed: expected decimal or 0x-hex, got '" +
                                    value + "'");
    }
    if (pos != (hex ? value.size() - 2 : value.size())) {
        throw std::invalid_argument("seed: trailing characters in '" + value + "'");
    }
    return parsed;
}

double parse_step(const std::string& text) {
    const std::string value = trim(text);
    if (value.rfind("2^", 0) == 0) {
        std::size_t pos = 0;
        const int exponent = std::stoi(value.substr(2), &pos);
        if (pos != value.size() - 2) {
            throw std::invalid_argument("step: trailing characters in '" + value + "'");
        }
        return std::ldexp(1.0, exponent);
    }
    std::size_t pos = 0;
    const double parsed = std::stod(value, &pos);
    if (pos != value.size()) {
        throw std::invalid_argument("step: trailing characters in '" + value + "'");
    }
    return parsed;
}

std::vector<double> parse_step_list(const std::string& text) {
    std::vector<double> steps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        steps.push_back(parse_step(item));
    }
    if (steps.empty()) {
        throw std::invalid_argument("step list: no values in '" + text + "'");
    }
    std::sort(steps.begin(), steps.end(), std::greater<>());
    return steps;
}

void validate(const RunConfig& cfg) {
    if (cfg.grid_n < 1) fail("grid", "must be >= 1");
    if (cfg.k_max < 1) fail("kmax", "must be >= 1");
    if (!(cfg.delta > 0.0)) fail("delta", "must be > 0");
    if (cfg.strips < 1) fail("strips", "must be >= 1");
    if (cfg.strips >= 2 && !(cfg.overlap > 0.0 && cfg.overlap < 1.0 / cfg.strips)) {
        fail("overlap", fmt17(cfg.overlap) + " violates 0 < overlap < 1/strips "
                        "(strips=" + std::to_string(cfg.strips) + ")");
    }
    if (!(cfg.t_final > 0.0)) fail("t_final", "must be > 0");
    if (cfg.experiment != Experiment::Custom && cfg.t_final != 1.0) {
        fail("t_final", "is fixed to 1 for exp1/exp2 (use experiment=custom)");
    }
    if (cfg.h_list.empty()) fail("h_list", "must not be empty");
    for (double h : cfg.h_list) {
        if (!(h > 0.0)) fail("h_list", "step sizes must be > 0");
        const long long N = std::llround(cfg.t_final / h);
        if (N < 1 || std::abs(N * h - cfg.t_final) > 1e-9 * cfg.t_final) {
            fail("h_list", fmt17(h) + " does not divide t_final=" +
                               fmt17(cfg.t_final) + " into whole steps");
        }
    }
    if (!(cfg.h_ref > 0.0)) fail("h_ref", "must be > 0");
    {
        const long long N = std::llround(cfg.t_final / cfg.h_ref);
        if (N < 1 || std::abs(N * cfg.h_ref - cfg.t_final) > 1e-9 * cfg.t_final) {
            fail("h_ref", "does not divide t_final into whole steps");
        }
    }
    const double h_min = *std::min_element(cfg.h_list.begin(), cfg.h_list.end());
    if (!(cfg.h_ref <= h_min)) {
        fail("h_ref", fmt17(cfg.h_ref) + " must not exceed the smallest h in h_list");
    }
    for (double h : cfg.h_list) {
        const long long r = std::llround(h / cfg.h_ref);
        if (r < 1 || std::abs(r * cfg.h_ref - h) > 1e-12) {
            fail("h_list", fmt17(h) + " is not a whole multiple of h_ref=" +
                               fmt17(cfg.h_ref));
        }
    }
    if (cfg.samples < 2) fail("samples", "must be >= 2");
    if (cfg.dump_fields_every < 0) fail("dump_fields_every", "must be >= 0");
    if (cfg.out_dir.empty()) fail("out", "must not be empty");
}

RunConfig apply_overrides(RunConfig base,
                          const std::map<std::string, std::string>& overrides) {
    // Experiment selection first so its defaults are in place before the
    // remaining keys override them.
    if (auto it = overrides.find("experiment"); it != overrides.end()) {
        apply_key(base, "experiment", it->second);
    }
    if (base.experiment == Experiment::Custom) {
        static const char* required[] = {"problem", "grid",    "kmax",
                                         "delta",   "strips",  "overlap",
                                         "h_list",  "h_ref",   "samples",
                                         "seed"};
        std::string missing;
        for (const char* key : required) {
            if (!overrides.contains(key)) {
                missing += missing.empty() ? key : std::string(", ") + key;
            }
        }
        if (!missing.empty()) {
            throw ConfigError(
                "config error: experiment=custom requires explicit keys: " + missing);
        }
    }
    for (const auto& [key, value] : overrides) {
        if (key == "experiment") continue;
        if (!known_keys().contains(key)) {
            throw ConfigError("config error: unknown key '" + key + "'");
        }
        apply_key(base, key, value);
    }
    validate(base);
    return base;
}

RunConfig parse_config(const std::map<std::string, std::string>& overrides) {
    return apply_overrides(RunConfig{}, overrides);
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config error: cannot open file '" + path + "'");
    }
    std::map<std::string, std::string> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config error: " + path + ":" +
                              std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys().contains(key)) {
            throw ConfigError("config error: " + path + ":" +
                              std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (entries.contains(key)) {
            throw ConfigError("config error: " + path + ":" +
                              std::to_string(line_no) + ": duplicate key '" + key +
                              "'");
        }
        entries[key] = value;
    }
    return parse_config(entries);
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    const char* experiment = cfg.experiment == Experiment::Exp1   ? "exp1"
                             : cfg.experiment == Experiment::Exp2 ? "exp2"
                                                                  : "custom";
    const char* problem = cfg.problem == CustomProblem::Exp1   ? "exp1"
                          : cfg.problem == CustomProblem::Exp2 ? "exp2"
                                                               : "heat";
    os << "experiment=" << experiment << "\n";
    os << "problem=" << problem << "\n";
    os << "grid=" << cfg.grid_n << "\n";
    os << "kmax=" << cfg.k_max << "\n";
    os << "delta=" << fmt17(cfg.delta) << "\n";
    os << "strips=" << cfg.strips << "\n";
    os << "overlap=" << fmt17(cfg.overlap) << "\n";
    os << "h_list=";
    for (std::size_t i = 0; i < cfg.h_list.size(); ++i) {
        os << (i > 0 ? "," : "") << fmt17(cfg.h_list[i]);
    }
    os << "\n";
    os << "h_ref=" << fmt17(cfg.h_ref) << "\n";
    os << "samples=" << cfg.samples << "\n";
    os << "seed=" << cfg.seed << "\n";
    os << "out=" << cfg.out_dir << "\n";
    os << "t_final=" << fmt17(cfg.t_final) << "\n";
    os << "dump_partition=" << bool_text(cfg.dump_partition) << "\n";
    os << "dump_fields_every=" << cfg.dump_fields_every << "\n";
    os << "moment_study=" << bool_text(cfg.moment_study) << "\n";
    return os.str();
}

}  // namespace ddspde
