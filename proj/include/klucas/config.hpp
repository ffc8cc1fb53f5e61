#pragma once

// Runtime configuration: defaults that reproduce the reference computation,
// overridable by a plain-text key=value file and then by command-line flags
// (flags win). The file path may come from the KLUCAS_CONFIG environment
// variable.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "klucas/parallel.hpp"
#include "klucas/roots.hpp"

namespace klucas {

struct PipelineConfig {
    long precision_cap_bits = kPrecisionCapBits;  // hard ceiling for interval refinement
    int margin_cap = 25;                          // scale-exponent increments, iterated case
    int retry_limit = 5;                          // lattice-scale retries, per-order case
    int round_limit = 4;                          // iterated-reduction rounds
    int k_lo = 2;                                 // sweep range, inclusive
    int k_hi = 1000;
    long n_max = 1449;  // index ceiling for the sweep
    int workers = default_worker_count();
    std::string output_dir = "certs";
    std::string checkpoint_path;  // empty disables checkpointing

    void validate() const {
        if (precision_cap_bits < 16) throw std::domain_error("config: precision_cap_bits >= 16");
        if (margin_cap < 1) throw std::domain_error("config: margin_cap >= 1");
        if (retry_limit < 1) throw std::domain_error("config: retry_limit >= 1");
        if (round_limit < 1) throw std::domain_error("config: round_limit >= 1");
        if (k_lo < 2) throw std::domain_error("config: k_lo >= 2");
        if (k_hi < k_lo) throw std::domain_error("config: k range is empty");
        if (n_max < 2) throw std::domain_error("config: n_max >= 2");
        if (workers < 1) throw std::domain_error("config: workers >= 1");
        if (output_dir.empty()) throw std::domain_error("config: output_dir is empty");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline long parse_config_integer(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(value, &used);
    } catch (const std::exception&) {
        throw std::domain_error("config: key '" + key + "' needs an integer, got '" + value + "'");
    }
    if (used != value.size())
        throw std::domain_error("config: key '" + key + "' needs an integer, got '" + value + "'");
    return v;
}

}  // namespace detail

// Applies one key=value assignment. Unknown keys are rejected so typos cannot
// silently fall back to defaults.
inline void apply_config_entry(PipelineConfig& cfg, const std::string& key,
                               const std::string& value) {
    if (key == "precision_cap_bits")
        cfg.precision_cap_bits = detail::parse_config_integer(key, value);
    else if (key == "margin_cap")
        cfg.margin_cap = static_cast<int>(detail::parse_config_integer(key, value));
    else if (key == "retry_limit")
        cfg.retry_limit = static_cast<int>(detail::parse_config_integer(key, value));
    else if (key == "round_limit")
        cfg.round_limit = static_cast<int>(detail::parse_config_integer(key, value));
    else if (key == "k_lo")
        cfg.k_lo = static_cast<int>(detail::parse_config_integer(key, value));
    else if (key == "k_hi")
        cfg.k_hi = static_cast<int>(detail::parse_config_integer(key, value));
    else if (key == "n_max")
        cfg.n_max = detail::parse_config_integer(key, value);
    else if (key == "workers")
        cfg.workers = static_cast<int>(detail::parse_config_integer(key, value));
    else if (key == "output_dir")
        cfg.output_dir = value;
    else if (key == "checkpoint_path")
        cfg.checkpoint_path = value;
    else
        throw std::domain_error("config: unknown key '" + key + "'");
}

// Parses key=value text: one assignment per line, blank lines and lines whose
// first nonblank character is '#' ignored.
inline void apply_config_text(PipelineConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::domain_error("config: line " + std::to_string(lineno) +
                                    " is not key=value: '" + t + "'");
        apply_config_entry(cfg, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    }
}

inline void load_config_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_config_text(cfg, buf.str());
}

// Defaults, then the KLUCAS_CONFIG file when that variable is set. Flag
// overrides are applied by the caller afterwards, so flags win.
inline PipelineConfig resolved_config() {
    PipelineConfig cfg;
    if (const char* path = std::getenv("KLUCAS_CONFIG")) {
        if (path[0] != '\0') load_config_file(cfg, path);
    }
    return cfg;
}

}  // namespace klucas
