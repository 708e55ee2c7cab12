#include "smcrd/params.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace smcrd {
namespace {

struct KeySlot {
    const char* key;
    double ModelParams::* member;
};

constexpr std::array<KeySlot, 12> kSlots = {{
    {"v1", &ModelParams::v1},   {"v2", &ModelParams::v2},
    {"v3", &ModelParams::v3},   {"v4", &ModelParams::v4},
    {"psi", &ModelParams::psi}, {"gL", &ModelParams::gL},
    {"gK", &ModelParams::gK},   {"gCa", &ModelParams::gCa},
    {"vL", &ModelParams::vL},   {"vK", &ModelParams::vK},
    {"vCa", &ModelParams::vCa}, {"D", &ModelParams::D},
}};

std::string trim(std::string_view s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string_view::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(a, b - a + 1));
}

}  // namespace

void set_param(ModelParams& p, std::string_view key, double value) {
    for (const auto& slot : kSlots)
        if (key == slot.key) {
            p.*(slot.member) = value;
            return;
        }
    throw std::invalid_argument("unknown parameter key: " + std::string(key));
}

double get_param(const ModelParams& p, std::string_view key) {
    for (const auto& slot : kSlots)
        if (key == slot.key) return p.*(slot.member);
    throw std::invalid_argument("unknown parameter key: " + std::string(key));
}

std::vector<std::string> validate(const ModelParams& p) {
    std::vector<std::string> errs;
    if (!(p.psi > 0)) errs.push_back("psi must be > 0 (got " + std::to_string(p.psi) + ")");
    if (p.v2 == 0) errs.push_back("v2 must be nonzero");
    if (p.v4 == 0) errs.push_back("v4 must be nonzero");
    if (!(p.D >= 0)) errs.push_back("D must be >= 0 (got " + std::to_string(p.D) + ")");
    if (!(p.gL >= 0)) errs.push_back("gL must be >= 0");
    if (!(p.gK >= 0)) errs.push_back("gK must be >= 0");
    if (!(p.gCa >= 0)) errs.push_back("gCa must be >= 0");
    return errs;
}

std::vector<std::string> validate(const RunConfig& cfg) {
    std::vector<std::string> errs = validate(cfg.params);
    if (!(cfg.L > 0)) errs.push_back("L must be > 0 (got " + std::to_string(cfg.L) + ")");
    return errs;
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::vector<std::string> errs;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos) {
            errs.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        char* end = nullptr;
        double x = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || *end != '\0') {
            errs.push_back("line " + std::to_string(lineno) + ": bad number '" + val + "' for key " + key);
            continue;
        }
        if (key == "L") {
            cfg.L = x;
        } else {
            try {
                set_param(cfg.params, key, x);
            } catch (const std::invalid_argument&) {
                errs.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            }
        }
    }
    for (auto& e : validate(cfg)) errs.push_back(e);
    if (!errs.empty()) {
        std::string what = "config has " + std::to_string(errs.size()) + " error(s)";
        for (auto& e : errs) what += "\n  " + e;
        throw ConfigError(what, errs);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path, {"cannot open " + path});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string render_config(const RunConfig& cfg) {
    char buf[64];
    std::string out;
    for (const auto& slot : kSlots) {
        std::snprintf(buf, sizeof buf, "%s = %.17g\n", slot.key, cfg.params.*(slot.member));
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "L = %.17g\n", cfg.L);
    out += buf;
    return out;
}

}  // namespace smcrd
