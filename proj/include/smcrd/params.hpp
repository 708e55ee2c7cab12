#pragma once
//
// Nondimensional parameter set for the coupled smooth-muscle-cell membrane
// model, plus plain-text config loading (key = value, one per line).
//
// Gating potentials v1..v4 set the half-activation voltages and slopes of the
// Ca2+ and K+ channel steady states, psi is the K+ gating rate constant, and
// gL/gK/gCa, vL/vK/vCa are conductances and reversal potentials. D is the
// electrical coupling (diffusion) coefficient of the voltage equation.
//
#include <string>
#include <string_view>
#include <vector>
#include <stdexcept>

namespace smcrd {

struct ModelParams {
    double v1 = -0.2813;
    double v2 = 0.3125;
    double v3 = -0.1380;
    double v4 = 0.1812;
    double psi = 0.1665;
    double gL = 0.25;
    double gK = 1.0;
    double gCa = 0.4997;
    double vL = -0.875;
    double vK = -1.125;
    double vCa = 1.0;
    double D = 1e-4;
};

struct CellState {
    double V = 0.0;  // membrane potential
    double N = 0.0;  // fraction of open K+ channels
};

// A fully resolved run configuration: model constants plus the half-domain
// length used by the spatial solver.
struct RunConfig {
    ModelParams params;
    double L = 1.0;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::vector<std::string> errs = {})
        : std::runtime_error(what), errors(std::move(errs)) {}
    std::vector<std::string> errors;
};

// Invariant checks (psi > 0, v2/v4 nonzero, nonnegative conductances and D).
// Returns one message per violation; empty means valid.
std::vector<std::string> validate(const ModelParams& p);
std::vector<std::string> validate(const RunConfig& cfg);

// Set a parameter by its config key ("v1", "psi", "D", ...). Throws
// std::invalid_argument for unknown keys. "L" is not a model parameter.
void set_param(ModelParams& p, std::string_view key, double value);
double get_param(const ModelParams& p, std::string_view key);

// Parse config text / file. Missing keys keep their defaults; unknown keys
// and invariant violations are collected and reported together.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Render a config (all keys) as the same key = value format that parses back
// bit-identically; used for meta.txt echoes.
std::string render_config(const RunConfig& cfg);

}  // namespace smcrd
