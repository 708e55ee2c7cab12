#pragma once
//
// Canned pipelines reproducing the study figures: bifurcation diagrams,
// space-time simulation panels, and the travelling-wave constructions, each
// writing plot-ready CSVs plus meta.txt and summary.txt into its own output
// directory.
//
#include <string>
#include <vector>

#include "smcrd/pde.hpp"

namespace smcrd {

// Operating point used by the travelling-wave studies and the psi-panels:
// the K+ half-activation offset v1 at which the cell has three equilibria
// (stable bottom state, saddle, excitable top state) and the measured pulse
// and front speeds match the wave-coordinate shooting results.
inline constexpr double kWaveOperatingV1 = -0.2465;

struct ReproResult {
    std::string figure_id;
    std::string out_dir;
    std::string summary;                 // contents of summary.txt
    PatternClass pattern = PatternClass::Complex;  // for simulation recipes
    double wave_speed = 0.0;             // 0 when not applicable
};

std::vector<std::string> repro_figure_ids();

// Runs one recipe; group ids ("5.1", "5.4", ...) run all panels. jobs > 1
// parallelizes panels of a group. Throws std::invalid_argument for unknown
// ids.
ReproResult repro(const std::string& figure_id, const std::string& out_root, int jobs = 1);

}  // namespace smcrd
