#pragma once
//
// CSV and text output. Numbers are serialized with 17 significant digits so
// files round-trip bit-exactly.
//
#include <string>
#include <utility>
#include <vector>

#include "smcrd/pde.hpp"
#include "smcrd/singlecell.hpp"
#include "smcrd/turing.hpp"
#include "smcrd/waves.hpp"

namespace smcrd {

std::string num17(double x);
void ensure_dir(const std::string& path);
void write_text(const std::string& path, const std::string& content);

// Space-time table: header "tau,x0,x1,..." carrying the node coordinates,
// then one row per snapshot (tau, value at each node).
void write_spacetime_csv(const std::string& path, const std::vector<Field>& snaps,
                         const Grid& g, char component);  // 'V' or 'N'

struct SpacetimeData {
    std::vector<double> x;
    std::vector<Field> snaps;  // V filled from the file, N empty
    Grid grid;                 // reconstructed from the header coordinates
};
SpacetimeData read_spacetime_csv(const std::string& path);

void write_branches_csv(const std::string& path, const BifurcationScan& scan);
void write_events_csv(const std::string& path, const BifurcationScan& scan);
void write_cycles_csv(const std::string& path, const BifurcationScan& scan);
void write_dispersion_csv(const std::string& path, const DispersionResult& d);
void write_orbit_csv(const std::string& path, const TravellingWaveOrbit& orbit);
void write_eigen_csv(const std::string& path, const WaveEquilibrium& source,
                     const WaveEquilibrium& target);

}  // namespace smcrd
