#include "smcrd/output.hpp"

#include <sys/stat.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace smcrd {

std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void ensure_dir(const std::string& path) {
    std::string acc;
    for (size_t i = 0; i <= path.size(); ++i) {
        if (i == path.size() || path[i] == '/') {
            if (!acc.empty() && acc != ".") ::mkdir(acc.c_str(), 0775);
        }
        if (i < path.size()) acc += path[i];
    }
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

void write_spacetime_csv(const std::string& path, const std::vector<Field>& snaps,
                         const Grid& g, char component) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "tau";
    for (int i = 0; i < g.n_points; ++i) out << ',' << num17(g.x(i));
    out << '\n';
    for (const auto& f : snaps) {
        out << num17(f.time);
        const auto& arr = (component == 'N') ? f.N : f.V;
        for (double v : arr) out << ',' << num17(v);
        out << '\n';
    }
}

SpacetimeData read_spacetime_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    SpacetimeData d;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty space-time file: " + path);
    {
        std::istringstream hs(line);
        std::string cell;
        std::getline(hs, cell, ',');  // "tau"
        while (std::getline(hs, cell, ',')) d.x.push_back(std::strtod(cell.c_str(), nullptr));
    }
    if (d.x.size() < 3) throw std::runtime_error("space-time header too short: " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        Field f;
        std::getline(ls, cell, ',');
        f.time = std::strtod(cell.c_str(), nullptr);
        f.V.reserve(d.x.size());
        while (std::getline(ls, cell, ',')) f.V.push_back(std::strtod(cell.c_str(), nullptr));
        if (f.V.size() != d.x.size())
            throw std::runtime_error("ragged space-time row in " + path);
        d.snaps.push_back(std::move(f));
    }
    d.grid.L = std::max(std::abs(d.x.front()), std::abs(d.x.back()));
    d.grid.n_points = int(d.x.size());
    d.grid.n_per_unit = std::max(1, int(std::lround((d.x.size() - 1) / (2.0 * d.grid.L))));
    return d;
}

void write_branches_csv(const std::string& path, const BifurcationScan& scan) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "param,branch_id,V,N,re_lambda1,im_lambda1,re_lambda2,im_lambda2,stability\n";
    for (const auto& bp : scan.points) {
        out << num17(bp.param_value) << ',' << bp.branch_id << ',' << num17(bp.eq.state.V) << ','
            << num17(bp.eq.state.N) << ',' << num17(bp.eq.lambda1.real()) << ','
            << num17(bp.eq.lambda1.imag()) << ',' << num17(bp.eq.lambda2.real()) << ','
            << num17(bp.eq.lambda2.imag()) << ',' << to_string(bp.eq.stability) << '\n';
    }
}

void write_events_csv(const std::string& path, const BifurcationScan& scan) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "param,kind,evidence\n";
    for (const auto& e : scan.events) {
        std::string ev = e.evidence;
        for (auto& ch : ev)
            if (ch == ',') ch = ';';
        out << num17(e.param_value) << ',' << to_string(e.kind) << ',' << ev << '\n';
    }
}

void write_cycles_csv(const std::string& path, const BifurcationScan& scan) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "param,period,v_min,v_max\n";
    for (const auto& c : scan.cycles)
        out << num17(c.param_value) << ',' << num17(c.period) << ',' << num17(c.v_min) << ','
            << num17(c.v_max) << '\n';
}

void write_dispersion_csv(const std::string& path, const DispersionResult& d) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "k,T,Delta,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus\n";
    for (size_t i = 0; i < d.k.size(); ++i) {
        out << num17(d.k[i]) << ',' << num17(d.trace[i]) << ',' << num17(d.det[i]) << ','
            << num17(d.lambda_plus[i].real()) << ',' << num17(d.lambda_plus[i].imag()) << ','
            << num17(d.lambda_minus[i].real()) << ',' << num17(d.lambda_minus[i].imag()) << '\n';
    }
}

void write_orbit_csv(const std::string& path, const TravellingWaveOrbit& orbit) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "zeta,V,W,N\n";
    for (const auto& [z, s] : orbit.trajectory)
        out << num17(z) << ',' << num17(s.V) << ',' << num17(s.W) << ',' << num17(s.N) << '\n';
}

void write_eigen_csv(const std::string& path, const WaveEquilibrium& source,
                     const WaveEquilibrium& target) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "equilibrium,V,N,re_lambda,im_lambda\n";
    auto emit = [&](const char* tag, const WaveEquilibrium& w) {
        for (const auto& lam : w.eigenvalues)
            out << tag << ',' << num17(w.state.V) << ',' << num17(w.state.N) << ','
                << num17(lam.real()) << ',' << num17(lam.imag()) << '\n';
    };
    emit("source", source);
    emit("target", target);
}

}  // namespace smcrd
