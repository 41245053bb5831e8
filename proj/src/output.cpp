#include "pfs/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pfs/config.hpp"

#ifndef PFS_VERSION
#define PFS_VERSION "0.0.0"
#endif

namespace pfs {

namespace fs = std::filesystem;

namespace {

using File = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

File open_for_write(const fs::path& p) {
    File f(std::fopen(p.string().c_str(), "w"), &std::fclose);
    if (!f) {
        throw std::runtime_error("output: cannot write '" + p.string() + "'");
    }
    return f;
}

struct CellOutput {
    double u, ratio, p, head;
};

CellOutput derived(const FlowState& s, const CellGeometry& cell, const FluidConstants& fluid) {
    return {s.velocity(), density_ratio(s.A, s.E, cell.S), pressure(s.A, s.E, cell, fluid),
            total_head(s, cell, fluid)};
}

}  // namespace

std::string version_string() { return PFS_VERSION; }

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = version;
    j["wall_seconds"] = wall_seconds;
    j["files"] = files;
    j["config"] = config;
    return j.dump(2) + "\n";
}

RunManifest emit_outputs(const Trajectory& traj, const Mesh& mesh, const SimConfig& config,
                         const std::string& out_dir, double wall_seconds) {
    if (traj.snapshots.empty()) {
        throw std::invalid_argument("output: empty trajectory");
    }
    const fs::path dir(out_dir.empty() ? "." : out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("output: cannot create '" + dir.string() + "': " + ec.message());
    }
    RunManifest m;
    m.config = serialize_config(config);
    m.version = version_string();
    m.wall_seconds = wall_seconds;

    {
        const auto path = dir / "snapshots.csv";
        auto f = open_for_write(path);
        std::fputs("t,x,A,Q,E,S,u,density_ratio,p,head\n", f.get());
        for (const auto& snap : traj.snapshots) {
            for (std::size_t i = 0; i < mesh.size(); ++i) {
                const auto& s = snap.states[i];
                const auto& cell = mesh.cells[i];
                const auto d = derived(s, cell, traj.fluid);
                std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", snap.t,
                             cell.X_center, s.A, s.Q, indicator(s.E), cell.S, d.u, d.ratio, d.p, d.head);
            }
        }
        m.files.push_back(path.string());
    }
    {
        const auto path = dir / "diagnostics.csv";
        auto f = open_for_write(path);
        std::fputs("t,step,total_A,total_entropy,entropy_flux_boundary,max_abs_u,max_density_ratio,head_spread,"
                   "E_fronts\n",
                   f.get());
        for (const auto& snap : traj.snapshots) {
            const auto& r = snap.diagnostics;
            std::string fronts;
            for (auto p : r.E_front_positions) {
                fronts += (fronts.empty() ? "" : " ") + std::to_string(p);
            }
            std::fprintf(f.get(), "%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", r.t, snap.step, r.total_A,
                         r.total_entropy, r.entropy_flux_boundary, r.max_abs_u, r.max_density_ratio, r.head_spread,
                         fronts.c_str());
        }
        m.files.push_back(path.string());
    }
    if (!config.probes.empty()) {
        const auto path = dir / "probes.csv";
        auto f = open_for_write(path);
        std::string header = "t";
        for (auto p : config.probes) {
            const auto k = std::to_string(p);
            header += ",A_" + k + ",Q_" + k + ",E_" + k + ",density_ratio_" + k + ",p_" + k;
        }
        std::fprintf(f.get(), "%s\n", header.c_str());
        for (const auto& snap : traj.snapshots) {
            std::fprintf(f.get(), "%.17g", snap.t);
            for (auto p : config.probes) {
                const auto& s = snap.states.at(p);
                const auto d = derived(s, mesh.cells[p], traj.fluid);
                std::fprintf(f.get(), ",%.17g,%.17g,%d,%.17g,%.17g", s.A, s.Q, indicator(s.E), d.ratio, d.p);
            }
            std::fputc('\n', f.get());
        }
        m.files.push_back(path.string());
    }
    const auto manifest_path = dir / "manifest.json";
    m.files.push_back(manifest_path.string());
    std::ofstream out(manifest_path);
    if (!out) {
        throw std::runtime_error("output: cannot write '" + manifest_path.string() + "'");
    }
    out << m.to_json();
    return m;
}

// ---------------------------------------------------------------------------

std::string ConvergenceTable::to_csv() const {
    std::ostringstream os;
    os << "cells,error_A,error_Q,order_A,order_Q\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,", r.cells, r.error_A, r.error_Q);
        os << buf;
        if (r.order_A) {
            std::snprintf(buf, sizeof buf, "%.6g", *r.order_A);
            os << buf;
        }
        os << ',';
        if (r.order_Q) {
            std::snprintf(buf, sizeof buf, "%.6g", *r.order_Q);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

std::vector<FlowState> restrict_to(const Trajectory& fine, const Mesh& coarse) {
    const auto& fs_states = fine.snapshots.back().states;
    const std::size_t nf = fs_states.size();
    const std::size_t nc = coarse.size();
    std::vector<FlowState> out(nc);
    if (nf % nc == 0) {
        const std::size_t r = nf / nc;
        for (std::size_t i = 0; i < nc; ++i) {
            double A = 0.0;
            double Q = 0.0;
            for (std::size_t k = 0; k < r; ++k) {
                A += fs_states[i * r + k].A;
                Q += fs_states[i * r + k].Q;
            }
            out[i] = {A / static_cast<double>(r), Q / static_cast<double>(r), fs_states[i * r].E};
        }
        return out;
    }
    for (std::size_t i = 0; i < nc; ++i) {
        const double X = coarse.cells[i].X_center;
        auto j = static_cast<std::size_t>(X / fine.mesh.dX);
        out[i] = fs_states[std::min(j, nf - 1)];
    }
    return out;
}

ConvergenceTable convergence_harness(const SimConfig& config, std::vector<std::size_t> levels) {
    if (levels.size() < 2) {
        throw std::invalid_argument("convergence: at least two refinement levels are required");
    }
    std::sort(levels.begin(), levels.end());
    std::vector<Trajectory> runs;
    runs.reserve(levels.size());
    for (auto n : levels) {
        SimConfig c = config;
        c.cells = n;
        c.output_interval = c.end_time;
        c.probes.clear();
        runs.push_back(run(c));
    }
    const auto& finest = runs.back();
    ConvergenceTable table;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto& mesh = runs[k].mesh;
        const auto ref = restrict_to(finest, mesh);
        const auto& s = runs[k].snapshots.back().states;
        ConvergenceRow row;
        row.cells = levels[k];
        for (std::size_t i = 0; i < s.size(); ++i) {
            row.error_A += std::abs(s[i].A - ref[i].A) * mesh.dX;
            row.error_Q += std::abs(s[i].Q - ref[i].Q) * mesh.dX;
        }
        table.rows.push_back(row);
    }
    // orders between consecutive non-reference levels
    for (std::size_t k = 0; k + 2 < table.rows.size(); ++k) {
        auto& a = table.rows[k];
        const auto& b = table.rows[k + 1];
        const double ratio = std::log(static_cast<double>(b.cells) / static_cast<double>(a.cells));
        if (ratio > 0.0 && a.error_A > 0.0 && b.error_A > 0.0) {
            a.order_A = std::log(a.error_A / b.error_A) / ratio;
        }
        if (ratio > 0.0 && a.error_Q > 0.0 && b.error_Q > 0.0) {
            a.order_Q = std::log(a.error_Q / b.error_Q) / ratio;
        }
    }
    return table;
}

}  // namespace pfs
