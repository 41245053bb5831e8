#include "pfs/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>

namespace pfs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') {
            quoted = !quoted;
        } else if (line[i] == '#' && !quoted) {
            return line.substr(0, i);
        }
    }
    return line;
}

double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") {
        return kInf;
    }
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != end) {
        fail(key, "expected a number, got '" + t + "'");
    }
    return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::size_t v = 0;
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != end) {
        fail(key, "expected a non-negative integer, got '" + t + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (seps.find(ch) != std::string::npos) {
            if (!trim(cur).empty()) {
                out.push_back(trim(cur));
            }
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trim(cur).empty()) {
        out.push_back(trim(cur));
    }
    return out;
}

std::vector<ProfileSample> parse_samples(const std::string& key, const std::string& text) {
    std::vector<ProfileSample> out;
    for (const auto& row : split(text, ";")) {
        const auto f = split(row, " \t,");
        if (f.size() != 3) {
            fail(key, "each sample needs three numbers 'x b R', got '" + row + "'");
        }
        out.push_back({parse_number(key, f[0]), parse_number(key, f[1]), parse_number(key, f[2])});
    }
    return out;
}

std::string num(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct BcDraft {
    std::optional<std::string> kind;
    std::optional<double> level, ratio, discharge, close_time;
};

BoundaryCondition finish_bc(const BcDraft& d, const std::string& key) {
    if (!d.kind) {
        if (d.level || d.ratio || d.discharge || d.close_time) {
            fail(key + ".kind", "missing");
        }
        return BoundaryCondition::wall();
    }
    BoundaryCondition bc;
    try {
        bc.kind = boundary_kind_from_string(*d.kind);
    } catch (const std::invalid_argument& e) {
        fail(key + ".kind", e.what());
    }
    const bool reservoir = bc.kind == BoundaryKind::Reservoir;
    const bool flow = bc.kind == BoundaryKind::Discharge || bc.kind == BoundaryKind::Valve;
    if ((d.level || d.ratio) && !reservoir) {
        fail(key + (d.level ? ".level" : ".ratio"), "only valid for a reservoir");
    }
    if (d.discharge && !flow) {
        fail(key + ".discharge", "only valid for discharge or valve");
    }
    if (d.close_time && bc.kind != BoundaryKind::Valve) {
        fail(key + ".close_time", "only valid for a valve");
    }
    if (reservoir && !d.level && !d.ratio) {
        fail(key, "reservoir needs level or ratio");
    }
    if (flow && !d.discharge) {
        fail(key + ".discharge", "missing");
    }
    bc.level = d.level;
    bc.ratio = d.ratio;
    bc.discharge = d.discharge.value_or(0.0);
    bc.close_time = d.close_time.value_or(0.0);
    return bc;
}

void emit_bc(std::ostringstream& os, const std::string& key, const BoundaryCondition& bc) {
    os << key << ".kind = " << to_string(bc.kind) << '\n';
    if (bc.level) {
        os << key << ".level = " << num(*bc.level) << '\n';
    }
    if (bc.ratio) {
        os << key << ".ratio = " << num(*bc.ratio) << '\n';
    }
    if (bc.kind == BoundaryKind::Discharge || bc.kind == BoundaryKind::Valve) {
        os << key << ".discharge = " << num(bc.discharge) << '\n';
    }
    if (bc.kind == BoundaryKind::Valve) {
        os << key << ".close_time = " << num(bc.close_time) << '\n';
    }
}

}  // namespace

SimConfig parse_config(const std::string& text, const std::string& base_dir) {
    SimConfig c;
    bool have_end = false;
    BcDraft left, right;
    std::map<std::string, std::size_t> region_index;
    std::vector<std::optional<InitialKind>> region_kind;
    std::set<std::string> seen;

    static const std::regex bc_re(R"(bc\.(left|right)\.([a-z_]+))");
    static const std::regex ic_re(R"(ic\.([A-Za-z0-9_-]+)\.([a-z_]+))");

    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail("line " + std::to_string(lineno), "expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (!seen.insert(key).second) {
            fail(key, "duplicate key");
        }

        std::smatch m;
        if (key == "pipe.samples") {
            c.pipe_samples = parse_samples(key, value);
        } else if (key == "pipe.file") {
            if (value.empty()) {
                fail(key, "empty path");
            }
            const std::filesystem::path p(value);
            c.pipe_file = p.is_relative() && !base_dir.empty() ? (std::filesystem::path(base_dir) / p).string() : value;
        } else if (key == "mesh.cells") {
            c.cells = parse_count(key, value);
        } else if (key == "time.cfl") {
            c.cfl = parse_number(key, value);
        } else if (key == "time.end") {
            c.end_time = parse_number(key, value);
            have_end = true;
        } else if (key == "time.output_interval") {
            c.output_interval = parse_number(key, value);
        } else if (key == "fluid.rho0") {
            c.fluid.rho0 = parse_number(key, value);
        } else if (key == "fluid.beta0") {
            c.fluid.beta0 = parse_number(key, value);
        } else if (key == "fluid.g") {
            c.fluid.g = parse_number(key, value);
        } else if (key == "fluid.ks") {
            c.fluid.Ks = parse_number(key, value);
        } else if (key == "output.probes") {
            for (const auto& p : split(value, " \t,")) {
                c.probes.push_back(parse_count(key, p));
            }
        } else if (std::regex_match(key, m, bc_re)) {
            auto& d = m[1] == "left" ? left : right;
            const std::string field = m[2];
            if (field == "kind") {
                d.kind = value;
            } else if (field == "level") {
                d.level = parse_number(key, value);
            } else if (field == "ratio") {
                d.ratio = parse_number(key, value);
            } else if (field == "discharge") {
                d.discharge = parse_number(key, value);
            } else if (field == "close_time") {
                d.close_time = parse_number(key, value);
            } else {
                fail(key, "unknown key");
            }
        } else if (std::regex_match(key, m, ic_re)) {
            const std::string name = m[1];
            const std::string field = m[2];
            auto [it, fresh] = region_index.try_emplace(name, c.initial.size());
            if (fresh) {
                InitialRegion r;
                r.name = name;
                c.initial.push_back(r);
                region_kind.emplace_back();
            }
            auto& r = c.initial[it->second];
            auto& kind = region_kind[it->second];
            if (field == "from") {
                r.from = parse_number(key, value);
            } else if (field == "to") {
                r.to = parse_number(key, value);
            } else if (field == "velocity") {
                r.velocity = parse_number(key, value);
            } else if (field == "discharge") {
                r.discharge = parse_number(key, value);
            } else if (field == "level" || field == "elevation" || field == "ratio" || field == "head") {
                if (kind) {
                    fail(key, "region already has '" + to_string(*kind) + "'");
                }
                kind = initial_kind_from_string(field);
                r.kind = *kind;
                r.value = parse_number(key, value);
            } else {
                fail(key, "unknown key");
            }
        } else {
            fail(key, "unknown key");
        }
    }

    if (c.pipe_samples.empty() && c.pipe_file.empty()) {
        fail("pipe.samples", "missing (or pipe.file)");
    }
    if (!have_end) {
        fail("time.end", "missing");
    }
    if (c.initial.empty()) {
        fail("ic", "missing (at least one ic.<name> region)");
    }
    for (std::size_t k = 0; k < c.initial.size(); ++k) {
        if (!region_kind[k]) {
            fail("ic." + c.initial[k].name, "missing one of level, elevation, ratio, head");
        }
    }
    c.left = finish_bc(left, "bc.left");
    c.right = finish_bc(right, "bc.right");

    try {
        c.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    // reservoir levels against the pipe ends
    std::vector<ProfileSample> samples;
    try {
        samples = c.pipe_file.empty() ? c.pipe_samples : load_profile_table(c.pipe_file);
    } catch (const std::exception& e) {
        fail("pipe.file", e.what());
    }
    for (const auto& [bc, key, R] : {std::tuple{&c.left, "bc.left.level", samples.front().R},
                                     std::tuple{&c.right, "bc.right.level", samples.back().R}}) {
        if (bc->level && !(*bc->level > -R && *bc->level <= R)) {
            fail(key, "level " + num(*bc->level) + " outside (-R, R] with R = " + num(R));
        }
    }
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string serialize_config(const SimConfig& c) {
    std::ostringstream os;
    if (!c.pipe_file.empty()) {
        os << "pipe.file = \"" << c.pipe_file << "\"\n";
    } else {
        os << "pipe.samples = \"";
        for (std::size_t i = 0; i < c.pipe_samples.size(); ++i) {
            const auto& s = c.pipe_samples[i];
            os << (i ? "; " : "") << num(s.x) << ' ' << num(s.b) << ' ' << num(s.R);
        }
        os << "\"\n";
    }
    os << "mesh.cells = " << c.cells << '\n';
    os << "time.cfl = " << num(c.cfl) << '\n';
    os << "time.end = " << num(c.end_time) << '\n';
    os << "time.output_interval = " << num(c.output_interval) << '\n';
    os << "fluid.rho0 = " << num(c.fluid.rho0) << '\n';
    os << "fluid.beta0 = " << num(c.fluid.beta0) << '\n';
    os << "fluid.g = " << num(c.fluid.g) << '\n';
    os << "fluid.ks = " << num(c.fluid.Ks) << '\n';
    emit_bc(os, "bc.left", c.left);
    emit_bc(os, "bc.right", c.right);
    for (const auto& r : c.initial) {
        const std::string k = "ic." + r.name;
        os << k << ".from = " << num(r.from) << '\n';
        os << k << ".to = " << num(r.to) << '\n';
        os << k << '.' << to_string(r.kind) << " = " << num(r.value) << '\n';
        if (r.velocity) {
            os << k << ".velocity = " << num(*r.velocity) << '\n';
        }
        if (r.discharge) {
            os << k << ".discharge = " << num(*r.discharge) << '\n';
        }
    }
    if (!c.probes.empty()) {
        os << "output.probes = \"";
        for (std::size_t i = 0; i < c.probes.size(); ++i) {
            os << (i ? ", " : "") << c.probes[i];
        }
        os << "\"\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"still-water", "dam-break-fs", "water-hammer", "pipe-filling",
                                                "varying-section-steady"};
    return names;
}

SimConfig preset(const std::string& name) {
    using std::numbers::pi;
    SimConfig c;
    if (name == "still-water") {
        c.pipe_samples = {{0.0, 0.0, 1.0}, {100.0, 0.0, 1.0}};
        c.cells = 100;
        c.end_time = 10.0;
        c.output_interval = 1.0;
        c.initial = {{"pool", 0.0, kInf, InitialKind::Level, 0.0, {}, {}}};
    } else if (name == "dam-break-fs") {
        c.pipe_samples = {{0.0, 0.0, 1.0}, {100.0, 0.0, 1.0}};
        c.cells = 200;
        c.end_time = 10.0;
        c.output_interval = 0.5;
        c.initial = {{"upstream", 0.0, 50.0, InitialKind::Level, 0.6, {}, {}},
                     {"downstream", 50.0, kInf, InitialKind::Level, -0.6, {}, {}}};
        c.probes = {50, 100, 150};
    } else if (name == "water-hammer") {
        c.pipe_samples = {{0.0, 0.0, 1.0}, {1000.0, 0.0, 1.0}};
        c.cells = 200;
        c.end_time = 10.0;
        c.output_interval = 0.01;
        c.left = BoundaryCondition::reservoir_ratio(1.0);
        c.right = BoundaryCondition::valve(pi, 0.0);
        c.initial = {{"pipe", 0.0, kInf, InitialKind::Ratio, 1.0, 1.0, {}}};
        c.probes = {199, 100};
    } else if (name == "pipe-filling") {
        // pressurized surge into a nearly full, closed pipe; the transition
        // front crosses the pipe at roughly the acoustic speed
        c.pipe_samples = {{0.0, 0.0, 0.5}, {50.0, 0.0, 0.5}};
        c.cells = 100;
        c.end_time = 2.0;
        c.output_interval = 0.005;
        c.left = BoundaryCondition::reservoir_ratio(1.002);
        c.initial = {{"pipe", 0.0, kInf, InitialKind::Level, 0.49, {}, {}}};
        c.probes = {0, 50, 99};
    } else if (name == "varying-section-steady") {
        // gentle contraction of the radius around X = 50
        for (int k = 0; k <= 50; ++k) {
            const double x = 2.0 * k;
            const double d = (x - 50.0) / 12.0;
            c.pipe_samples.push_back({x, 0.0, 1.0 - 0.1 * std::exp(-d * d)});
        }
        const double Q = 0.5;
        const double h_out = 0.2;
        const auto out = CircularSection(1.0).wet_area(h_out);
        c.cells = 100;
        // the seiche left by the initial state decays slowly on fine meshes
        c.end_time = 2000.0;
        c.output_interval = 50.0;
        c.left = BoundaryCondition::inflow(Q);
        c.right = BoundaryCondition::reservoir_level(h_out);
        c.initial = {{"flow", 0.0, kInf, InitialKind::Head, 0.5 * Q * Q / (out * out) + c.fluid.g * h_out, {}, Q}};
        c.probes = {25, 50, 75};
    } else {
        std::string list;
        for (const auto& n : preset_names()) {
            list += (list.empty() ? "" : ", ") + n;
        }
        throw ConfigError("preset: unknown preset '" + name + "' (available: " + list + ")");
    }
    c.validate();
    return c;
}

}  // namespace pfs
