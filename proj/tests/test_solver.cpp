#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pfs/simulation.hpp"
#include "pfs/solver.hpp"

using namespace pfs;
using std::numbers::pi;

namespace {

constexpr auto FS = Regime::FreeSurface;
constexpr auto PR = Regime::Pressurized;

Mesh straight_mesh(double length, std::size_t n, double radius = 1.0) {
    return make_mesh(build_profile({{0.0, 0.0, radius}, {length, 0.0, radius}}), n);
}

double half_full_area(double R) { return 0.5 * pi * R * R; }

std::vector<FlowState> dam_break(const Mesh& mesh, double hl, double hr) {
    std::vector<FlowState> s(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double h = i < mesh.size() / 2 ? hl : hr;
        s[i] = {mesh.cells[i].section().wet_area(h), 0.0, FS};
    }
    return s;
}

double max_abs_q(const std::vector<FlowState>& s) {
    double m = 0.0;
    for (const auto& x : s) {
        m = std::max(m, std::abs(x.Q));
    }
    return m;
}

}  // namespace

TEST_CASE("mesh construction") {
    const auto mesh = straight_mesh(10.0, 5);
    CHECK(mesh.size() == 5);
    CHECK(mesh.dX == doctest::Approx(2.0));
    CHECK(mesh.interfaces.size() == 6);
    CHECK(mesh.faces.size() == 6);
    CHECK(mesh.cells[2].X_center == doctest::Approx(5.0));
    CHECK(mesh.length() == doctest::Approx(10.0));
    CHECK_THROWS_AS(straight_mesh(10.0, 2), std::invalid_argument);
}

TEST_CASE("CFL time step") {
    const FluidConstants consts;
    const auto mesh = straight_mesh(3.0, 3);  // dX = 1
    std::vector<FlowState> s(3, FlowState{half_full_area(1.0), 0.0, FS});
    // gravity wave speed of a half-full unit circle: sqrt(g (pi/2) / 2)
    const double c_fs = std::sqrt(9.81 * pi / 4.0);
    CHECK(c_fs == doctest::Approx(2.7758).epsilon(1e-4));
    CHECK(cfl_dt(s, mesh, consts, 0.5) == doctest::Approx(0.5 / c_fs).epsilon(1e-12));
    CHECK(cfl_dt(s, mesh, consts, 0.5) == doctest::Approx(0.1801).epsilon(1e-3));

    s[1] = {pi, 0.0, PR};
    CHECK(cfl_dt(s, mesh, consts, 0.9) == doctest::Approx(0.9 / 1414.2135623730951).epsilon(1e-12));
    CHECK(cfl_dt(s, mesh, consts, 0.9) == doctest::Approx(6.36e-4).epsilon(1e-3));

    const auto coarse = straight_mesh(6.0, 3);
    CHECK(cfl_dt(s, coarse, consts, 0.9) == doctest::Approx(2.0 * cfl_dt(s, mesh, consts, 0.9)).epsilon(1e-14));

    CHECK_THROWS_AS(cfl_dt(std::vector<FlowState>{}, mesh, consts, 0.9), SolverError);
    std::vector<FlowState> dry(3, FlowState{kDryFloor * pi, 0.0, FS});
    CHECK_THROWS_AS(cfl_dt(dry, mesh, consts, 0.9), SolverError);
}

TEST_CASE("interface flux") {
    const FluidConstants consts;
    const auto cell = uniform_cell(1.0);
    SUBCASE("identical states give the physical flux") {
        const FlowState s{1.1, 0.7, FS};
        const auto F = interface_flux(s, s, cell, cell, consts);
        CHECK(F.mass == 0.7);
        CHECK(F.momentum == doctest::Approx(0.49 / 1.1 + pressure(1.1, FS, cell, consts)).epsilon(1e-15));
        const FlowState p{1.01 * pi, 2.0, PR};
        const auto Fp = interface_flux(p, p, cell, cell, consts);
        CHECK(Fp.momentum == doctest::Approx(4.0 / (1.01 * pi) + pressure(1.01 * pi, PR, cell, consts)));
    }
    SUBCASE("mirror states carry no mass") {
        const auto F = interface_flux({1.0, 0.3, FS}, {1.0, -0.3, FS}, cell, cell, consts);
        CHECK(F.mass == 0.0);
    }
    SUBCASE("a pressurized side forces the acoustic speed") {
        const FlowState L{0.9 * pi, 0.5, FS};
        const FlowState R{1.001 * pi, 0.2, PR};
        const auto F = interface_flux(L, R, cell, cell, consts);
        const double s = (0.5 * (L.Q + R.Q) - F.mass) * 2.0 / (R.A - L.A);
        CHECK(s >= consts.sound_speed());
    }
    SUBCASE("non-finite input") {
        CHECK_THROWS_AS(interface_flux({NAN, 0.0, FS}, {1.0, 0.0, FS}, cell, cell, consts), SolverError);
    }
}

TEST_CASE("wave speed cap near a full section") {
    const FluidConstants consts;
    const auto cell = uniform_cell(1.0);
    const double c = consts.sound_speed();
    CHECK(wave_speed({pi * (1 - 1e-15), 0.0, FS}, cell, consts) <= c);
    CHECK(wave_speed({pi, 0.0, PR}, cell, consts) == c);
}

TEST_CASE("indicator update") {
    const auto mesh = straight_mesh(5.0, 5);
    const double S = pi;
    SUBCASE("all above the full area") {
        std::vector<double> A(5, 1.01 * S);
        std::vector<Regime> E(5, FS);
        for (auto e : update_indicator(A, E, mesh)) {
            CHECK(e == PR);
        }
    }
    SUBCASE("depression inside a pressurized pocket persists") {
        std::vector<double> A{1.01 * S, 1.01 * S, 0.99 * S, 1.01 * S, 1.01 * S};
        std::vector<Regime> E(5, PR);
        CHECK(update_indicator(A, E, mesh)[2] == PR);
    }
    SUBCASE("boundary of the pocket recedes one cell") {
        std::vector<double> A{0.5 * S, 0.99 * S, 0.99 * S, 1.01 * S, 1.01 * S};
        std::vector<Regime> E{FS, PR, PR, PR, PR};
        const auto out = update_indicator(A, E, mesh);
        CHECK(out[0] == FS);
        CHECK(out[1] == FS);
        CHECK(out[2] == PR);
        CHECK(out[3] == PR);
    }
    SUBCASE("ghost neighbours count for the end cells") {
        std::vector<double> A(5, 0.99 * S);
        std::vector<Regime> E(5, PR);
        const auto out = update_indicator(A, E, mesh, FS, PR);
        CHECK(out[0] == FS);
        CHECK(out[1] == PR);
        CHECK(out[4] == PR);
    }
    SUBCASE("free surface stays free below the full area") {
        std::vector<double> A(5, 0.99 * S);
        std::vector<Regime> E(5, FS);
        for (auto e : update_indicator(A, E, mesh, PR, PR)) {
            CHECK(e == FS);
        }
    }
}

TEST_CASE("boundary ghosts") {
    const auto cell = uniform_cell(1.0);
    CHECK(apply_bc(BoundaryCondition::wall(), {1.0, 0.3, FS}, cell, 0.0) == FlowState{1.0, -0.3, FS});

    const auto valve = BoundaryCondition::valve(0.8, 2.0);
    const auto inflow = BoundaryCondition::inflow(0.8);
    const FlowState adj{2.0, 0.5, FS};
    CHECK(apply_bc(valve, adj, cell, 1.0) == apply_bc(inflow, adj, cell, 1.0));
    CHECK(apply_bc(valve, adj, cell, 1.0) == FlowState{2.0, 0.8, FS});
    CHECK(apply_bc(valve, adj, cell, 2.0) == FlowState{2.0, -0.5, FS});

    const auto res = apply_bc(BoundaryCondition::reservoir_ratio(1.005), {pi, 0.4, PR}, cell, 0.0);
    CHECK(res.A == doctest::Approx(1.005 * pi).epsilon(1e-15));
    CHECK(res.E == PR);
    CHECK(res.Q == 0.4);

    const auto lvl = apply_bc(BoundaryCondition::reservoir_level(0.0), adj, cell, 0.0);
    CHECK(lvl.A == doctest::Approx(pi / 2).epsilon(1e-13));
    CHECK(lvl.E == FS);
    CHECK(apply_bc(BoundaryCondition::reservoir_level(1.0), adj, cell, 0.0).E == PR);

    CHECK_THROWS_AS(apply_bc(BoundaryCondition::reservoir_level(1.2), adj, cell, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_bc(BoundaryCondition::reservoir_level(-1.0), adj, cell, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BoundaryCondition::valve(0.0, -1.0).validate(cell), std::invalid_argument);

    CHECK(boundary_kind_from_string("valve") == BoundaryKind::Valve);
    CHECK_THROWS_AS(boundary_kind_from_string("weir"), std::invalid_argument);
}

TEST_CASE("still water in a horizontal pipe is exact") {
    const FluidConstants consts;
    const auto mesh = straight_mesh(100.0, 100);
    std::vector<FlowState> s(100, FlowState{mesh.cells[0].section().wet_area(0.3), 0.0, FS});
    const auto s0 = s;
    const Boundaries walls;
    for (int k = 0; k < 1000; ++k) {
        s = step(s, mesh, consts, walls, 0.0, stable_dt(s, mesh, consts, walls, 0.0, 0.9));
    }
    CHECK(max_abs_q(s) <= 1e-12);
    CHECK(s == s0);
}

TEST_CASE("wall-bounded steps conserve mass") {
    const FluidConstants consts;
    const auto mesh = straight_mesh(10.0, 50);
    auto s = dam_break(mesh, 0.6, -0.6);
    const Boundaries walls;
    double m0 = 0.0;
    for (const auto& x : s) {
        m0 += x.A * mesh.dX;
    }
    double prev = m0;
    for (int k = 0; k < 200; ++k) {
        s = step(s, mesh, consts, walls, 0.0, stable_dt(s, mesh, consts, walls, 0.0, 0.9));
        double m = 0.0;
        for (const auto& x : s) {
            m += x.A * mesh.dX;
        }
        CHECK(std::abs(m - prev) <= 1e-15 * m0 * 4);
        prev = m;
    }
}

TEST_CASE("finite propagation of one step") {
    const FluidConstants consts;
    const auto mesh = straight_mesh(10.0, 40);
    const auto s = dam_break(mesh, 0.6, -0.6);
    const Boundaries walls;
    const double dt = stable_dt(s, mesh, consts, walls, 0.0, 0.9);
    const auto s1 = step(s, mesh, consts, walls, 0.0, dt);
    // a first-order explicit step only touches the two cells next to the jump
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        if (i + 1 < mesh.size() / 2 || i > mesh.size() / 2) {
            CHECK(s1[i] == s[i]);
        }
    }
    CHECK(s1[mesh.size() / 2 - 1] != s[mesh.size() / 2 - 1]);
}

TEST_CASE("dry floor and consistency") {
    const FluidConstants consts;
    const auto mesh = straight_mesh(10.0, 40);
    std::vector<FlowState> s(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        s[i] = i < 20 ? FlowState{mesh.cells[i].section().wet_area(0.5), 0.0, FS} : FlowState{kDryFloor * pi, 0.0, FS};
    }
    const Boundaries walls;
    for (int k = 0; k < 300; ++k) {
        s = step(s, mesh, consts, walls, 0.0, stable_dt(s, mesh, consts, walls, 0.0, 0.9));
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            CHECK(s[i].A >= kDryFloor * mesh.cells[i].S);
            CHECK_FALSE((s[i].E == FS && s[i].A > mesh.cells[i].S));
        }
    }
}

TEST_CASE("implicit friction never reverses the flow") {
    FluidConstants consts;
    consts.Ks = 5.0;  // very rough
    const auto mesh = straight_mesh(10.0, 10, 0.2);
    std::vector<FlowState> s(10, FlowState{0.5 * mesh.cells[0].S, 0.5 * mesh.cells[0].S * 3.0, FS});
    const Boundaries bcs{BoundaryCondition::inflow(s[0].Q), BoundaryCondition::inflow(s[0].Q)};
    const auto s1 = step(s, mesh, consts, bcs, 0.0, 0.05);
    for (const auto& x : s1) {
        CHECK(x.Q > 0.0);
        CHECK(x.Q < s[0].Q);
    }
}

TEST_CASE("step errors") {
    const FluidConstants consts;
    const auto mesh = straight_mesh(10.0, 5);
    std::vector<FlowState> s(5, FlowState{1.0, 0.0, FS});
    CHECK_THROWS_AS(step(s, mesh, consts, {}, 0.0, 0.0), std::invalid_argument);
    s[3].Q = NAN;
    try {
        step(s, mesh, consts, {}, 0.0, 1e-3);
        FAIL("expected an error");
    } catch (const SolverError& e) {
        CHECK(e.cell() == 3u);
    }
    // a grossly unstable step drives a cell negative
    std::vector<FlowState> t(5, FlowState{0.01, 0.0, FS});
    t[2] = {pi * 0.999, 0.0, FS};
    CHECK_THROWS_AS(step(t, mesh, consts, {}, 0.0, 50.0), SolverError);
}

// ---------------------------------------------------------------------------

namespace {

SimConfig small_config() {
    SimConfig c;
    c.pipe_samples = {{0.0, 0.0, 1.0}, {20.0, 0.0, 1.0}};
    c.cells = 40;
    c.cfl = 0.9;
    c.end_time = 2.0;
    c.output_interval = 0.5;
    c.initial = {{"left", 0.0, 10.0, InitialKind::Level, 0.5, {}, {}},
                 {"right", 10.0, std::numeric_limits<double>::infinity(), InitialKind::Level, -0.5, {}, {}}};
    return c;
}

}  // namespace

TEST_CASE("run output cadence and determinism") {
    const auto c = small_config();
    const auto a = run(c);
    REQUIRE(a.snapshots.size() == 5);
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        CHECK(a.snapshots[k].t == 0.5 * static_cast<double>(k));
    }
    const auto b = run(c);
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        CHECK(a.snapshots[k].states == b.snapshots[k].states);
    }
    auto every = c;
    every.output_interval = 0.0;
    every.end_time = 0.1;
    const auto e = run(every);
    CHECK(e.snapshots.size() == e.snapshots.back().step + 1);
    CHECK(e.snapshots.back().t == 0.1);
}

TEST_CASE("run with zero end time") {
    auto c = small_config();
    c.end_time = 0.0;
    const auto traj = run(c);
    REQUIRE(traj.snapshots.size() == 1);
    CHECK(traj.snapshots[0].t == 0.0);
    CHECK(traj.snapshots[0].step == 0);
}

TEST_CASE("step callback and step limit") {
    auto c = small_config();
    c.end_time = 0.3;
    std::size_t calls = 0;
    RunOptions opt;
    opt.on_step = [&](const Simulation&) { ++calls; };
    const auto traj = run(c, opt);
    CHECK(calls > 0);
    opt.max_steps = 2;
    CHECK_THROWS_AS(run(c, opt), SolverError);
}

TEST_CASE("initial conditions") {
    const FluidConstants consts;
    SimConfig c = small_config();
    Simulation sim(c);
    CHECK(sim.states()[0].A == doctest::Approx(sim.mesh().cells[0].section().wet_area(0.5)));
    CHECK(sim.states()[39].A == doctest::Approx(sim.mesh().cells[39].section().wet_area(-0.5)));

    SUBCASE("elevation above the crown is pressurized and hydrostatic") {
        c.initial = {{"all", 0.0, 1e9, InitialKind::Elevation, 3.0, {}, {}}};
        Simulation p(c);
        const auto& s = p.states()[5];
        CHECK(s.E == PR);
        // c^2 ln(A/S) + g R = g * 3
        const double c2 = consts.sound_speed() * consts.sound_speed();
        CHECK(c2 * std::log(s.A / pi) + 9.81 * 1.0 == doctest::Approx(9.81 * 3.0).epsilon(1e-9));
    }
    SUBCASE("head with discharge gives a subcritical state of that head") {
        c.initial = {{"all", 0.0, 1e9, InitialKind::Head, 9.81 * 0.5, {}, 1.0}};
        Simulation p(c);
        const auto& s = p.states()[5];
        const auto& cell = p.mesh().cells[5];
        CHECK(s.Q == 1.0);
        CHECK(total_head(s, cell, consts) == doctest::Approx(9.81 * 0.5).epsilon(1e-10));
        const double T = cell.section().top_width(s.A);
        CHECK(s.Q * s.Q * T / (9.81 * s.A * s.A * s.A) < 1.0);
    }
    SUBCASE("head too low for the discharge") {
        c.initial = {{"all", 0.0, 1e9, InitialKind::Head, 9.81 * -0.9, {}, 5.0}};
        CHECK_THROWS_WITH_AS(Simulation{c}, doctest::Contains("ic.all"), std::invalid_argument);
    }
    SUBCASE("velocity") {
        c.initial = {{"all", 0.0, 1e9, InitialKind::Ratio, 1.0, 2.0, {}}};
        Simulation p(c);
        CHECK(p.states()[3].Q == doctest::Approx(2.0 * pi));
        CHECK(p.states()[3].E == PR);
    }
    SUBCASE("uncovered cells") {
        c.initial = {{"left", 0.0, 10.0, InitialKind::Level, 0.5, {}, {}}};
        CHECK_THROWS_WITH_AS(Simulation{c}, doctest::Contains("not covered"), std::invalid_argument);
    }
}

TEST_CASE("config validation names the key") {
    auto c = small_config();
    c.cfl = 1.5;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("time.cfl"), std::invalid_argument);
    c = small_config();
    c.cells = 2;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("mesh.cells"), std::invalid_argument);
    c = small_config();
    c.right = BoundaryCondition::reservoir_level(1.5);
    CHECK_THROWS_WITH_AS(Simulation{c}, doctest::Contains("bc.right"), std::invalid_argument);
    c = small_config();
    c.probes = {40};
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("output.probes"), std::invalid_argument);
    c = small_config();
    c.pipe_file = "x.txt";
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("pipe"), std::invalid_argument);
}
