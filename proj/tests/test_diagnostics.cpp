#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pfs/diagnostics.hpp"
#include "pfs/simulation.hpp"

using namespace pfs;
using std::numbers::pi;

namespace {

constexpr auto FS = Regime::FreeSurface;
constexpr auto PR = Regime::Pressurized;

Mesh straight_mesh(double length, std::size_t n, double b0 = 0.0, double b1 = 0.0) {
    return make_mesh(build_profile({{0.0, b0, 1.0}, {length, b1, 1.0}}), n);
}

Trajectory still_trajectory(std::size_t steps) {
    const auto mesh = straight_mesh(10.0, 20);
    std::vector<FlowState> s(20, FlowState{mesh.cells[0].section().wet_area(0.2), 0.0, FS});
    Simulation sim(mesh, FluidConstants{}, {}, s, 0.9);
    Trajectory traj{mesh, sim.fluid(), {sim.snapshot()}};
    for (std::size_t k = 0; k < steps; ++k) {
        sim.advance(sim.stable_dt());
        traj.snapshots.push_back(sim.snapshot());
    }
    return traj;
}

}  // namespace

TEST_CASE("mass total") {
    const auto mesh = straight_mesh(5.0, 10);
    std::vector<FlowState> s(10, FlowState{1.0, 0.0, FS});
    CHECK(mass_total(s, mesh) == doctest::Approx(5.0).epsilon(1e-15));
    std::vector<FlowState> dry(10, FlowState{kDryFloor * pi, 0.0, FS});
    CHECK(mass_total(dry, mesh) == doctest::Approx(10 * kDryFloor * pi * 0.5).epsilon(1e-14));
    const auto coarse = straight_mesh(10.0, 10);
    CHECK(mass_total(s, coarse) == doctest::Approx(2.0 * mass_total(s, mesh)).epsilon(1e-15));
}

TEST_CASE("record contents") {
    const auto mesh = straight_mesh(5.0, 5);
    std::vector<FlowState> s{{1.0, 0.2, FS}, {2.0, 0.0, FS}, {pi * 1.001, 0.0, PR}, {pi * 1.002, 0.0, PR},
                             {2.5, -1.0, FS}};
    const auto r = make_record(1.5, s, s.front(), s.back(), mesh, FluidConstants{});
    CHECK(r.t == 1.5);
    CHECK(r.max_abs_u == doctest::Approx(0.4));
    CHECK(r.max_density_ratio == doctest::Approx(1.002));
    CHECK(r.E_front_positions == std::vector<std::size_t>{2, 4});
    CHECK(r.head_spread > 0.0);
    CHECK(std::isfinite(r.total_entropy));
}

TEST_CASE("entropy budget of still water vanishes") {
    const auto traj = still_trajectory(50);
    const auto prod = entropy_budget(traj);
    REQUIRE(prod.size() == 50);
    for (double p : prod) {
        CHECK(std::abs(p) <= 1e-12);
    }
    CHECK(entropy_budget(Trajectory{traj.mesh, traj.fluid, {traj.snapshots[0]}}).empty());
    CHECK_THROWS_AS(entropy_budget(traj, {5, 30}), std::out_of_range);
}

TEST_CASE("entropy budget of a wall-bounded dam break is dissipative") {
    const auto mesh = straight_mesh(10.0, 60);
    std::vector<FlowState> s(60);
    for (std::size_t i = 0; i < 60; ++i) {
        s[i] = {mesh.cells[i].section().wet_area(i < 30 ? 0.5 : -0.5), 0.0, FS};
    }
    Simulation sim(mesh, FluidConstants{}, {}, s, 0.9);
    const auto traj = run(sim, 2.0, 0.0);
    const double scale = std::abs(traj.snapshots[0].diagnostics.total_entropy);
    double total = 0.0;
    for (double p : entropy_budget(traj)) {
        CHECK(p <= 1e-8 * scale);
        total += p;
    }
    CHECK(total < 0.0);
}

TEST_CASE("still-water residual") {
    const FluidConstants consts;
    const auto mesh = straight_mesh(10.0, 10, 0.0, 1.0);
    SimConfig c;
    c.pipe_samples = {{0.0, 0.0, 1.0}, {10.0, 1.0, 1.0}};
    c.cells = 10;
    c.initial = {{"all", 0.0, 1e9, InitialKind::Elevation, 0.8, {}, {}}};
    const auto s = initial_states(c, mesh);
    const auto r = still_water_residual(s, mesh, consts);
    CHECK(r.max_velocity == 0.0);
    CHECK(r.max_head_jump <= 1e-11);

    // only differences of Z matter
    const auto lifted = straight_mesh(10.0, 10, 100.0, 101.0);
    c.initial[0].value = 100.8;
    const auto s2 = initial_states(c, lifted);
    CHECK(still_water_residual(s2, lifted, consts).max_head_jump == doctest::Approx(r.max_head_jump).epsilon(1e-9));

    std::vector<FlowState> moving(10, FlowState{1.0, 0.5, FS});
    CHECK(still_water_residual(moving, straight_mesh(10.0, 10), consts).max_velocity == doctest::Approx(0.5));
}

TEST_CASE("surge metrics") {
    SUBCASE("quiescent") {
        const auto mesh = straight_mesh(10.0, 5);
        Trajectory traj{mesh, FluidConstants{}, {}};
        for (int k = 0; k < 10; ++k) {
            Snapshot s;
            s.t = 0.1 * k;
            s.states.assign(5, FlowState{pi, 0.0, PR});
            traj.snapshots.push_back(s);
        }
        const auto m = surge_metrics(traj, 2);
        CHECK(m.peak_density_ratio == 1.0);
        CHECK_FALSE(m.period.has_value());
        CHECK_THROWS_AS(surge_metrics(traj, 5), std::out_of_range);
    }
    SUBCASE("sinusoid") {
        const auto mesh = straight_mesh(10.0, 3);
        Trajectory traj{mesh, FluidConstants{}, {}};
        const double period = 2.5;
        for (int k = 0; k <= 1000; ++k) {
            Snapshot s;
            s.t = 0.01 * k;
            const double ratio = 1.0 + 1e-3 * std::sin(2 * pi * s.t / period + 0.3);
            s.states.assign(3, FlowState{ratio * pi, 0.0, PR});
            traj.snapshots.push_back(s);
        }
        const auto m = surge_metrics(traj, 1);
        CHECK(m.peak_density_ratio == doctest::Approx(1.001).epsilon(1e-6));
        REQUIRE(m.period.has_value());
        CHECK(*m.period == doctest::Approx(period).epsilon(1e-3));
    }
}
