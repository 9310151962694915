#include <doctest.h>

#include <cmath>
#include <set>

#include "test_util.hpp"
#include "wavebench/robot.hpp"

using namespace wavebench;

namespace {
constexpr double kPi = 3.14159265358979323846;

Scenario sc() { return testutil::tiny_scenario(); }

bool design_equal(const DesignState& a, const DesignState& b) {
    return a.cx == b.cx && a.cy == b.cy && a.r == b.r;
}
}  // namespace

TEST_CASE("ring layout geometry") {
    const ActuationSpace space{ActuationMode::Radii, 19, 0.0, 20.0};

    SUBCASE("single scatterer lands on the +x axis") {
        const DesignState d = ring_layout(1, 5.0, 0.3, space);
        CHECK(d.cx[0] == doctest::Approx(5.0));
        CHECK(d.cy[0] == doctest::Approx(0.0));
    }

    SUBCASE("adjacent surface gap matches the chord formula") {
        const DesignState d = ring_layout(19, 5.0, 0.3, space);
        const double dist = std::hypot(d.cx[1] - d.cx[0], d.cy[1] - d.cy[0]);
        const double chord = 2.0 * 5.0 * std::sin(kPi / 19.0);
        CHECK(dist == doctest::Approx(chord).epsilon(1e-12));
        const double gap = chord - 2.0 * 0.3;
        CHECK(gap == doctest::Approx(1.046).epsilon(1e-3));
        CHECK(gap > 0.0);
    }

    SUBCASE("rotation by 2*pi/M maps the center set onto itself") {
        const DesignState d = ring_layout(19, 5.0, 0.3, space);
        const double a = 2.0 * kPi / 19.0;
        for (int i = 0; i < 19; ++i) {
            const double rx = d.cx[i] * std::cos(a) - d.cy[i] * std::sin(a);
            const double ry = d.cx[i] * std::sin(a) + d.cy[i] * std::cos(a);
            bool found = false;
            for (int j = 0; j < 19; ++j)
                if (std::hypot(rx - d.cx[j], ry - d.cy[j]) < 1e-9) found = true;
            CHECK(found);
        }
    }

    SUBCASE("overlapping ring is rejected") {
        CHECK_THROWS_AS(ring_layout(19, 5.0, 0.9, space), ConstraintViolation);
    }
}

TEST_CASE("projection") {
    const Scenario s = sc();
    const DesignRegion region = design_region(s.sim, s.robot);
    const ActuationSpace space = actuation_space(s.robot);

    SUBCASE("feasible design is returned unchanged") {
        DesignState d;
        d.space = space;
        d.cx = {1.0};
        d.cy = {-2.0};
        d.r = {0.5};
        const DesignState p = project(d, region, s.robot);
        CHECK(design_equal(p, d));
    }

    SUBCASE("radius clamps to r_max") {
        DesignState d;
        d.space = space;
        d.cx = {0.0};
        d.cy = {0.0};
        d.r = {10.0 * s.robot.r_max};
        const DesignState p = project(d, region, s.robot);
        CHECK(p.r[0] == s.robot.r_max);
    }

    SUBCASE("coincident centers separate along +x to the required distance") {
        ActuationSpace sp2 = space;
        sp2.scatterers = 2;
        DesignState d;
        d.space = sp2;
        d.cx = {1.0, 1.0};
        d.cy = {0.5, 0.5};
        d.r = {0.4, 0.4};
        const DesignState p = project(d, region, s.robot);
        const double need = 0.4 + 0.4 + s.robot.gap;
        const double dist = std::hypot(p.cx[1] - p.cx[0], p.cy[1] - p.cy[0]);
        CHECK(dist >= need);
        CHECK(dist <= need * 1.00001);
        CHECK(p.cy[0] == p.cy[1]);   // separation along x only
        CHECK(p.cx[1] > p.cx[0]);    // +x tie-break pushes j right
    }

    SUBCASE("idempotence on random inputs") {
        ActuationSpace sp3 = space;
        sp3.scatterers = 3;
        Rng rng(7);
        RobotConfig rc = s.robot;
        rc.scatterer_count = 3;
        for (int trial = 0; trial < 100; ++trial) {
            DesignState d;
            d.space = sp3;
            for (int i = 0; i < 3; ++i) {
                d.cx.push_back(rng.uniform(-12.0, 12.0));
                d.cy.push_back(rng.uniform(-12.0, 12.0));
                d.r.push_back(rng.uniform(0.0, 2.0));
            }
            const DesignState p1 = project(d, region, rc);
            const DesignState p2 = project(p1, region, rc);
            CHECK(design_equal(p1, p2));
            CHECK(is_feasible(p1, region, rc));
        }
    }

    SUBCASE("ring mode resolves overlap by shrinking radii, centers fixed") {
        ActuationSpace spR{ActuationMode::Radii, 19, 0.0, 20.0};
        DesignState d = ring_layout(19, 5.0, 0.5, spR);
        RobotConfig rc = s.robot;
        rc.mode = ActuationMode::Radii;
        rc.scatterer_count = 19;
        DesignState big = d;
        for (auto& r : big.r) r = 1.0;  // would overlap neighbours
        const DesignState p = project(big, region, rc);
        CHECK(p.cx == d.cx);
        CHECK(p.cy == d.cy);
        CHECK(is_feasible(p, region, rc));
        for (double r : p.r) CHECK(r < 1.0);
    }
}

TEST_CASE("integrate_design") {
    const Scenario s = sc();
    const DesignRegion region = design_region(s.sim, s.robot);
    const ActuationSpace space = actuation_space(s.robot);
    DesignState d0;
    d0.space = space;
    d0.cx = {0.0};
    d0.cy = {0.0};
    d0.r = {0.5};

    SUBCASE("null action holds the trajectory constant") {
        const auto traj = integrate_design(d0, zero_action(space), 1e-3, 9, region, s.robot);
        CHECK(traj.size() == 10);
        for (const auto& d : traj) CHECK(design_equal(d, traj.front()));
    }

    SUBCASE("linear motion integrates exactly") {
        ActionSpec a;
        a.rates = {1.0, 0.0};
        const auto traj = integrate_design(d0, a, 1e-3, 9, region, s.robot);
        CHECK(traj.back().cx[0] == doctest::Approx(0.001).epsilon(1e-12));
        CHECK(traj.back().cy[0] == 0.0);
    }

    SUBCASE("driving two scatterers together keeps samples feasible") {
        RobotConfig rc = s.robot;
        rc.scatterer_count = 2;
        ActuationSpace sp2 = actuation_space(rc);
        DesignState d;
        d.space = sp2;
        d.cx = {-0.6, 0.6};
        d.cy = {0.0, 0.0};
        d.r = {0.5, 0.5};
        ActionSpec a;
        a.rates = {150.0, 0.0, -150.0, 0.0};  // head-on at the bound
        const auto traj = integrate_design(d, a, 1e-2, 50, region, rc);
        for (const auto& dd : traj) CHECK(is_feasible(dd, region, rc));
    }

    SUBCASE("mode R never moves centers; mode P never changes radii") {
        RobotConfig rcR = s.robot;
        rcR.mode = ActuationMode::Radii;
        rcR.scatterer_count = 3;
        const ActuationSpace spR = actuation_space(rcR);
        const DesignState ring = ring_layout(3, 5.0, 0.5, spR);
        Rng rng(3);
        const auto trajR =
            integrate_design(ring, random_action(spR, rng), 1e-2, 20, region, rcR);
        for (const auto& dd : trajR) {
            CHECK(dd.cx == ring.cx);
            CHECK(dd.cy == ring.cy);
        }
        const auto trajP =
            integrate_design(d0, random_action(space, rng), 1e-2, 20, region, s.robot);
        for (const auto& dd : trajP) CHECK(dd.r == d0.r);
    }
}

TEST_CASE("random_action") {
    const ActuationSpace space{ActuationMode::Position, 2, 0.5, 0.0};

    SUBCASE("zero bounds give the zero action") {
        ActuationSpace z = space;
        z.position_bound = 0.0;
        Rng rng(1);
        for (double r : random_action(z, rng).rates) CHECK(r == 0.0);
    }

    SUBCASE("empirical mean is within three standard errors of zero") {
        Rng rng(42);
        const int n = 100000;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const ActionSpec a = random_action(space, rng);
            for (double r : a.rates) acc += r;
        }
        const double mean = acc / (4.0 * n);
        const double se = 0.5 / std::sqrt(3.0 * 4.0 * n);
        CHECK(std::abs(mean) < 3.0 * se);
    }

    SUBCASE("same seed, same sequence") {
        Rng a(99), b(99);
        for (int i = 0; i < 10; ++i)
            CHECK(random_action(space, a).rates == random_action(space, b).rates);
    }
}

TEST_CASE("action layout round trip") {
    for (ActuationMode mode : {ActuationMode::Radii, ActuationMode::Position, ActuationMode::Full}) {
        ActuationSpace space{mode, 3, 1.0, 2.0};
        Rng rng(5);
        const ActionSpec a = random_action(space, rng);
        const auto rates = action_to_design_rates(a, space);
        CHECK(static_cast<int>(rates.size()) == 9);
        const ActionSpec back = action_from_design_rates(rates, space);
        CHECK(back.rates == a.rates);
    }
}
