#include "fixtures.hpp"
#include "flexbeam/core_model.hpp"
#include "flexbeam/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace flexbeam;
using flexbeam::testing::unit_beam;

namespace {

bool has_message(const ValidationReport& r, const std::string& msg) {
    for (const auto& v : r.violations)
        if (v.message == msg) return true;
    return false;
}

}  // namespace

TEST_CASE("validate_system accepts a bump clear of 0, l0, l") {
    const std::vector<Actuator> acts{{0.25, 0.2, 1.0, 1.0}};
    CHECK(validate_system(unit_beam(0.5), acts).valid());
}

TEST_CASE("validate_system flags an actuator covering l0") {
    const std::vector<Actuator> acts{{0.5, 0.2, 1.0, 1.0}};
    const auto rep = validate_system(unit_beam(0.5), acts);
    REQUIRE_FALSE(rep.valid());
    CHECK(has_message(rep, "support contains l0"));
    CHECK(rep.violations.front().key == "actuator[1].center");
}

TEST_CASE("validate_system flags l0 outside the beam") {
    const auto rep = validate_system(unit_beam(1.5), {});
    CHECK(has_message(rep, "l0 outside (0,l)"));
}

TEST_CASE("validate_system lists every violation") {
    BeamSystem s = unit_beam(0.5);
    s.E = 0.0;
    s.kappa = -1.0;
    s.alpha0 = -2.0;
    const std::vector<Actuator> acts{{0.02, 0.2, 1.0, 1.0}, {0.5, 0.1, -1.0, -1.0}};
    const auto rep = validate_system(s, acts);
    CHECK(rep.violations.size() == 7);
    CHECK(has_message(rep, "support not inside (0,l)"));
}

TEST_CASE("validate_system is pure") {
    const std::vector<Actuator> acts{{0.5, 0.2, 1.0, 1.0}};
    const BeamSystem s = unit_beam(0.5);
    const auto a = validate_system(s, acts);
    const auto b = validate_system(s, acts);
    REQUIRE(a.violations.size() == b.violations.size());
    for (std::size_t i = 0; i < a.violations.size(); ++i) {
        CHECK(a.violations[i].key == b.violations[i].key);
        CHECK(a.violations[i].message == b.violations[i].message);
    }
    CHECK(acts[0].center == 0.5);
}

TEST_CASE("actuator_profile is a raised cosine bump") {
    const Actuator a{0.25, 0.2, 1.0, 0.0};
    CHECK(actuator_profile(a, 0.25) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(actuator_profile(a, 0.15) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(actuator_profile(a, 0.35)) < 1e-15);
    CHECK(actuator_profile(a, 0.20) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(actuator_profile(a, 0.1) == 0.0);
    CHECK(actuator_profile(a, 0.9) == 0.0);
}

TEST_CASE("actuator_profile integrates to height * width / 2") {
    const Actuator a{0.37, 0.13, 2.5, 0.0};
    const auto rule = QuadratureRule::for_system(unit_beam(0.7), std::vector<Actuator>{a});
    const double got = rule.integrate([&](double x) { return actuator_profile(a, x); });
    const double want = a.height * a.width / 2.0;
    CHECK(std::abs(got - want) / want < 1e-10);
}

TEST_CASE("Gauss-Legendre nodes and weights") {
    for (int order : {1, 2, 3, 5, 16, 31}) {
        std::vector<double> x, w;
        gauss_legendre(order, x, w);
        double sum = 0.0;
        for (double wi : w) {
            CHECK(wi > 0.0);
            sum += wi;
        }
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
        for (int i = 1; i < order; ++i) CHECK(x[i] > x[i - 1]);
        // exact for degree 2 order - 1
        const int deg = 2 * order - 1;
        double mom = 0.0;
        for (int i = 0; i < order; ++i) mom += w[i] * std::pow(x[i], deg - 1);
        const double exact = ((deg - 1) % 2 == 0) ? 2.0 / deg : 0.0;
        CHECK(mom == doctest::Approx(exact).epsilon(1e-13));
    }
    std::vector<double> x, w;
    CHECK_THROWS_AS(gauss_legendre(0, x, w), Error);
}

TEST_CASE("QuadratureRule panels tile [0, l] and include breakpoints") {
    const BeamSystem s = unit_beam(0.43);
    const std::vector<Actuator> acts{{0.2, 0.1, 1.0, 1.0}, {0.8, 0.2, 1.0, 1.0}};
    const auto rule = QuadratureRule::for_system(s, acts, 16, 0.07);
    const auto& e = rule.panel_edges();
    CHECK(e.front() == 0.0);
    CHECK(e.back() == 1.0);
    for (std::size_t i = 1; i < e.size(); ++i) {
        CHECK(e[i] > e[i - 1]);
        CHECK(e[i] - e[i - 1] <= 0.07 + 1e-15);
    }
    for (double b : {0.15, 0.25, 0.43, 0.7, 0.9}) {
        bool found = false;
        for (double x : e) found = found || std::abs(x - b) < 1e-15;
        CHECK(found);
    }
    double sum = 0.0;
    for (double w : rule.weights()) {
        CHECK(w > 0.0);
        sum += w;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("integrate: constants, polynomials, sine") {
    const QuadratureRule rule(1.0, {0.5});
    CHECK(rule.integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rule.integrate([](double x) { return x * x; }) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(rule.integrate([](double x) { return std::sin(std::numbers::pi * x); }) ==
          doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("integrate handles a curvature kink at l0 exactly") {
    // |x - l0| is piecewise linear: exact only when l0 is a breakpoint
    const double l0 = 0.3141;
    const QuadratureRule rule(1.0, {l0}, 4);
    const double want = 0.5 * (l0 * l0 + (1 - l0) * (1 - l0));
    CHECK(rule.integrate([&](double x) { return std::abs(x - l0); }) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("QuadratureRule rejects bad input") {
    CHECK_THROWS_AS(QuadratureRule(0.0, {}), Error);
    CHECK_THROWS_AS(QuadratureRule(1.0, {}, 0), Error);
}
