#include "fixtures.hpp"
#include "flexbeam/error.hpp"
#include "flexbeam/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace flexbeam;
using flexbeam::testing::pure_beam_limit;
using flexbeam::testing::unit_beam;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> phi0_roots(double l, double l0, double lo, double hi) {
    return find_roots([&](double mu) { return phi0(mu, l, l0); }, lo, hi, pi / (10.0 * l)).roots;
}

}  // namespace

TEST_CASE("phi0 spot values") {
    CHECK(phi0(0.0, 1.0, 0.3) == 0.0);
    CHECK(std::abs(phi0(pi / 2, 1.0, 0.5)) < 1e-15);
    CHECK(phi0(pi, 1.0, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("find_roots on sin") {
    const auto scan = find_roots([](double x) { return std::sin(x); }, 0.1, 10.0, 0.3);
    REQUIRE(scan.roots.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(scan.roots[i] - (i + 1) * pi) < 1e-10);
    CHECK(scan.warnings.empty());
}

TEST_CASE("find_roots on phi0 with l0 = l/2 matches the factorization") {
    // 2 sin(mu/2) (sin(mu/2) - cos(mu/2)): mu in 2 pi N or pi/2 + 2 pi n
    const auto r = phi0_roots(1.0, 0.5, 1e-3, 13.0);
    const std::vector<double> want{pi / 2, 2 * pi, 5 * pi / 2, 4 * pi};
    REQUIRE(r.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(r[i] - want[i]) < 1e-10);
}

TEST_CASE("find_roots without roots") {
    const auto scan = find_roots([](double) { return 1.0; }, 0.0, 5.0, 0.1);
    CHECK(scan.roots.empty());
    CHECK(scan.tangential.empty());
    CHECK_THROWS_AS(find_roots([](double) { return 1.0; }, 1.0, 0.0, 0.1), Error);
    CHECK_THROWS_AS(find_roots([](double) { return 1.0; }, 0.0, 1.0, 0.0), Error);
}

TEST_CASE("find_roots resolves two roots inside one grid cell and flags them") {
    const double a = 2.0, b = 2.0 + 1e-8;
    const auto scan = find_roots([&](double x) { return (x - a) * (x - b); }, 0.0, 5.0, 0.1);
    REQUIRE(scan.roots.size() == 2);
    CHECK(std::abs(scan.roots[0] - a) < 1e-11);
    CHECK(std::abs(scan.roots[1] - b) < 1e-11);
    CHECK(scan.close_pairs == std::vector<std::size_t>{0, 1});
    CHECK_FALSE(scan.warnings.empty());
}

TEST_CASE("find_roots warns about a tangential root") {
    const auto scan = find_roots([](double x) { return (x - 1.234) * (x - 1.234); }, 0.0, 3.0, 0.1);
    CHECK(scan.roots.empty());
    REQUIRE(scan.tangential.size() == 1);
    CHECK(std::abs(scan.tangential[0] - 1.234) < 1e-4);
    CHECK(scan.warnings.size() == 1);
}

TEST_CASE("period_phi0") {
    CHECK(period_phi0(1.0, 1.0 / 3.0, 1, 3) == doctest::Approx(6 * pi).epsilon(1e-14));
    CHECK(period_phi0(2.0, 0.5, 1, 4) == doctest::Approx(2 * pi).epsilon(1e-14));
    CHECK_THROWS_AS(period_phi0(1.0, 0.5, 1, 2), Error);
    CHECK_THROWS_AS(period_phi0(1.0, 0.5, 2, 4), Error);   // not lowest terms
    CHECK_THROWS_AS(period_phi0(1.0, 0.25, 1, 3), Error);  // ratio mismatch

    // periodicity oracle: sample phi0(mu + P) - phi0(mu)
    for (auto [l, l0, p1, p2] : {std::tuple{1.0, 1.0 / 3.0, 1L, 3L}, std::tuple{2.0, 0.5, 1L, 4L},
                                 std::tuple{1.0, 0.4, 2L, 5L}}) {
        const double P = period_phi0(l, l0, p1, p2);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double mu = 0.37 * i + 0.011;
            worst = std::max(worst, std::abs(phi0(mu + P, l, l0) - phi0(mu, l, l0)));
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("phi0 roots repeat with the period") {
    const double l = 1.0, l0 = 1.0 / 3.0;
    const double P = period_phi0(l, l0, 1, 3);
    const double shift = 0.5;  // window edges away from the roots at multiples of 3 pi
    const auto r = phi0_roots(l, l0, 1e-3, 3 * P);
    std::vector<double> first, second;
    for (double x : r) {
        if (x >= shift && x < P + shift) first.push_back(x);
        if (x >= P + shift && x < 2 * P + shift) second.push_back(x);
    }
    REQUIRE(first.size() == second.size());
    CHECK(first.size() == 6);
    for (std::size_t i = 0; i < first.size(); ++i) CHECK(std::abs(first[i] + P - second[i]) < 1e-10);
}

TEST_CASE("phi_full in the pure-beam limit has roots n pi / l") {
    const BeamSystem s = pure_beam_limit(0.5);
    const auto scan = find_roots([&](double mu) { return phi_full(mu, s); }, 1e-3, 20.0, pi / 10);
    REQUIRE(scan.roots.size() == 6);
    for (int n = 1; n <= 6; ++n) CHECK(std::abs(scan.roots[n - 1] - n * pi) < 1e-6);
    // sign alternates between consecutive roots
    for (int n = 1; n <= 5; ++n) {
        const double left = phi_full((n + 0.5) * pi - 0.3, s);
        const double right = phi_full((n + 1.5) * pi - 0.3, s);
        CHECK(left * right < 0.0);
    }
}

TEST_CASE("phi_full vanishes at its roots") {
    const BeamSystem s = unit_beam(0.37, 0.8, 25.0);
    const auto scan = find_roots([&](double mu) { return phi_full(mu, s); }, 1e-3, 60.0, pi / 10);
    REQUIRE(scan.roots.size() >= 15);
    for (double r : scan.roots) CHECK(std::abs(phi_full(r, s)) < 1e-9);
    CHECK_THROWS_AS(phi_full(0.0, s), Error);
    CHECK(std::isfinite(phi_full(5000.0, s)));  // sinh(mu l) would overflow unscaled
}

TEST_CASE("mode_shape in the pure-beam limit is sqrt(2) sin(pi x)") {
    const BeamSystem s = pure_beam_limit(0.5);
    const auto scan = find_roots([&](double mu) { return phi_full(mu, s); }, 1e-3, 4.0, pi / 10);
    REQUIRE(scan.roots.size() == 1);
    const ModeShape m = mode_shape(scan.roots[0], s);
    const auto a = m.coeffs();
    CHECK(a[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(a[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(std::abs(a[1]) < 1e-6);
    CHECK(std::abs(a[3]) < 1e-6);
    for (double x : {0.1, 0.33, 0.5, 0.8})
        CHECK(m(x) == doctest::Approx(std::sqrt(2.0) * std::sin(pi * x)).epsilon(1e-6));
    CHECK(m.omega() == doctest::Approx(pi * pi).epsilon(1e-6));
}

TEST_CASE("mode shapes satisfy boundary, continuity and interface conditions") {
    const BeamSystem s = unit_beam(0.37, 0.8, 25.0);
    const ModalBasis basis = build_basis(s, {.n_modes = 15});
    REQUIRE(basis.size() == 15);
    for (const ModeShape& m : basis.modes) {
        const double scale = std::max({std::abs(m.scaled_coeffs()[0]), std::abs(m.scaled_coeffs()[2])});
        CHECK(std::abs(m(0.0)) < 1e-12 * scale);
        CHECK(std::abs(m.eval(1.0, 0, true)) < 1e-12 * scale);
        CHECK(std::abs(m.eval(0.0, 2)) < 1e-10 * scale * m.mu() * m.mu());
        CHECK(std::abs(m.eval(1.0, 2, true)) < 1e-10 * scale * m.mu() * m.mu());
        const auto r = m.residuals(s);
        CHECK(r.continuity_u < 1e-8);
        CHECK(r.continuity_du < 1e-8);
        CHECK(r.continuity_ddu < 1e-8);
        CHECK(r.interface_jump < 1e-8);
        const auto rule = basis.quadrature({}, 15);
        CHECK(std::abs(mass_inner_product(s, m, m, rule) - 1.0) < 1e-10);
    }
}

TEST_CASE("antisymmetric modes have a node at l0 = l/2") {
    const BeamSystem s = pure_beam_limit(0.5);
    const ModalBasis basis = build_basis(s, {.n_modes = 6});
    REQUIRE(basis.size() == 6);
    for (std::size_t j = 0; j < 6; ++j) {
        if (j % 2 == 1)
            CHECK(std::abs(basis.modes[j].at_l0()) < 1e-8);
        else
            CHECK(std::abs(basis.modes[j].at_l0()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    }
}

TEST_CASE("build_basis: generalized orthogonality of the first 15 modes") {
    for (const BeamSystem& s : {unit_beam(0.5, 0.1, 10.0), unit_beam(0.23, 2.0, 300.0), unit_beam(0.81, 0.01, 1.0)}) {
        const ModalBasis basis = build_basis(s, {.n_modes = 15});
        REQUIRE(basis.size() == 15);
        CHECK(orthogonality_error(basis) < 1e-6);
        for (std::size_t i = 1; i < basis.size(); ++i) CHECK(basis.modes[i].mu() > basis.modes[i - 1].mu());
    }
}

TEST_CASE("build_basis with an explicit ceiling") {
    const BeamSystem s = pure_beam_limit(0.3);
    const ModalBasis basis = build_basis(s, {.mu_max = 10.0, .n_modes = 0});
    CHECK(basis.size() == 3);
    const ModalBasis few = build_basis(s, {.mu_max = 2.0, .n_modes = 0});
    CHECK(few.size() == 0);
}

TEST_CASE("a double root is detected and kept out of the basis") {
    // l0 = l/2: antisymmetric modes sit at mu = 2 pi n regardless of the shaker.
    // Tune kappa so the symmetric branch also passes through mu = 2 pi.
    const double mu = 2 * pi, m = 0.1;
    const double kappa = m * std::pow(mu, 4) + 4 * std::pow(mu, 3) / std::tanh(mu / 2);
    const BeamSystem s = unit_beam(0.5, m, kappa);
    CHECK_THROWS_AS(mode_shape(mu, s), Error);
    const ModalBasis basis = build_basis(s, {.n_modes = 6});
    REQUIRE_FALSE(basis.excluded_roots.empty());
    CHECK(std::abs(basis.excluded_roots.front() - mu) < 1e-4);
    CHECK_FALSE(basis.warnings.empty());
    for (const auto& md : basis.modes) CHECK(std::abs(md.mu() - mu) > 1e-3);
}

TEST_CASE("eigenvalue growth fit") {
    const ModalBasis basis = build_basis(pure_beam_limit(0.41), {.n_modes = 12});
    const GrowthFit fit = eigenvalue_growth_check(basis);
    CHECK(fit.slope == doctest::Approx(pi).epsilon(1e-6));
    CHECK(fit.relative_residual < 1e-6);
    CHECK(fit.count == 12);

    const ModalBasis small = build_basis(pure_beam_limit(0.41), {.n_modes = 5});
    CHECK_THROWS_AS(eigenvalue_growth_check(small), Error);
}

TEST_CASE("phi0 root spacing averages P / (roots per period)") {
    // l0/l = 1/2 is periodic with 2 pi and two roots per period
    const auto r = phi0_roots(1.0, 0.5, 1e-3, 20 * 2 * pi + 0.1);
    REQUIRE(r.size() == 40);
    const GrowthFit fit = fit_linear_growth(r);
    CHECK(fit.slope == doctest::Approx(pi).epsilon(1e-3));
}

TEST_CASE("counting functions") {
    const std::vector<double> mus{1.0, 2.0, 3.0};
    CHECK(counting_function(mus, 5.0) == 2);
    CHECK(counting_function(mus, 4.0) == 1);
    CHECK(counting_function({}, 100.0) == 0);
    CHECK(window_count(mus, 2.0, 8.0) == 2);
    CHECK(window_count_bound(100, 0, 6 * pi, 6) == doctest::Approx(8.0));
}

TEST_CASE("window density shrinks as the window moves out") {
    const auto r = phi0_roots(1.0, 1.0 / 3.0, 1e-3, 500.0);
    double prev = 1e300;
    for (double y = 100.0; y <= 25600.0; y *= 4.0) {
        const double density = static_cast<double>(window_count(r, y, y)) / y;
        CHECK(density < prev);
        prev = density;
    }
}
