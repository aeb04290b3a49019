#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mtf/momentum_functional.hpp"
#include "mtf/position_functional.hpp"
#include "mtf/random_profiles.hpp"
#include "mtf/transforms.hpp"

using namespace mtf;

namespace {

constexpr double kPi = std::numbers::pi;

RadialGrid fine_steps()
{
    std::vector<double> r;
    for (int k = 1; k <= 256 * 40; ++k)
        r.push_back(k / 256.0);
    return RadialGrid(std::move(r));
}

RadialProfile unit_ball(Space s)
{
    std::vector<double> r, v;
    for (int k = 1; k <= 64; ++k) {
        r.push_back(k / 32.0);
        v.push_back(k <= 32 ? 1.0 : 0.0);
    }
    return RadialProfile(RadialGrid(r), v, s);
}

RadialProfile exp_profile(Space s, std::size_t n = 4096)
{
    const auto g = make_grid(GridScheme::Log, n, 1e-5, 45.0);
    return RadialProfile::from_function(g, [](double r) { return std::exp(-r); }, s);
}

} // namespace

TEST(FermiRadius, BallLevels)
{
    const auto cfg = AtomConfig::unit_gamma();
    const auto ball = unit_ball(Space::Position);
    EXPECT_EQ(fermi_radius(ball, cfg, 0.5), 1.0);
    EXPECT_EQ(fermi_radius(ball, cfg, 1.0), 1.0);
    EXPECT_EQ(fermi_radius(ball, cfg, 2.0), 0.0);
    EXPECT_EQ(FermiRadiusCurve(ball, cfg).support_radius(), 1.0);
}

TEST(FermiRadius, ExponentialLevelSet)
{
    const auto cfg = AtomConfig::unit_gamma();
    const auto g = fine_steps();
    const auto rho = RadialProfile::from_function(g, [](double r) { return std::exp(-r); }, Space::Position,
                                                  Sampling::Node);
    EXPECT_NEAR(fermi_radius(rho, cfg, std::exp(-1.0 / 3.0)), 1.0, 1.0 / 256.0);
    EXPECT_NEAR(fermi_radius(rho, cfg, std::exp(-2.0 / 3.0)), 2.0, 1.0 / 256.0);
}

TEST(FermiRadius, NonincreasingAndRightContinuousOnPlateaus)
{
    Rng rng(41);
    const auto cfg = AtomConfig(1.0, 1.0, 2.0);
    const auto g = make_grid(GridScheme::Log, 256, 1e-2, 5.0);
    const auto rho = random_step_profile(rng, g, Space::Position, Ordering::Decreasing);
    const FermiRadiusCurve curve(rho, cfg);
    double prev = curve(0.0);
    for (double s = 0.01; s < 3.0; s += 0.01) {
        const double r = curve(s);
        EXPECT_LE(r, prev);
        prev = r;
    }
    // at a plateau level the sup is the outer edge of the plateau
    const double level = std::sqrt(cfg.gamma()) * std::cbrt(rho[0]);
    std::size_t last = 0;
    while (last + 1 < rho.size() && rho[last + 1] == rho[0])
        ++last;
    EXPECT_EQ(curve(level), g[last]);
    EXPECT_EQ(curve(level * (1.0 + 1e-12)), 0.0);
}

TEST(FermiRadius, RejectsNonMonotone)
{
    const auto g = make_grid(GridScheme::Log, 32, 0.1, 2.0);
    std::vector<double> v(32, 0.0);
    v[2] = 1.0;
    const RadialProfile p(g, v, Space::Position);
    try {
        fermi_radius(p, AtomConfig::unit_gamma(), 0.5);
        FAIL() << "expected rejection";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("profile must be decreasing; rearrange first"), std::string::npos);
    }
    EXPECT_THROW(fermi_radius(unit_ball(Space::Position), AtomConfig::unit_gamma(), -1.0), std::invalid_argument);
}

TEST(TransformT, BallIsFixedPoint)
{
    const auto cfg = AtomConfig::unit_gamma();
    const auto tau = transform_T(unit_ball(Space::Position), cfg);
    EXPECT_EQ(tau.space(), Space::Momentum);
    EXPECT_LT(l1_distance(tau, unit_ball(Space::Momentum)), 1e-14);
}

TEST(TransformS, BallIsFixedPoint)
{
    const auto cfg = AtomConfig::unit_gamma();
    const auto rho = transform_S(unit_ball(Space::Momentum), cfg);
    EXPECT_EQ(rho.space(), Space::Position);
    EXPECT_LT(l1_distance(rho, unit_ball(Space::Position)), 1e-14);
}

TEST(Transforms, ZeroMapsToZero)
{
    const auto cfg = AtomConfig::unit_gamma();
    const auto g = make_grid(GridScheme::Log, 32, 0.1, 2.0);
    EXPECT_EQ(mass(transform_T(RadialProfile::zeros(g, Space::Position), cfg)), 0.0);
    EXPECT_EQ(mass(transform_S(RadialProfile::zeros(g, Space::Momentum), cfg)), 0.0);
    EXPECT_EQ(round_trip_residual(RadialProfile::zeros(g, Space::Position), cfg), 0.0);
}

TEST(TransformT, ExponentialImage)
{
    const auto cfg = AtomConfig::unit_gamma();
    const auto rho = exp_profile(Space::Position);
    const auto tau = transform_T(rho, cfg);
    EXPECT_NEAR(mass(tau) / (8.0 * kPi), 1.0, 1e-6);
    EXPECT_NEAR(mass(tau) / mass(rho), 1.0, 1e-12);
    for (double xi : {0.05, 0.2, 0.5, 0.8}) {
        const double expected = std::pow(-3.0 * std::log(xi), 3.0);
        EXPECT_NEAR(tau.at(xi) / expected, 1.0, 2e-2) << "xi = " << xi;
    }
    EXPECT_EQ(tau.at(1.01), 0.0);
}

TEST(TransformS, ExponentialImage)
{
    const auto cfg = AtomConfig::unit_gamma();
    const auto tau = exp_profile(Space::Momentum);
    const auto rho = transform_S(tau, cfg);
    EXPECT_NEAR(mass(rho) / mass(tau), 1.0, 1e-12);
    for (double x : {0.05, 0.2, 0.5, 0.8}) {
        const double expected = std::pow(-3.0 * std::log(x), 3.0);
        EXPECT_NEAR(rho.at(x) / expected, 1.0, 2e-2) << "x = " << x;
    }
}

TEST(Transforms, ImagesAreDecreasingAndIsometric)
{
    Rng rng(42);
    const AtomConfig cfg(2.0, 2.0, 2.0);
    const auto g = make_grid(GridScheme::Log, 1024, 1e-3, 10.0);
    for (int i = 0; i < 20; ++i) {
        const auto rho = random_step_profile(rng, g, Space::Position, Ordering::Decreasing);
        const auto tau = transform_T(rho, cfg);
        EXPECT_TRUE(is_nonincreasing(tau));
        EXPECT_NEAR(mass(tau) / mass(rho), 1.0, 1e-6);
        const auto back = transform_S(tau, cfg);
        EXPECT_TRUE(is_nonincreasing(back));
        EXPECT_NEAR(mass(back) / mass(rho), 1.0, 1e-6);
    }
}

TEST(Transforms, TermwiseDuality)
{
    Rng rng(43);
    const AtomConfig cfg(1.0, 1.0, 2.0);
    const auto g = make_grid(GridScheme::Log, 1024, 1e-3, 10.0);
    for (int i = 0; i < 10; ++i) {
        const auto rho = random_step_profile(rng, g, Space::Position, Ordering::Decreasing);
        const auto tau = transform_T(rho, cfg);
        EXPECT_NEAR(kinetic_m(tau) / kinetic_tf(rho, cfg), 1.0, 1e-4);
        EXPECT_NEAR(attraction_m(tau, cfg) / attraction_tf(rho, cfg), 1.0, 1e-4);
        EXPECT_NEAR(repulsion_m_direct(tau, cfg) / repulsion_tf(rho), 1.0, 1e-4);

        const auto t2 = random_step_profile(rng, g, Space::Momentum, Ordering::Decreasing);
        const auto r2 = transform_S(t2, cfg);
        EXPECT_NEAR(kinetic_tf(r2, cfg) / kinetic_m(t2), 1.0, 1e-4);
        EXPECT_NEAR(attraction_tf(r2, cfg) / attraction_m(t2, cfg), 1.0, 1e-4);
        EXPECT_NEAR(repulsion_tf(r2) / repulsion_m_direct(t2, cfg), 1.0, 1e-4);
    }
}

TEST(RoundTrip, Residuals)
{
    const auto cfg = AtomConfig::unit_gamma();
    EXPECT_EQ(round_trip_residual(unit_ball(Space::Position), cfg), 0.0);
    EXPECT_EQ(round_trip_residual(unit_ball(Space::Momentum), cfg), 0.0);
    const auto expo = exp_profile(Space::Position, 2048);
    EXPECT_LT(round_trip_residual(expo, cfg), 1e-3);
    EXPECT_LT(round_trip_residual(exp_profile(Space::Momentum, 2048), cfg), 1e-3);
}

TEST(Transforms, RejectWrongSpaceAndNonMonotone)
{
    const auto cfg = AtomConfig::unit_gamma();
    EXPECT_THROW(transform_T(unit_ball(Space::Momentum), cfg), DomainError);
    EXPECT_THROW(transform_S(unit_ball(Space::Position), cfg), DomainError);
    Rng rng(44);
    const auto g = make_grid(GridScheme::Log, 128, 1e-2, 3.0);
    auto p = random_step_profile(rng, g, Space::Momentum, Ordering::Unordered);
    if (is_nonincreasing(p)) {
        std::vector<double> v(p.values().begin(), p.values().end());
        v[0] = 0.0;
        v[1] = 1.0;
        p = RadialProfile(g, v, Space::Momentum);
    }
    EXPECT_THROW(transform_S(p, cfg), DomainError);
    EXPECT_NO_THROW(transform_S(rearrange_decreasing(p), cfg));
}
