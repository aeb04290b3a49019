#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "mtf/position_functional.hpp"
#include "mtf/random_profiles.hpp"

using namespace mtf;

namespace {

constexpr double kPi = std::numbers::pi;
const double kBallCharge = 4.0 * kPi / 3.0;

RadialGrid unit_steps(int per_unit, int units)
{
    std::vector<double> r;
    for (int k = 1; k <= per_unit * units; ++k)
        r.push_back(static_cast<double>(k) / per_unit);
    return RadialGrid(std::move(r));
}

RadialProfile ball(double level = 1.0)
{
    const auto g = unit_steps(64, 2);
    std::vector<double> v(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] <= 1.0)
            v[i] = level;
    return RadialProfile(g, v, Space::Position);
}

// (4 pi)^2 int int r^2 s^2 rho(r) rho(s) / (2 max(r, s)) dr ds, with every
// shell split into `sub` midpoint cells.
double brute_force_hartree(const RadialProfile& rho, int sub)
{
    std::vector<double> r, w;
    const auto& g = rho.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = g.inner(i), b = g[i], h = (b - a) / sub;
        for (int k = 0; k < sub; ++k) {
            const double lo = a + k * h, hi = lo + h;
            r.push_back(0.5 * (lo + hi));
            w.push_back(rho[i] * (hi * hi * hi - lo * lo * lo) / 3.0);
        }
    }
    long double acc = 0.0L;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j)
            acc += static_cast<long double>(w[i]) * w[j] / (2.0 * std::max(r[i], r[j]));
    return 16.0 * kPi * kPi * static_cast<double>(acc);
}

} // namespace

TEST(KineticTF, ClosedForms)
{
    const auto cfg = AtomConfig::unit_gamma();
    EXPECT_EQ(kinetic_tf(ball(0.0), cfg), 0.0);
    EXPECT_NEAR(kinetic_tf(ball(), cfg), 0.6 * kBallCharge, 1e-13);
    EXPECT_NEAR(kinetic_tf(ball(2.0), cfg), std::pow(2.0, 5.0 / 3.0) * 0.6 * kBallCharge, 1e-12);
}

TEST(AttractionTF, ClosedForms)
{
    const auto cfg = AtomConfig::unit_gamma();
    EXPECT_EQ(attraction_tf(ball(0.0), cfg), 0.0);
    EXPECT_NEAR(attraction_tf(ball(), cfg), 2.0 * kPi, 1e-13);
    EXPECT_NEAR(attraction_tf(ball(2.0), cfg), 4.0 * kPi, 1e-13);
}

TEST(RepulsionTF, UniformBallSelfEnergy)
{
    EXPECT_EQ(repulsion_tf(ball(0.0)), 0.0);
    EXPECT_NEAR(repulsion_tf(ball()), 0.6 * kBallCharge * kBallCharge, 1e-12);
    EXPECT_NEAR(repulsion_tf(ball(2.0)), 4.0 * 0.6 * kBallCharge * kBallCharge, 1e-11);
}

TEST(EnergyTF, BallTotal)
{
    const auto e = energy_tf(ball(), AtomConfig::unit_gamma());
    const double expected = 4.0 * kPi / 5.0 - 2.0 * kPi + 0.6 * kBallCharge * kBallCharge;
    EXPECT_NEAR(e.total, expected, 1e-12);
    EXPECT_NEAR(expected, 6.7576668, 1e-6);
    EXPECT_EQ(e.total, e.kinetic - e.attraction + e.repulsion);
}

TEST(EnergyTF, ZeroProfile)
{
    const auto e = energy_tf(ball(0.0), AtomConfig::unit_gamma());
    EXPECT_EQ(e.total, 0.0);
}

TEST(RepulsionTF, MatchesBruteForceDoubleIntegral)
{
    Rng rng(21);
    const auto g = make_grid(GridScheme::Log, 64, 1e-2, 3.0);
    for (int i = 0; i < 5; ++i) {
        const auto rho = random_step_profile(rng, g, Space::Position, Ordering::Unordered);
        const double fast = repulsion_tf(rho);
        // midpoint error of the 1/max(r, s) kernel is O(h^2) per cell
        EXPECT_NEAR(brute_force_hartree(rho, 16) / fast, 1.0, 2e-3) << "profile " << i;
    }
}

TEST(RepulsionTF, BruteForceConvergesToSinglePass)
{
    Rng rng(22);
    const auto g = make_grid(GridScheme::Log, 48, 1e-2, 2.0);
    const auto rho = random_step_profile(rng, g, Space::Position, Ordering::Decreasing);
    const double fast = repulsion_tf(rho);
    const double e4 = std::abs(brute_force_hartree(rho, 4) - fast);
    const double e16 = std::abs(brute_force_hartree(rho, 16) - fast);
    EXPECT_LT(e16, 0.2 * e4);
}

TEST(PositionFunctional, Homogeneity)
{
    Rng rng(23);
    const auto cfg = AtomConfig(2.0, 2.0, 2.0);
    const auto g = make_grid(GridScheme::Log, 512, 1e-3, 6.0);
    const auto rho = random_step_profile(rng, g, Space::Position, Ordering::Unordered);
    const double lam = 1.7;
    const auto scaled = rho.scaled(lam);
    EXPECT_NEAR(kinetic_tf(scaled, cfg) / kinetic_tf(rho, cfg), std::pow(lam, 5.0 / 3.0), 1e-10);
    EXPECT_NEAR(attraction_tf(scaled, cfg) / attraction_tf(rho, cfg), lam, 1e-10);
    EXPECT_NEAR(repulsion_tf(scaled) / repulsion_tf(rho), lam * lam, 1e-10);
}

TEST(RepulsionTF, MonotoneUnderPointwiseIncrease)
{
    Rng rng(24);
    const auto g = make_grid(GridScheme::Log, 256, 1e-3, 4.0);
    const auto a = random_step_profile(rng, g, Space::Position, Ordering::Unordered);
    const auto b = random_step_profile(rng, g, Space::Position, Ordering::Unordered);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = a[i] + b[i];
    EXPECT_GE(repulsion_tf(RadialProfile(g, v, Space::Position)), repulsion_tf(a));
    EXPECT_GE(repulsion_tf(a), 0.0);
}

TEST(PositionFunctional, RejectsOutOfDomain)
{
    const auto g = make_grid(GridScheme::Log, 32, 0.1, 2.0);
    std::vector<double> v(32, 0.0);
    v[0] = -1.0;
    const RadialProfile bad(g, v, Space::Position);
    EXPECT_THROW(energy_tf(bad, AtomConfig::unit_gamma()), DomainError);
    const RadialProfile wrong_space(g, std::vector<double>(32, 0.0), Space::Momentum);
    EXPECT_THROW(repulsion_tf(wrong_space), DomainError);
}

TEST(PositionFunctional, OrderIndependentSummation)
{
    Rng rng(25);
    const auto g = make_grid(GridScheme::Log, 1024, 1e-4, 10.0);
    const auto rho = random_step_profile(rng, g, Space::Position, Ordering::Unordered);
    const double forward = attraction_tf(rho, AtomConfig::unit_gamma());
    double naive = 0.0;
    const auto w = g.shell_moments(-1);
    for (std::size_t i = w.size(); i-- > 0;)
        naive += w[i] * rho[i];
    EXPECT_NEAR(forward, naive, 1e-12 * forward);
}
