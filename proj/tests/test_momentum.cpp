#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "mtf/momentum_functional.hpp"
#include "mtf/random_profiles.hpp"

using namespace mtf;

namespace {

constexpr double kPi = std::numbers::pi;
const double kBallVolume = 4.0 * kPi / 3.0;

RadialProfile momentum_ball(double level = 1.0)
{
    std::vector<double> r, v;
    for (int k = 1; k <= 128; ++k) {
        r.push_back(k / 64.0);
        v.push_back(k <= 64 ? level : 0.0);
    }
    return RadialProfile(RadialGrid(r), v, Space::Momentum);
}

// Pair sum over shells written straight from the integrand, with its own
// shell volumes and min/max.
double naive_repulsion(const RadialProfile& tau, double gamma)
{
    const auto& g = tau.grid();
    long double acc = 0.0L;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double vi = 4.0 * kPi / 3.0 * (std::pow(g[i], 3) - std::pow(g.inner(i), 3));
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double vj = 4.0 * kPi / 3.0 * (std::pow(g[j], 3) - std::pow(g.inner(j), 3));
            const double lo = std::min(tau[i], tau[j]), hi = std::max(tau[i], tau[j]);
            acc += static_cast<long double>(vi) * vj * (lo * std::pow(hi, 2.0 / 3.0) - 0.2 * std::pow(lo, 5.0 / 3.0));
        }
    }
    return 0.75 / std::sqrt(gamma) * static_cast<double>(acc);
}

} // namespace

TEST(PairwiseExtremes, OrdersPair)
{
    const auto e = PairwiseExtremes::of(3.0, 1.0);
    EXPECT_EQ(e.tau_min, 1.0);
    EXPECT_EQ(e.tau_max, 3.0);
    const auto f = PairwiseExtremes::of(2.0, 2.0);
    EXPECT_EQ(f.tau_min, f.tau_max);
}

TEST(SubstitutedProfile, RoundTrip)
{
    Rng rng(31);
    const auto g = make_grid(GridScheme::Log, 128, 1e-2, 4.0);
    const auto tau = random_step_profile(rng, g, Space::Momentum, Ordering::Unordered);
    const auto back = SubstitutedProfile::from_density(tau).density();
    for (std::size_t i = 0; i < tau.size(); ++i)
        EXPECT_NEAR(back[i], tau[i], 1e-12 * std::max(tau[i], 1e-300));
    EXPECT_THROW(SubstitutedProfile(g, std::vector<double>(g.size(), -1.0)), DomainError);
}

TEST(KineticM, ClosedForms)
{
    EXPECT_EQ(kinetic_m(momentum_ball(0.0)), 0.0);
    EXPECT_NEAR(kinetic_m(momentum_ball()), 4.0 * kPi / 5.0, 1e-13);
    EXPECT_NEAR(kinetic_m(momentum_ball(2.0)), 8.0 * kPi / 5.0, 1e-13);
}

TEST(AttractionM, ClosedForms)
{
    const auto cfg = AtomConfig::unit_gamma();
    EXPECT_EQ(attraction_m(momentum_ball(0.0), cfg), 0.0);
    EXPECT_NEAR(attraction_m(momentum_ball(), cfg), 2.0 * kPi, 1e-13);
    EXPECT_NEAR(attraction_m(momentum_ball(8.0), cfg), 8.0 * kPi, 1e-12);
}

TEST(RepulsionMDirect, BallAndHomogeneity)
{
    const auto cfg = AtomConfig::unit_gamma();
    const double expected = 0.6 * kBallVolume * kBallVolume;
    EXPECT_EQ(repulsion_m_direct(momentum_ball(0.0), cfg), 0.0);
    EXPECT_NEAR(repulsion_m_direct(momentum_ball(), cfg), expected, 1e-12);
    EXPECT_NEAR(repulsion_m_direct(momentum_ball(2.0), cfg), std::pow(2.0, 5.0 / 3.0) * expected, 1e-11);
}

TEST(RepulsionMLayerCake, BallFixesConstant)
{
    // both paths must give 3/5 (4 pi / 3)^2 on the unit ball at gamma = 1
    const auto cfg = AtomConfig::unit_gamma();
    const double expected = 0.6 * kBallVolume * kBallVolume;
    EXPECT_EQ(repulsion_m_layercake(momentum_ball(0.0), cfg), 0.0);
    EXPECT_NEAR(repulsion_m_layercake(momentum_ball(), cfg), expected, 1e-12);
    // P(t) = V (1 - t^2) gives int P^2 = V^2 8/15, so C = expected / (V^2 8/15)
    EXPECT_NEAR(layercake_constant(cfg), expected / (kBallVolume * kBallVolume * 8.0 / 15.0), 1e-14);
}

TEST(RepulsionM, PathsAgreeOnRandomProfiles)
{
    Rng rng(32);
    const AtomConfig cfg(1.0, 1.0, 2.0);
    const auto g = make_grid(GridScheme::Log, 512, 1e-3, 6.0);
    for (int i = 0; i < 20; ++i) {
        const auto tau =
            random_step_profile(rng, g, Space::Momentum, i % 2 ? Ordering::Unordered : Ordering::Decreasing);
        const double d = repulsion_m_direct(tau, cfg), l = repulsion_m_layercake(tau, cfg);
        EXPECT_NEAR(l / d, 1.0, 1e-5) << "profile " << i;
    }
}

TEST(RepulsionMDirect, MatchesNaivePairSum)
{
    Rng rng(33);
    const AtomConfig cfg(1.0, 1.0, 2.0);
    const auto g = make_grid(GridScheme::Log, 96, 1e-2, 3.0);
    const auto tau = random_step_profile(rng, g, Space::Momentum, Ordering::Unordered);
    EXPECT_NEAR(repulsion_m_direct(tau, cfg) / naive_repulsion(tau, cfg.gamma()), 1.0, 1e-12);
}

TEST(MomentumFunctional, Homogeneity)
{
    Rng rng(34);
    const auto cfg = AtomConfig(3.0, 3.0, 2.0);
    const auto g = make_grid(GridScheme::Log, 256, 1e-3, 6.0);
    const auto tau = random_step_profile(rng, g, Space::Momentum, Ordering::Unordered);
    const double lam = 2.3;
    const auto s = tau.scaled(lam);
    EXPECT_NEAR(kinetic_m(s) / kinetic_m(tau), lam, 1e-12);
    EXPECT_NEAR(attraction_m(s, cfg) / attraction_m(tau, cfg), std::pow(lam, 2.0 / 3.0), 1e-12);
    EXPECT_NEAR(repulsion_m_direct(s, cfg) / repulsion_m_direct(tau, cfg), std::pow(lam, 5.0 / 3.0), 1e-12);
}

TEST(EnergyMTF, BallEqualsPositionBall)
{
    const auto cfg = AtomConfig::unit_gamma();
    const auto e = energy_mtf(momentum_ball(), cfg);
    EXPECT_NEAR(e.total, 4.0 * kPi / 5.0 - 2.0 * kPi + 0.6 * kBallVolume * kBallVolume, 1e-12);
    EXPECT_EQ(energy_mtf(momentum_ball(0.0), cfg).total, 0.0);
    const auto l = energy_mtf(momentum_ball(), cfg, RepulsionPath::LayerCake);
    EXPECT_NEAR(l.total, e.total, 1e-12);
    EXPECT_STREQ(to_string(RepulsionPath::LayerCake), "layercake");
}

TEST(EnergyS, IndicatorAndConvexity)
{
    const auto cfg = AtomConfig::unit_gamma();
    const auto ball = momentum_ball();
    const SubstitutedProfile sb(ball.grid(), {ball.values().begin(), ball.values().end()});
    EXPECT_NEAR(energy_s(sb, cfg), energy_mtf(ball, cfg).total, 1e-14);

    Rng rng(35);
    const auto g = make_grid(GridScheme::Log, 256, 1e-3, 4.0);
    for (int i = 0; i < 20; ++i) {
        const auto a = random_step_profile(rng, g, Space::Momentum, Ordering::Unordered);
        const auto b = random_step_profile(rng, g, Space::Momentum, Ordering::Unordered);
        std::vector<double> m(g.size());
        for (std::size_t j = 0; j < m.size(); ++j)
            m[j] = 0.5 * (a[j] + b[j]);
        const double ea = energy_s(SubstitutedProfile(g, {a.values().begin(), a.values().end()}), cfg);
        const double eb = energy_s(SubstitutedProfile(g, {b.values().begin(), b.values().end()}), cfg);
        const double em = energy_s(SubstitutedProfile(g, m), cfg);
        EXPECT_GT(0.5 * (ea + eb) - em, 0.0) << "pair " << i;
    }
}

TEST(MomentumFunctional, RearrangementInvariantsAndInequality)
{
    Rng rng(36);
    const AtomConfig cfg(1.0, 1.0, 2.0);
    const auto g = make_grid(GridScheme::Log, 256, 1e-3, 5.0);
    for (int i = 0; i < 20; ++i) {
        const auto tau = random_step_profile(rng, g, Space::Momentum, Ordering::Unordered);
        const auto star = rearrange_decreasing(tau);
        EXPECT_NEAR(attraction_m(star, cfg) / attraction_m(tau, cfg), 1.0, 1e-6);
        EXPECT_NEAR(repulsion_m_direct(star, cfg) / repulsion_m_direct(tau, cfg), 1.0, 1e-6);
        EXPECT_LE(energy_mtf(star, cfg).total, energy_mtf(tau, cfg).total + 1e-8);
    }
}
