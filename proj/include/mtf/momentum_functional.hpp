#pragma once

// Momentum-space Thomas-Fermi functional
//   E_mTF(tau) = int xi^2 tau - 3/2 gamma^{-1/2} Z int tau^{2/3}
//              + 3/4 gamma^{-1/2} int int (tau_< tau_>^{2/3} - 1/5 tau_<^{5/3})
// on spherically symmetric step densities, with two evaluation paths for the
// repulsion term.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "mtf/atom_config.hpp"
#include "mtf/energy.hpp"
#include "mtf/radial.hpp"

namespace mtf {

/// tau_< and tau_> for a pair of density values.
struct PairwiseExtremes {
    double tau_min;
    double tau_max;

    static constexpr PairwiseExtremes of(double a, double b) noexcept
    {
        return a <= b ? PairwiseExtremes{a, b} : PairwiseExtremes{b, a};
    }
};

/// sigma = tau^{2/3}, the variable in which E_mTF is strictly convex.
class SubstitutedProfile {
public:
    SubstitutedProfile(RadialGrid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values))
    {
        if (values_.size() != grid_.size())
            throw GridError("substituted profile: value count does not match grid size");
        for (double s : values_)
            if (!(s >= 0.0) || !std::isfinite(s))
                throw DomainError("substituted profile: values must be finite and nonnegative");
    }

    static SubstitutedProfile from_density(const RadialProfile& tau)
    {
        require_space(tau, Space::Momentum, "SubstitutedProfile");
        std::vector<double> s(tau.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = std::pow(tau[i], 2.0 / 3.0);
        return SubstitutedProfile(tau.grid(), std::move(s));
    }

    /// tau = sigma^{3/2}
    RadialProfile density() const
    {
        std::vector<double> t(values_.size());
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] = values_[i] * std::sqrt(values_[i]);
        return RadialProfile(grid_, std::move(t), Space::Momentum);
    }

    const RadialGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    RadialGrid grid_;
    std::vector<double> values_;
};

inline double kinetic_m(const RadialProfile& tau)
{
    require_space(tau, Space::Momentum, "kinetic_m");
    require_domain(tau, "kinetic_m");
    return integrate_radial(tau, 2);
}

inline double attraction_m(const RadialProfile& tau, const AtomConfig& cfg)
{
    require_space(tau, Space::Momentum, "attraction_m");
    require_domain(tau, "attraction_m");
    const double c = 1.5 * cfg.Z() / std::sqrt(cfg.gamma());
    return c * integrate_radial_of(tau, 0, [](double v) { return std::pow(v, 2.0 / 3.0); });
}

/// Repulsion by the pairwise double integral. For step profiles the integrand
/// is constant on every pair of shells, so this is an exact O(n^2) double sum.
inline double repulsion_m_direct(const RadialProfile& tau, const AtomConfig& cfg)
{
    require_space(tau, Space::Momentum, "repulsion_m_direct");
    require_domain(tau, "repulsion_m_direct");
    const std::size_t n = tau.size();
    const auto vol = tau.grid().shell_volumes();
    std::vector<double> p23(n), p53(n);
    for (std::size_t i = 0; i < n; ++i) {
        p23[i] = std::pow(tau[i], 2.0 / 3.0);
        p53[i] = tau[i] * p23[i];
    }
    CompensatedSum total;
    for (std::size_t j = 0; j < n; ++j) {
        if (tau[j] == 0.0)
            continue;
        CompensatedSum row;
        for (std::size_t k = 0; k < j; ++k) {
            if (tau[k] == 0.0)
                continue;
            const auto ext = PairwiseExtremes::of(tau[j], tau[k]);
            const bool j_low = tau[j] <= tau[k];
            const double hi23 = j_low ? p23[k] : p23[j];
            const double lo53 = j_low ? p53[j] : p53[k];
            row += vol[k] * (ext.tau_min * hi23 - 0.2 * lo53);
        }
        total += vol[j] * (2.0 * row.value() + vol[j] * 0.8 * p53[j]);
    }
    return 0.75 / std::sqrt(cfg.gamma()) * total.value();
}

namespace detail {

// Returns int_0^inf P(t)^2 dt for P(t) = sum_i vol_i [sigma_i - t^2]_+.
// Between consecutive knots sqrt(sigma) the active set is fixed and
// P = alpha - beta t^2, a quartic after squaring; 3-point Gauss-Legendre is
// exact on each interval.
inline double layercake_square_integral(std::span<const double> sigma, std::span<const double> vol)
{
    std::vector<std::size_t> order;
    order.reserve(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i)
        if (sigma[i] > 0.0)
            order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

    static constexpr double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    CompensatedSum alpha, beta, acc;
    for (std::size_t k = 0; k < order.size(); ++k) {
        alpha += vol[order[k]] * sigma[order[k]];
        beta += vol[order[k]];
        const double hi = std::sqrt(sigma[order[k]]);
        const double lo = k + 1 < order.size() ? std::sqrt(sigma[order[k + 1]]) : 0.0;
        if (!(hi > lo))
            continue;
        const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
        const double al = alpha.value(), be = beta.value();
        double s = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double t = mid + half * gx[q];
            const double p = al - be * t * t;
            s += gw[q] * p * p;
        }
        acc += s * half;
    }
    return acc.value();
}

} // namespace detail

/// Prefactor of the layer-cake form R_m = C int_0^inf P(t)^2 dt. Fixed by the
/// uniform ball: both paths must give 3/5 (4 pi / 3)^2 at gamma = 1.
inline double layercake_constant(const AtomConfig& cfg) { return 1.125 / std::sqrt(cfg.gamma()); }

/// Repulsion via the level-set representation
///   R_m = C int_0^inf (int [sigma(xi) - t^2]_+ dxi)^2 dt,  sigma = tau^{2/3}.
inline double repulsion_m_layercake(const RadialProfile& tau, const AtomConfig& cfg)
{
    require_space(tau, Space::Momentum, "repulsion_m_layercake");
    require_domain(tau, "repulsion_m_layercake");
    std::vector<double> sigma(tau.size());
    for (std::size_t i = 0; i < sigma.size(); ++i)
        sigma[i] = std::pow(tau[i], 2.0 / 3.0);
    const auto vol = tau.grid().shell_volumes();
    return layercake_constant(cfg) * detail::layercake_square_integral(sigma, vol);
}

enum class RepulsionPath { Direct, LayerCake };

inline const char* to_string(RepulsionPath p) { return p == RepulsionPath::Direct ? "direct" : "layercake"; }

inline EnergyBreakdown energy_mtf(const RadialProfile& tau, const AtomConfig& cfg,
                                  RepulsionPath path = RepulsionPath::Direct)
{
    const double rep = path == RepulsionPath::Direct ? repulsion_m_direct(tau, cfg) : repulsion_m_layercake(tau, cfg);
    return EnergyBreakdown::assemble(kinetic_m(tau), attraction_m(tau, cfg), rep);
}

/// E_s(sigma) = E_mTF(sigma^{3/2}).
inline double energy_s(const SubstitutedProfile& sigma, const AtomConfig& cfg,
                       RepulsionPath path = RepulsionPath::Direct)
{
    return energy_mtf(sigma.density(), cfg, path).total;
}

} // namespace mtf
