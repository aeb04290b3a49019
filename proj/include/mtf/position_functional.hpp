#pragma once

// Position-space Thomas-Fermi functional
//   E_TF(rho) = 3/5 gamma int rho^{5/3} - int Z/|x| rho + D[rho]
// on spherically symmetric step densities.

#include <cmath>
#include <cstddef>

#include "mtf/atom_config.hpp"
#include "mtf/energy.hpp"
#include "mtf/radial.hpp"

namespace mtf {

inline double kinetic_tf(const RadialProfile& rho, const AtomConfig& cfg)
{
    require_space(rho, Space::Position, "kinetic_tf");
    require_domain(rho, "kinetic_tf");
    return 0.6 * cfg.gamma() * integrate_radial_of(rho, 0, [](double v) { return std::pow(v, 5.0 / 3.0); });
}

inline double attraction_tf(const RadialProfile& rho, const AtomConfig& cfg)
{
    require_space(rho, Space::Position, "attraction_tf");
    require_domain(rho, "attraction_tf");
    return cfg.Z() * integrate_radial(rho, -1);
}

namespace detail {

// int_a^b r (r^3 - a^3) / 3 dr, written in t = (b - a) / a to avoid cancellation.
inline double shell_self_moment(double a, double b)
{
    if (a <= 0.0)
        return std::pow(b, 5.0) / 15.0;
    const double t = (b - a) / a;
    const double a5 = std::pow(a, 5.0);
    return a5 / 3.0 * (t * t * (1.5 + t * (2.0 + t * (1.0 + t / 5.0))));
}

} // namespace detail

/// Hartree energy D[rho] = 1/2 int int rho(x) rho(y) / |x - y|.
///
/// By Newton's theorem D = (4 pi)^2 int_0^inf r rho(r) M(r) dr with
/// M(r) = int_0^r s^2 rho(s) ds; for a step density both the cumulative charge
/// and the outer integral are closed-form per shell, giving one O(n) pass.
inline double repulsion_tf(const RadialProfile& rho)
{
    require_space(rho, Space::Position, "repulsion_tf");
    require_domain(rho, "repulsion_tf");
    const auto& g = rho.grid();
    CompensatedSum enclosed; // M(r_{j-1})
    CompensatedSum acc;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double a = g.inner(j), b = g[j], f = rho[j];
        acc += f * enclosed.value() * shell_power_diff(a, b, 2.0);
        acc += f * f * detail::shell_self_moment(a, b);
        enclosed += f * shell_power_diff(a, b, 3.0);
    }
    return four_pi * four_pi * acc.value();
}

inline EnergyBreakdown energy_tf(const RadialProfile& rho, const AtomConfig& cfg)
{
    return EnergyBreakdown::assemble(kinetic_tf(rho, cfg), attraction_tf(rho, cfg), repulsion_tf(rho));
}

} // namespace mtf
