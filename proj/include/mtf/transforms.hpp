#pragma once

// Level-set maps between position and momentum densities.
//
//   T: rho -> tau,  tau(xi) = gamma^{-3/2} r(|xi|)^3,
//      r(s) = sup{ |y| : gamma^{1/2} rho(y)^{1/3} >= s }   (Fermi radius)
//   S: tau -> rho,  rho(x) = q/(2 pi)^3 |{ xi : |x| < gamma^{1/2} tau(xi)^{1/3} }|
//
// For a radially nonincreasing density both maps reflect the graph of the
// level function u = gamma^{1/2} f^{1/3} across the diagonal. On step profiles
// the reflection is exact: the image is again a step profile whose nodes are
// the distinct positive levels of the input.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mtf/atom_config.hpp"
#include "mtf/radial.hpp"

namespace mtf {

namespace detail {

inline void require_decreasing(const RadialProfile& p, const char* who)
{
    if (!is_nonincreasing(p))
        throw DomainError(std::string(who) + ": profile must be decreasing; rearrange first");
}

inline std::vector<double> level_function(const RadialProfile& p, double gamma)
{
    const double sg = std::sqrt(gamma);
    std::vector<double> u(p.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = sg * std::cbrt(p[i]);
    return u;
}

// Relative gap between the outermost level and the appended zero-valued node.
inline constexpr double tail_node_factor = 1.0625;

// Reflects the step profile across the diagonal of (radius, level) and returns
// the image on the grid of distinct positive levels. `prefactor` multiplies
// the cubed radius.
inline RadialProfile reflect_levels(const RadialProfile& p, double gamma, double prefactor, Space out_space)
{
    const auto u = level_function(p, gamma);
    const auto r = p.grid().nodes();

    std::vector<double> nodes, values; // built outermost level first
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0))
            break;
        const bool last_of_level = i + 1 == u.size() || u[i + 1] < u[i];
        if (!last_of_level)
            continue;
        nodes.push_back(u[i]);
        values.push_back(prefactor * r[i] * r[i] * r[i]);
    }
    if (nodes.empty())
        return RadialProfile::zeros(p.grid(), out_space);

    std::reverse(nodes.begin(), nodes.end());
    std::reverse(values.begin(), values.end());
    nodes.push_back(nodes.back() * tail_node_factor);
    values.push_back(0.0);

    if (nodes.size() < min_grid_nodes) {
        // subdivide the innermost ball; the step function is unchanged
        const std::size_t extra = min_grid_nodes - nodes.size();
        std::vector<double> pre(extra);
        for (std::size_t k = 0; k < extra; ++k)
            pre[k] = nodes.front() * std::ldexp(1.0, -static_cast<int>(extra - k));
        nodes.insert(nodes.begin(), pre.begin(), pre.end());
        values.insert(values.begin(), extra, values.front());
    }
    RadialProfile out(RadialGrid(std::move(nodes)), std::move(values), out_space);
    if (!is_nonincreasing(out) || out.values().front() < 0.0)
        throw std::logic_error("level-set image is not a nonnegative decreasing profile");
    return out;
}

} // namespace detail

/// The Fermi radius s -> r(s) of a nonincreasing position density.
class FermiRadiusCurve {
public:
    FermiRadiusCurve(const RadialProfile& rho, const AtomConfig& cfg) : source_(rho)
    {
        require_space(rho, Space::Position, "fermi_radius");
        require_domain(rho, "fermi_radius");
        detail::require_decreasing(rho, "fermi_radius");
        levels_ = detail::level_function(rho, cfg.gamma());
        const auto r = rho.grid().nodes();
        support_radius_ = 0.0;
        for (std::size_t i = 0; i < levels_.size(); ++i)
            if (levels_[i] > 0.0)
                support_radius_ = r[i];
    }

    /// r(s) = sup{|y| : gamma^{1/2} rho(y)^{1/3} >= s}; 0 when the set is
    /// empty. r(0) is taken as r(0+), the support radius.
    double operator()(double s) const
    {
        if (!(s > 0.0))
            return support_radius_;
        // levels are nonincreasing: the last node with level >= s ends the set
        const auto it = std::partition_point(levels_.begin(), levels_.end(), [s](double u) { return u >= s; });
        if (it == levels_.begin())
            return 0.0;
        return source_.grid()[static_cast<std::size_t>(it - levels_.begin()) - 1];
    }

    double support_radius() const noexcept { return support_radius_; }
    const RadialProfile& source() const noexcept { return source_; }

private:
    RadialProfile source_;
    std::vector<double> levels_;
    double support_radius_;
};

inline double fermi_radius(const RadialProfile& rho, const AtomConfig& cfg, double s)
{
    if (s < 0.0)
        throw std::invalid_argument("fermi_radius: level must be nonnegative");
    return FermiRadiusCurve(rho, cfg)(s);
}

/// tau(xi) = gamma^{-3/2} r(|xi|)^3. The image lives on the grid of distinct
/// positive levels of rho (plus one zero-valued tail node), where it is exact.
inline RadialProfile transform_T(const RadialProfile& rho, const AtomConfig& cfg)
{
    require_space(rho, Space::Position, "transform_T");
    require_domain(rho, "transform_T");
    detail::require_decreasing(rho, "transform_T");
    return detail::reflect_levels(rho, cfg.gamma(), std::pow(cfg.gamma(), -1.5), Space::Momentum);
}

/// rho(x) = q/(2 pi)^3 * (4 pi / 3) xi_F(|x|)^3 with
/// xi_F(a) = sup{|xi| : gamma^{1/2} tau(xi)^{1/3} > a}.
inline RadialProfile transform_S(const RadialProfile& tau, const AtomConfig& cfg)
{
    require_space(tau, Space::Momentum, "transform_S");
    require_domain(tau, "transform_S");
    detail::require_decreasing(tau, "transform_S");
    const double prefactor = cfg.q() / (8.0 * pi * pi * pi) * (four_pi / 3.0);
    return detail::reflect_levels(tau, cfg.gamma(), prefactor, Space::Position);
}

/// Relative L1 distance between p and S(T(p)) (position) or T(S(p)) (momentum).
inline double round_trip_residual(const RadialProfile& p, const AtomConfig& cfg)
{
    const RadialProfile back =
        p.space() == Space::Position ? transform_S(transform_T(p, cfg), cfg) : transform_T(transform_S(p, cfg), cfg);
    const double d = l1_distance(p, back);
    const double m = mass(p);
    return m > 0.0 ? d / m : d;
}

} // namespace mtf
