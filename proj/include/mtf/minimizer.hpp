#pragma once

// Thomas-Fermi minimizers in both spaces.
//
// minimizer_density builds rho_m from the ODE solution; minimizer_momentum is
// its image T(rho_m). direct_minimize_mtf minimizes E_mTF on a momentum grid
// without going through position space, in the variable sigma = tau^{2/3}
// where the functional is strictly convex.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "mtf/atom_config.hpp"
#include "mtf/momentum_functional.hpp"
#include "mtf/radial.hpp"
#include "mtf/tf_ode.hpp"
#include "mtf/transforms.hpp"

namespace mtf {

/// Pointwise rho_m(r) = gamma^{-3/2} (Z phi(r/b) / r)^{3/2}.
inline double tf_density_at(const TFSolution& sol, const AtomConfig& cfg, double r)
{
    const double p = std::max(sol.phi(r / sol.length_scale()), 0.0);
    const double w = cfg.Z() * p / r;
    return std::pow(cfg.gamma(), -1.5) * w * std::sqrt(w);
}

/// -(3/7) |phi'(0)| Z^2 / b, the neutral-atom TF energy.
inline double tf_neutral_energy(const TFSolution& sol, const AtomConfig& cfg)
{
    return -3.0 / 7.0 * std::abs(sol.slope0()) * cfg.Z() * cfg.Z() / sol.length_scale();
}

/// Log grid covering the minimizer: from 1e-9 b to the ionic radius (with 5%
/// margin) or to the tabulated extent of the neutral solution.
inline RadialGrid default_position_grid(const TFSolution& sol, std::size_t n)
{
    const double b = sol.length_scale();
    const double r_max = sol.neutral() ? b * sol.extent() : 1.05 * b * sol.x0();
    return make_grid(GridScheme::Log, n, 1e-9 * b, r_max);
}

/// Shell averages of rho_m on `grid`. Each shell holds its exact charge
/// Z int sqrt(x) phi^{3/2} dx divided by its volume.
inline RadialProfile minimizer_density(const TFSolution& sol, const AtomConfig& cfg, const RadialGrid& grid)
{
    const double b = sol.length_scale();
    if (!sol.neutral() && grid.r_max() < b * sol.x0())
        throw GridError("minimizer_density: grid ends at r = " + std::to_string(grid.r_max())
                        + " inside the ionic radius " + std::to_string(b * sol.x0()));
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = grid.inner(i), r = grid[i];
        const double charge = cfg.Z() * sol.enclosed_between(a / b, r / b);
        v[i] = std::max(charge, 0.0) / shell_volume(a, r);
    }
    // shell means of a decreasing function decrease; clamp round-off in the far tail
    for (std::size_t i = 1; i < v.size(); ++i)
        v[i] = std::min(v[i], v[i - 1]);
    return RadialProfile(grid, std::move(v), Space::Position);
}

/// T(rho_m): the momentum-space minimizer.
inline RadialProfile minimizer_momentum(const TFSolution& sol, const AtomConfig& cfg, const RadialGrid& grid)
{
    if (cfg.N() > cfg.Z())
        throw std::domain_error("minimizer_momentum: no minimizer on the mass shell for N > Z");
    return transform_T(minimizer_density(sol, cfg, grid), cfg);
}

/// Log momentum grid spanning 1e-4 .. 1e5 times sqrt(Z / b).
inline RadialGrid default_momentum_grid(const AtomConfig& cfg, std::size_t n)
{
    const double ps = std::sqrt(cfg.Z() / tf_length_scale(cfg));
    return make_grid(GridScheme::Log, n, 1e-4 * ps, 1e5 * ps);
}

struct DirectMinimizeResult {
    RadialProfile tau;
    bool converged = false;
    int iterations = 0;      // Newton steps over all multiplier updates
    double energy = 0.0;     // E_mTF(tau), direct repulsion path
    double mass = 0.0;
    double multiplier = 0.0; // Lagrange multiplier of the mass bound
};

namespace detail {

// E_s + mu (mass - N) on a fixed grid, with gradient and Hessian-vector
// products. The repulsion enters through its layer-cake form; sorting the
// values once per point makes value, gradient and Hessian products
// O(n log n).
class SigmaLagrangian {
public:
    SigmaLagrangian(const AtomConfig& cfg, const RadialGrid& grid)
        : vol_(grid.shell_volumes()), w2_(grid.shell_moments(2)), ca_(1.5 * cfg.Z() / std::sqrt(cfg.gamma())),
          c_(layercake_constant(cfg)), n_target_(cfg.N())
    {
    }

    std::size_t size() const { return vol_.size(); }

    void set_point(const std::vector<double>& sigma, double mu)
    {
        sigma_ = sigma;
        mu_ = mu;
        const std::size_t n = sigma_.size();
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return sigma_[a] > sigma_[b]; });
        pos_.resize(n);
        for (std::size_t q = 0; q < n; ++q)
            pos_[order_[q]] = q;
        a_.assign(n, 0.0);
        b_.assign(n, 0.0);
        s_.assign(n, 0.0);
        CompensatedSum ca, cb;
        for (std::size_t q = 0; q < n; ++q) {
            const std::size_t j = order_[q];
            ca += vol_[j] * sigma_[j];
            cb += vol_[j];
            a_[j] = ca.value();
            b_[j] = cb.value();
        }
        CompensatedSum cs;
        for (std::size_t q = n; q-- > 0;) {
            const std::size_t j = order_[q];
            s_[j] = cs.value();
            cs += vol_[j] * sigma_[j] * std::sqrt(sigma_[j]);
        }
    }

    double value(const std::vector<double>& sigma, double mu) const
    {
        CompensatedSum k, a, m;
        for (std::size_t j = 0; j < sigma.size(); ++j) {
            const double s32 = sigma[j] * std::sqrt(sigma[j]);
            k += w2_[j] * s32;
            a += vol_[j] * sigma[j];
            m += vol_[j] * s32;
        }
        const double rep = c_ * layercake_square_integral(sigma, vol_);
        return k.value() - ca_ * a.value() + rep + mu * (m.value() - n_target_);
    }

    double mass(const std::vector<double>& sigma) const
    {
        CompensatedSum m;
        for (std::size_t j = 0; j < sigma.size(); ++j)
            m += vol_[j] * sigma[j] * std::sqrt(sigma[j]);
        return m.value();
    }

    std::vector<double> gradient() const
    {
        std::vector<double> g(sigma_.size());
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double s = sigma_[j], rs = std::sqrt(s);
            const double rep = 2.0 * c_ * vol_[j] * (rs * a_[j] - s * rs * b_[j] / 3.0 + 2.0 / 3.0 * s_[j]);
            g[j] = 1.5 * (w2_[j] + mu_ * vol_[j]) * rs - ca_ * vol_[j] + rep;
        }
        return g;
    }

    /// d mass / d sigma.
    std::vector<double> mass_gradient() const
    {
        std::vector<double> g(sigma_.size());
        for (std::size_t j = 0; j < g.size(); ++j)
            g[j] = 1.5 * vol_[j] * std::sqrt(sigma_[j]);
        return g;
    }

    std::vector<double> diagonal() const
    {
        std::vector<double> d(sigma_.size());
        for (std::size_t j = 0; j < d.size(); ++j)
            d[j] = own_curvature(j) + 2.0 * c_ * vol_[j] * vol_[j] * std::sqrt(sigma_[j]);
        return d;
    }

    std::vector<double> hess_vec(const std::vector<double>& v) const
    {
        const std::size_t n = v.size();
        // inner[j] = sum_k vol_k v_k sqrt(min(sigma_j, sigma_k))
        std::vector<double> out(n);
        std::vector<double> prefix(n), suffix(n);
        double acc = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            const std::size_t k = order_[q];
            acc += vol_[k] * v[k];
            prefix[q] = acc;
        }
        acc = 0.0;
        for (std::size_t q = n; q-- > 0;) {
            suffix[q] = acc;
            const std::size_t k = order_[q];
            acc += vol_[k] * v[k] * std::sqrt(sigma_[k]);
        }
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t q = pos_[j];
            const double inner = std::sqrt(sigma_[j]) * prefix[q] + suffix[q];
            out[j] = own_curvature(j) * v[j] + 2.0 * c_ * vol_[j] * inner;
        }
        return out;
    }

private:
    double own_curvature(std::size_t j) const
    {
        const double s = sigma_[j], rs = std::sqrt(s);
        return (0.75 * (w2_[j] + mu_ * vol_[j]) + c_ * vol_[j] * (a_[j] - s * b_[j])) / rs;
    }

    std::vector<double> vol_, w2_;
    double ca_, c_, n_target_;
    std::vector<double> sigma_;
    double mu_ = 0.0;
    std::vector<std::size_t> order_, pos_;
    std::vector<double> a_, b_, s_;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    CompensatedSum s;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s.value();
}

// Jacobi-preconditioned conjugate gradients for H x = rhs.
inline std::vector<double> solve_pcg(const SigmaLagrangian& f, const std::vector<double>& rhs, double rel_tol,
                                     int max_iter)
{
    const std::size_t n = rhs.size();
    const auto diag = f.diagonal();
    std::vector<double> x(n, 0.0), r(rhs), z(n), p(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = r[i] / diag[i];
    p = z;
    double rz = dot(r, z);
    const double stop = rel_tol * rel_tol * rz;
    for (int it = 0; it < max_iter && rz > stop; ++it) {
        const auto hp = f.hess_vec(p);
        const double php = dot(p, hp);
        if (!(php > 0.0))
            break;
        const double alpha = rz / php;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * hp[i];
            z[i] = r[i] / diag[i];
        }
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    return x;
}

struct InnerStats {
    int iterations = 0;
    bool converged = false;
};

// Damped Newton on the convex Lagrangian for fixed mu. Steps are clipped so
// that no component shrinks by more than a factor 100, then backtracked to
// satisfy an Armijo condition.
inline InnerStats newton_fixed_mu(SigmaLagrangian& f, std::vector<double>& sigma, double mu, int budget, double tol)
{
    InnerStats st;
    double value = f.value(sigma, mu);
    const std::size_t n = sigma.size();
    std::vector<double> trial(n);
    for (; st.iterations < budget; ++st.iterations) {
        f.set_point(sigma, mu);
        const auto g = f.gradient();
        std::vector<double> neg_g(n);
        for (std::size_t i = 0; i < n; ++i)
            neg_g[i] = -g[i];
        const auto step = solve_pcg(f, neg_g, 1e-10, 2000);
        const double decrement = -dot(g, step);
        if (decrement < 0.5 * tol * std::max(1.0, std::abs(value))) {
            st.converged = true;
            break;
        }
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
            double slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = std::max(sigma[i] + alpha * step[i], 0.01 * sigma[i]);
                slope += g[i] * (trial[i] - sigma[i]);
            }
            const double tv = f.value(trial, mu);
            if (tv <= value + 1e-4 * slope) {
                accepted = true;
                const double drop = value - tv;
                sigma.swap(trial);
                value = tv;
                if (drop <= tol * std::max(1.0, std::abs(value)) && alpha == 1.0) {
                    st.converged = true;
                    ++st.iterations;
                    return st;
                }
                break;
            }
        }
        if (!accepted) {
            // no further decrease is representable
            st.converged = true;
            break;
        }
    }
    return st;
}

} // namespace detail

/// Minimizes E_mTF over step densities on `grid` subject to mass <= N.
///
/// For N <= Z the bound is active and the result has mass N; for N > Z the
/// minimizer saturates at mass Z. Works in sigma = tau^{2/3} (convex): damped
/// Newton for fixed multiplier mu, and a safeguarded Newton iteration on mu
/// for the mass constraint. `max_iter` caps the total number of Newton steps;
/// hitting it returns the current iterate with converged = false.
inline DirectMinimizeResult direct_minimize_mtf(const AtomConfig& cfg, const RadialGrid& grid, int max_iter = 500,
                                                double tol = 1e-12)
{
    detail::SigmaLagrangian f(cfg, grid);
    const std::size_t n = grid.size();

    // hydrogen-like start, scaled to mass min(N, Z)
    const double ps = std::sqrt(cfg.Z() / tf_length_scale(cfg));
    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = grid[j] / ps;
        sigma[j] = std::pow(1.0 + t * t, -8.0 / 3.0);
    }
    const double target = std::min(cfg.N(), cfg.Z());
    const double scale = std::pow(target / f.mass(sigma), 2.0 / 3.0);
    for (double& s : sigma)
        s *= scale;

    int used = 0;
    bool ok = true;
    auto inner = [&](double mu) {
        const auto st = detail::newton_fixed_mu(f, sigma, mu, max_iter - used, tol);
        used += st.iterations;
        ok = ok && st.converged;
    };

    double mu = 0.0;
    inner(mu);
    const double N = cfg.N();
    const double mass_tol = 1e-10 * std::max(N, 1e-300);
    if (f.mass(sigma) > N + mass_tol) {
        // mass(mu) decreases with mu: bracket, then Newton with bisection fallback
        double lo = 0.0, hi = 0.0;
        double mu_try = std::max(1e-3, 0.1 * cfg.Z() / tf_length_scale(cfg));
        for (int k = 0; k < 200 && used < max_iter; ++k) {
            std::vector<double> saved = sigma;
            ok = true;
            inner(mu_try);
            if (f.mass(sigma) < N) {
                hi = mu_try;
                sigma.swap(saved);
                break;
            }
            lo = mu_try;
            mu_try *= 4.0;
        }
        ok = true;
        mu = 0.5 * (lo + hi);
        for (int k = 0; k < 200 && used < max_iter; ++k) {
            ok = true;
            inner(mu);
            const double m = f.mass(sigma);
            if (std::abs(m - N) <= mass_tol)
                break;
            (m > N ? lo : hi) = mu;
            f.set_point(sigma, mu);
            const auto dg = f.mass_gradient();
            const auto w = detail::solve_pcg(f, dg, 1e-12, 4000);
            const double dm = -detail::dot(dg, w);
            double next = dm < 0.0 ? mu - (m - N) / dm : 0.5 * (lo + hi);
            if (!(next > lo && next < hi))
                next = 0.5 * (lo + hi);
            if (hi - lo <= 1e-15 * hi) {
                break;
            }
            mu = next;
        }
    }

    SubstitutedProfile sub(grid, sigma);
    DirectMinimizeResult res{sub.density(), ok && used < max_iter, used, 0.0, 0.0, mu};
    res.mass = mass(res.tau);
    res.energy = energy_mtf(res.tau, cfg).total;
    return res;
}

} // namespace mtf
