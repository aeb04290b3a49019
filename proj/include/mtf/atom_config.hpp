#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mtf {

/// Physical parameters of the atom: nuclear charge Z, electron number N and
/// the number of spin states q. The Thomas-Fermi constant
/// gamma = (6 pi^2 / q)^{2/3} is derived and cannot be set on its own.
///
/// q is a positive real so that the gauge q = 6 pi^2 (gamma = 1) is available.
class AtomConfig {
public:
    AtomConfig(double Z, double N, double q) : Z_(Z), N_(N), q_(q)
    {
        if (!(Z > 0.0) || !std::isfinite(Z))
            throw std::invalid_argument("AtomConfig: Z must be a positive finite number");
        if (!(N >= 0.0) || !std::isfinite(N))
            throw std::invalid_argument("AtomConfig: N must be nonnegative and finite");
        if (!(q > 0.0) || !std::isfinite(q))
            throw std::invalid_argument("AtomConfig: q must be a positive finite number");
        gamma_ = std::pow(6.0 * std::numbers::pi * std::numbers::pi / q, 2.0 / 3.0);
    }

    /// Config with gamma = 1 (q = 6 pi^2). Closed forms on indicator profiles
    /// become exact in this gauge.
    static AtomConfig unit_gamma(double Z = 1.0, double N = 1.0)
    {
        return AtomConfig(Z, N, 6.0 * std::numbers::pi * std::numbers::pi);
    }

    double Z() const noexcept { return Z_; }
    double N() const noexcept { return N_; }
    double q() const noexcept { return q_; }
    double gamma() const noexcept { return gamma_; }

    AtomConfig with_N(double N) const { return AtomConfig(Z_, N, q_); }

private:
    double Z_;
    double N_;
    double q_;
    double gamma_;
};

} // namespace mtf
