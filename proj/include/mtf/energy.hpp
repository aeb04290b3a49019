#pragma once

namespace mtf {

/// Terms of either Thomas-Fermi functional, in units hbar = 2m = 1.
/// `attraction` is reported as a positive number and enters with a minus sign.
struct EnergyBreakdown {
    double kinetic = 0.0;
    double attraction = 0.0;
    double repulsion = 0.0;
    double total = 0.0;

    static EnergyBreakdown assemble(double kinetic, double attraction, double repulsion)
    {
        return {kinetic, attraction, repulsion, kinetic - attraction + repulsion};
    }
};

} // namespace mtf
