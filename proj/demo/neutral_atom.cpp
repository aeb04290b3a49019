// Neutral Thomas-Fermi atoms in both pictures.
//
// For a few nuclear charges: solve the screening equation, build rho_m on a
// log grid, map it to momentum space and compare the two energies with the
// closed form -(3/7)|phi'(0)| Z^2 / b.

#include <cstdio>

#include "mtf.hpp"

int main()
{
    std::printf("%6s %14s %14s %14s %12s\n", "Z", "E_TF(rho_m)", "E_mTF(T rho_m)", "closed form", "mass");
    for (double Z : {1.0, 2.0, 10.0, 36.0, 92.0}) {
        const mtf::AtomConfig cfg(Z, Z, 2.0);
        const auto sol = mtf::solve_tf_ode(cfg);
        const auto rho = mtf::minimizer_density(sol, cfg, mtf::default_position_grid(sol, 4096));
        const auto tau = mtf::transform_T(rho, cfg);
        std::printf("%6g %14.8f %14.8f %14.8f %12.8f\n", Z, mtf::energy_tf(rho, cfg).total,
                    mtf::energy_mtf(tau, cfg).total, mtf::tf_neutral_energy(sol, cfg), mtf::mass(rho));
    }
    return 0;
}
