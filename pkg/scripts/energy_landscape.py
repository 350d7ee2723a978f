"""Reduced energy F(mu r0, lambda) against the quadrature energy of the
ansatz, swept in lambda for several k."""

from pathlib import Path

import numpy as np

from _common import at_well, parser, well_config, write_csv
from bubblekit.config import SystemConfig
from bubblekit.energy import ansatz_energy, expansion_constants, fit_pair_coefficient, lambda_star_finite_k, reduced_energy, with_B2
from bubblekit.ground_state import solve_ground_state


def main():
    p = parser(__doc__)
    p.add_argument("--ks", default="2,4,8")
    p.add_argument("--points", type=int, default=12)
    args = p.parse_args()
    gs = solve_ground_state(SystemConfig.symmetric(5))
    config = well_config()
    consts = with_B2(expansion_constants(gs, config), fit_pair_coefficient(gs))
    rows = []
    for k in map(int, args.ks.split(",")):
        mu = config.mu(k)
        lam0 = lambda_star_finite_k(consts, k, mu)
        for lam in lam0 * np.linspace(0.4, 1.6, args.points):
            cfg = at_well(config, k, lam)
            e = ansatz_energy(gs, cfg, config, A=consts.A, levels=((30, 16, 8), (40, 24, 12)))
            rows.append([k, mu, lam0, lam, e.delta, e.error, reduced_energy(consts, cfg) - k * consts.A])
        print(f"k={k} mu={mu:g} lambda0={lam0:.4f}")
    write_csv(Path(args.out) / "energy_landscape.csv", ["k", "mu", "lambda0", "lambda", "ansatz_delta", "quad_error", "reduced_delta"], rows)


if __name__ == "__main__":
    main()
