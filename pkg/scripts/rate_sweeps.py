"""Asymptotic rates: decay of the two-bubble interaction integral in the
separation, and of ||R_k||_** in mu along the well radius."""

from pathlib import Path

import numpy as np

from _common import at_well, parser, well_config, write_csv
from bubblekit.config import SystemConfig
from bubblekit.energy import interaction_coefficient
from bubblekit.ground_state import green_consistency, solve_ground_state
from bubblekit.reduction import dstar_norm_Rk


def main():
    p = parser(__doc__)
    p.add_argument("--ks", default="4,8,16,32,64")
    args = p.parse_args()
    out = Path(args.out)
    gs = solve_ground_state(SystemConfig.symmetric(5))
    rows = []
    for lam in (1.0, 1.5, 2.0):
        fit = interaction_coefficient(gs, lam=lam, strict=False)
        rows += [[lam, d, v] for d, v in zip(fit.separations, fit.values)]
        print(f"lambda={lam}: slope -{fit.slope:.4f}, B1 {fit.B1:.4f} (a int U^q = {gs.a * green_consistency(gs).mass_Uq:.4f})")
    write_csv(out / "interaction_law.csv", ["lambda", "d", "integral"], rows)
    config = well_config()
    rows = []
    for k in map(int, args.ks.split(",")):
        cfg = at_well(config, k)
        rows.append([k, cfg.mu, dstar_norm_Rk(gs, cfg, config)])
    mus, vals = np.array([r[1] for r in rows]), np.array([r[2] for r in rows])
    print(f"||R_k||_** slope vs log mu: {np.polyfit(np.log(mus), np.log(vals), 1)[0]:.4f}")
    write_csv(out / "Rk_rate.csv", ["k", "mu", "Rk_dstar"], rows)


if __name__ == "__main__":
    main()
