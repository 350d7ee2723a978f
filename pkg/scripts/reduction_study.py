"""Projected nonlinear solves at the well radius: contraction factor,
||phi||_* mu^(m/2), multipliers and the half-ansatz bound for several k."""

import time
from pathlib import Path

from _common import WELL, at_well, parser, well_config, write_json
from bubblekit.config import SystemConfig
from bubblekit.ground_state import solve_ground_state
from bubblekit.reduction import solve_nonlinear_contraction, verify_decay_bound


def main():
    p = parser(__doc__)
    p.add_argument("--ks", default="2,4,8")
    args = p.parse_args()
    gs = solve_ground_state(SystemConfig.symmetric(5))
    config = well_config()
    runs = []
    for k in map(int, args.ks.split(",")):
        cfg = at_well(config, k)
        t0 = time.time()
        res = solve_nonlinear_contraction(gs, cfg, config)
        dec = verify_decay_bound(res, gs, cfg)
        run = {
            "k": k,
            "mu": cfg.mu,
            "star_norm": res.star_norm,
            "C": res.star_norm * cfg.mu ** (WELL.m / 2),
            "multipliers": list(res.multipliers),
            "contraction_factor": res.contraction_factor,
            "iterations": res.iterations,
            "half_ansatz_margin": dec.margin,
            "grid": list(res.grid.shape),
            "seconds": time.time() - t0,
        }
        runs.append(run)
        print(run)
    write_json(Path(args.out) / "reduction_study.json", {"runs": runs})


if __name__ == "__main__":
    main()
