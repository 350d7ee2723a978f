"""Local Pohozaev identities: quadrature refinement for exact bubble and
kernel pairs, both pairings, and the imbalance on a reduced solution."""

from pathlib import Path

import numpy as np

from _common import at_well, parser, well_config, write_csv
from bubblekit.config import SystemConfig
from bubblekit.ground_state import solve_ground_state
from bubblekit.pohozaev import (
    PohozaevDomain,
    PotentialField,
    ReducedSolution,
    bubble_pair,
    dilation_defect,
    dilation_kernel_pair,
    pohozaev_dilation,
    pohozaev_translation,
    translation_defect,
)
from bubblekit.reduction import solve_nonlinear_contraction

N = 5


def main():
    args = parser(__doc__).parse_args()
    out = Path(args.out)
    ball = PohozaevDomain("ball", (0.0,) * N, (5.0,))
    c = np.array([0.7, 0.4, 0, 0, 0])
    flat = PotentialField()
    rows = []
    for pv in (7 / 3, 2.25):
        gs = solve_ground_state(SystemConfig.from_p(N, pv))
        v, xi = bubble_pair(gs, c), dilation_kernel_pair(gs, c)
        for n in (4, 8, 16):
            tr = pohozaev_translation(v, xi, flat, flat, ball, 0, gs.p, gs.q, N, n)
            for pairing in ("derived", "swapped"):
                di = pohozaev_dilation(v, xi, flat, flat, ball, np.zeros(N), gs.p, gs.q, N, n, pairing=pairing)
                rows.append([pv, n, pairing, tr.residual, di.residual])
    write_csv(out / "pohozaev_exact.csv", ["p", "level", "pairing", "translation_residual", "dilation_residual"], rows)
    gs = solve_ground_state(SystemConfig.symmetric(N))
    config = well_config()
    cfg = at_well(config, 2)
    sol = ReducedSolution(gs, cfg, config, solve_nonlinear_contraction(gs, cfg, config))
    rows = []
    for R in (0.75, 1.5, 3.0):
        x0 = sol.centers[0] + np.array([0.3, 0.5, 0.2, 0, 0])
        dom = PohozaevDomain("ball", tuple(x0), (R,))
        tr = pohozaev_translation(sol.v, sol.xi, sol.K1, sol.K2, dom, 0, gs.p, gs.q, N, 8)
        di = pohozaev_dilation(sol.v, sol.xi, sol.K1, sol.K2, dom, x0, gs.p, gs.q, N, 8)
        td, dd = translation_defect(sol, dom, 0, 8), dilation_defect(sol, dom, x0, 8)
        rows.append([R, tr.lhs - tr.rhs, td.defect, td.bound, di.lhs - di.rhs, dd.defect, dd.bound])
        print(f"R={R}: translation {tr.lhs - tr.rhs:.4g} (defect {td.defect:.4g}), dilation {di.lhs - di.rhs:.4g} (defect {dd.defect:.4g})")
    write_csv(
        out / "pohozaev_reduced.csv",
        ["R", "translation_imbalance", "translation_defect", "translation_bound", "dilation_imbalance", "dilation_defect", "dilation_bound"],
        rows,
    )


if __name__ == "__main__":
    main()
