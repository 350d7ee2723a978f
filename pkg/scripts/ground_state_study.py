"""Ground states along the critical hyperbola (N = 5): decay constants,
Green-identity residuals, tail slopes and kernel-residual convergence."""

from pathlib import Path

import numpy as np

from _common import parser, write_csv
from bubblekit.config import SystemConfig
from bubblekit.ground_state import green_consistency, kernel_basis, kernel_residual, solve_ground_state, tail_slope


def main():
    p = parser(__doc__)
    p.add_argument("--ps", default="2.2,2.25,2.3,2.3333333333333335")
    args = p.parse_args()
    out = Path(args.out)
    rows, kern = [], []
    for pv in map(float, args.ps.split(",")):
        gs = solve_ground_state(SystemConfig.from_p(5, pv))
        gc = green_consistency(gs)
        sU, sV = tail_slope(gs)
        rows.append([pv, gs.q, gs.v0, gs.a, gs.b, gc.residual_a, gc.residual_b, sU, sV])
        kb = kernel_basis(gs)
        for h in (0.2, 0.1, 0.05):
            kr = kernel_residual(gs, kb, h=h)
            kern.append([pv, h, kr.dilation, kr.translation])
        print(f"p={pv:.4f} q={gs.q:.4f} v0={gs.v0:.6f} a={gs.a:.4f} b={gs.b:.4f} slopes U {sU:.4f} V {sV:.4f}")
    write_csv(out / "ground_states.csv", ["p", "q", "v0", "a", "b", "green_res_a", "green_res_b", "slope_U", "slope_V"], rows)
    write_csv(out / "kernel_residuals.csv", ["p", "h", "dilation", "translation"], kern)
    r = np.linspace(0, 50, 501)
    gs = solve_ground_state(SystemConfig.symmetric(5))
    U, _ = gs.profile(r)
    write_csv(out / "profile_symmetric.csv", ["r", "U", "closed_form"], zip(r, U, (1 + r**2 / 15) ** -1.5))


if __name__ == "__main__":
    main()
