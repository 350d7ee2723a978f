"""Command-line front end: ``bubblekit <command> [options]``.

Exit codes: 0 success, 2 invalid configuration or usage, 3 solver
failure, 4 input/output error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import platform
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from bubblekit import __version__
from bubblekit.config import ConfigError, SystemConfig, load_config, validate_hyperbola

FORMAT_VERSION = 1
EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    config_hash: str | None
    gs_hash: str | None
    parameters: dict
    outputs: dict = field(default_factory=dict)  # path -> sha256
    wall_time: float = 0.0
    version: str = __version__
    platform: str = field(default_factory=platform.platform)
    format_version: int = FORMAT_VERSION

    def add_output(self, path: str | Path) -> None:
        self.outputs[str(path)] = sha256_file(path)

    def write(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)


def manifest_path(out: str | Path) -> Path:
    return Path(str(out) + ".manifest.json")


def _write_json(path, payload: dict) -> None:
    payload = {"format_version": FORMAT_VERSION, **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


# ---------------------------------------------------------------------------
# shared loaders


def _load_config(args) -> SystemConfig:
    if not args.config:
        raise CliError("--config is required", EXIT_CONFIG)
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config: {exc}", EXIT_IO) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed config JSON: {exc}", EXIT_CONFIG) from exc
    if "N" in raw and "p" in raw and raw.get("q") is not None:
        rep = validate_hyperbola(int(raw["N"]), float(raw["p"]), float(raw["q"]))
        if not rep.valid:
            raise CliError(f"invalid exponents ({'; '.join(rep.errors)}); defect = {rep.defect:+.6e}", EXIT_CONFIG)
    try:
        return SystemConfig.from_dict(raw)
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc


def _load_gs(args):
    from bubblekit.ground_state import load_table

    if not args.gs:
        raise CliError("--gs is required", EXIT_CONFIG)
    try:
        return load_table(args.gs)
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"cannot read ground-state table {args.gs}: {exc}", EXIT_IO) from exc


def _bubble_cfg(args, config, gs_N):
    from bubblekit.ansatz import BubbleConfig

    mu = config.mu(args.k)
    r = mu * config.r0 if args.r in (None, "auto") else float(args.r)
    return BubbleConfig(args.k, r, args.lam, mu, config.r0)


def _manifest(args, command, config=None, params=None) -> RunManifest:
    gs_hash = sha256_file(args.gs) if getattr(args, "gs", None) and Path(args.gs).exists() else None
    return RunManifest(command, None if config is None else config.digest(), gs_hash, params or {})


def _finish(manifest: RunManifest, t0: float, main_out) -> None:
    manifest.wall_time = time.time() - t0
    manifest.write(manifest_path(main_out))


# ---------------------------------------------------------------------------
# commands


def cmd_ground_state(args) -> int:
    from bubblekit.ground_state import SolverError, save_table, solve_ground_state

    t0 = time.time()
    config = _load_config(args)
    try:
        gs = solve_ground_state(config, tol=args.tol or 1e-8)
    except (SolverError, ValueError) as exc:
        raise CliError(f"solver failed: {exc}", EXIT_SOLVER) from exc
    out = args.out or "gs.table"
    try:
        save_table(gs, out)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from exc
    man = _manifest(args, "ground-state", config, {"tol": args.tol or 1e-8})
    man.add_output(out)
    _finish(man, t0, out)
    print(f"v0={gs.v0:.12g} a={gs.a:.10g} b={gs.b:.10g} case={gs.decay_case} residual={gs.residual:.3e} -> {out}")
    return 0


def cmd_ansatz(args) -> int:
    from bubblekit.ansatz import NormParams, sample_ansatz, structured_samples, weighted_norm_dstar, weighted_norm_star

    t0 = time.time()
    config = _load_config(args)
    gs = _load_gs(args)
    cfg = _bubble_cfg(args, config, gs.N)
    pts = structured_samples(cfg, gs.N)
    if args.random_samples:
        rng = np.random.default_rng(args.seed)
        extra = rng.normal(size=(args.random_samples, gs.N)) * cfg.mu
        pts = np.concatenate([pts, extra])
    field_ = sample_ansatz(gs, cfg, pts, symmetric=args.symmetric)
    out = args.out or "ansatz.csv"
    params = NormParams(gs.N, args.eta)
    summary = {
        "k": cfg.k,
        "mu": cfg.mu,
        "r": cfg.r,
        "lam": cfg.lam,
        "samples": len(field_.points),
        "star_norm": weighted_norm_star(field_, cfg, params),
        "dstar_norm": weighted_norm_dstar(field_, cfg, params),
    }
    try:
        field_.to_csv(out)
        if args.report:
            _write_json(args.report, summary)
    except OSError as exc:
        raise CliError(f"cannot write output: {exc}", EXIT_IO) from exc
    man = _manifest(args, "ansatz", config, {**summary, "seed": args.seed})
    man.add_output(out)
    if args.report:
        man.add_output(args.report)
    _finish(man, t0, out)
    print(json.dumps(summary, default=_jsonable))
    return 0


def cmd_energy(args) -> int:
    from bubblekit.energy import (
        _cfg,
        ansatz_energy,
        expansion_constants,
        fit_pair_coefficient,
        lambda_star_finite_k,
        locate_critical_point,
        reduced_energy,
        with_B2,
    )

    t0 = time.time()
    config = _load_config(args)
    gs = _load_gs(args)
    cfg = _bubble_cfg(args, config, gs.N)
    consts = expansion_constants(gs, config)
    if args.fit_pair:
        consts = with_B2(consts, fit_pair_coefficient(gs))
    payload = {
        "constants": consts.to_dict(),
        "k": cfg.k,
        "mu": cfg.mu,
        "r": cfg.r,
        "lam": cfg.lam,
        "reduced_energy": reduced_energy(consts, cfg),
        "reduced_energy_asymptotic": reduced_energy(consts, cfg, "asymptotic"),
    }
    try:
        payload["lambda0_finite_k"] = lambda_star_finite_k(consts, cfg.k, cfg.mu)
        cp = locate_critical_point(consts, cfg.k, cfg.mu)
        payload["critical_point"] = {"r": cp.r, "lam": cp.lam, "grad_norm": cp.grad_norm, "signature": list(cp.signature)}
    except ConfigError as exc:
        payload["critical_point"] = {"error": str(exc)}
    if args.numeric:
        val = ansatz_energy(gs, cfg, config, A=expansion_constants(gs, config.with_potentials()).A)
        payload["ansatz_energy"] = {"value": val.value, "error": val.error, "delta": val.delta}
    out = args.out or "energy.json"
    sweep = None
    if args.sweep_lambda:
        try:
            lo, hi, step = (float(x) for x in args.sweep_lambda.split(":"))
            if not (0 < lo < hi and step > 0):
                raise ValueError("need 0 < start < stop and step > 0")
        except ValueError as exc:
            raise CliError(f"bad --sweep-lambda: {exc}", EXIT_CONFIG) from exc
        lams = np.arange(lo, hi + 0.5 * step, step)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            F = [reduced_energy(consts, _cfg(cfg.k, cfg.r, lam, cfg.mu, cfg.r0)) for lam in lams]
        i = int(np.argmax(F))
        payload["lambda_sweep"] = {"argmax": float(lams[i]), "points": len(lams)}
        sweep = Path(out).with_suffix(".sweep.csv") if str(out).endswith(".json") else Path(str(out) + ".sweep.csv")
    try:
        if sweep is not None:
            with open(sweep, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["lambda", "F"])
                w.writerows([repr(float(a)), repr(float(b))] for a, b in zip(lams, F))
        _write_json(out, payload)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from exc
    params = {"k": cfg.k, "lam": cfg.lam, "r": cfg.r, "numeric": args.numeric, "fit_pair": args.fit_pair, "sweep_lambda": args.sweep_lambda}
    man = _manifest(args, "energy", config, params)
    man.add_output(out)
    if sweep is not None:
        man.add_output(sweep)
    _finish(man, t0, out)
    print(json.dumps({k: payload[k] for k in ("reduced_energy", "critical_point")}, default=_jsonable))
    return 0


def _grid_sidecar(out) -> Path:
    return Path(str(out) + ".grid.json")


def cmd_reduce(args) -> int:
    from bubblekit.reduction import ReductionError, build_grid, solve_nonlinear_contraction, verify_decay_bound

    t0 = time.time()
    config = _load_config(args)
    gs = _load_gs(args)
    if args.k > 16:
        raise CliError("k > 16 is not supported", EXIT_CONFIG)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cfg = _bubble_cfg(args, config, gs.N)
    grid = build_grid(cfg, gs.N, h=args.h)
    try:
        res = solve_nonlinear_contraction(gs, cfg, config, tol=args.tol or 1e-10, grid=grid)
    except ReductionError as exc:
        raise CliError(f"reduction failed: {exc}", EXIT_SOLVER) from exc
    decay = verify_decay_bound(res, gs, cfg)
    report = res.to_dict()
    report.update(
        {
            "decay_bound": {"passed": decay.passed, "margin": decay.margin, "exponents": list(decay.exponents)},
            "E_constant": res.star_norm * cfg.mu ** (config.m / 2),
        }
    )
    out = args.out or "phi.csv"
    try:
        from bubblekit.ansatz import SampledField

        SampledField(res.phi1.points, np.stack([res.phi1.values, res.phi2.values], 1)).to_csv(out)
        _write_json(
            _grid_sidecar(out),
            {
                "config": config.to_dict(),
                "k": cfg.k,
                "r": cfg.r,
                "lam": cfg.lam,
                "mu": cfg.mu,
                "s_faces": grid.s_faces,
                "th_faces": grid.th_faces,
                "rho_faces": grid.rho_faces,
                "multipliers": list(res.multipliers),
            },
        )
        if args.report:
            _write_json(args.report, report)
    except OSError as exc:
        raise CliError(f"cannot write output: {exc}", EXIT_IO) from exc
    man = _manifest(args, "reduce", config, {"k": cfg.k, "lam": cfg.lam, "r": cfg.r, "tol": args.tol or 1e-10, "h": args.h})
    for p in (out, _grid_sidecar(out)) + ((args.report,) if args.report else ()):
        man.add_output(p)
    _finish(man, t0, out)
    print(json.dumps({k: report[k] for k in ("star_norm", "multipliers", "iterations", "contraction_factor")}, default=_jsonable))
    return 0


def _load_reduced(fields_path, gs):
    """Rebuild a reduction result (grid + fields) written by ``reduce``."""
    from bubblekit.ansatz import BubbleConfig, SampledField
    from bubblekit.reduction import ReductionResult, SectorGrid

    side = _grid_sidecar(fields_path)
    try:
        with open(side) as fh:
            meta = json.load(fh)
        f = SampledField.from_csv(fields_path)
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"cannot read fields {fields_path}: {exc}", EXIT_IO) from exc
    config = SystemConfig.from_dict(meta["config"])
    grid = SectorGrid(gs.N, int(meta["k"]), np.array(meta["s_faces"]), np.array(meta["th_faces"]), np.array(meta["rho_faces"]))
    if grid.size != len(f.points):
        raise CliError("field file does not match its grid description", EXIT_IO)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cfg = BubbleConfig(int(meta["k"]), float(meta["r"]), float(meta["lam"]), float(meta["mu"]), config.r0)
    res = ReductionResult(
        SampledField(f.points, f.values[:, 0]), SampledField(f.points, f.values[:, 1]), tuple(meta["multipliers"]), 0.0, 0, [], grid
    )
    return config, cfg, res


def cmd_pohozaev(args) -> int:
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

    t0 = time.time()
    gs = _load_gs(args)
    N = gs.N
    try:
        domain = PohozaevDomain.parse(args.domain, N)
    except (ValueError, IndexError) as exc:
        raise CliError(f"bad --domain: {exc}", EXIT_CONFIG) from exc
    axis = args.axis - 1
    if not 0 <= axis < N:
        raise CliError(f"--axis must be in 1..{N}", EXIT_CONFIG)
    x0 = np.array(domain.center if domain.center else (0.0,) * N)
    payload = {"domain": args.domain, "axis": args.axis, "level": args.level}
    if args.fields:
        config, cfg, res = _load_reduced(args.fields, gs)
        sol = ReducedSolution(gs, cfg, config, res)
        v, xi, K1, K2 = sol.v, sol.xi, sol.K1, sol.K2
        payload["translation_defect"] = asdict(translation_defect(sol, domain, axis, args.level))
        payload["dilation_defect"] = asdict(dilation_defect(sol, domain, x0, args.level))
        config_hash = config.digest()
    else:
        # self-check: unit bubble at the domain centre with its dilation kernel, K = 1
        v, xi = bubble_pair(gs, x0), dilation_kernel_pair(gs, x0)
        K1 = K2 = PotentialField()
        config_hash = gs.config.digest()
    tr = pohozaev_translation(v, xi, K1, K2, domain, axis, gs.p, gs.q, N, args.level)
    di = pohozaev_dilation(v, xi, K1, K2, domain, x0, gs.p, gs.q, N, args.level)
    payload["translation"] = tr.to_dict()
    payload["dilation"] = di.to_dict()
    out = args.out or "poh.json"
    try:
        _write_json(out, payload)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from exc
    man = RunManifest("pohozaev", config_hash, sha256_file(args.gs), {"domain": args.domain, "axis": args.axis, "fields": args.fields})
    man.add_output(out)
    _finish(man, t0, out)
    print(json.dumps({"translation_residual": tr.residual, "dilation_residual": di.residual}))
    return 0


SWEEPS = ("Rk_norm", "interaction", "contraction", "phi_norm")


def _slope(x, y):
    """Least-squares slope of log y against log x with a 95% half-width."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    ok = (x > 0) & (y > 0)
    if np.count_nonzero(ok) < 2:
        return None, None
    lx, ly = np.log(x[ok]), np.log(y[ok])
    if len(lx) == 2:
        return float((ly[1] - ly[0]) / (lx[1] - lx[0])), float("nan")
    coef, cov = np.polyfit(lx, ly, 1, cov=True)
    return float(coef[0]), float(1.96 * np.sqrt(cov[0, 0]))


def cmd_sweep(args) -> int:
    from bubblekit.ansatz import BubbleConfig
    from bubblekit.energy import pair_integral
    from bubblekit.reduction import ReductionError, dstar_norm_Rk, solve_nonlinear_contraction

    t0 = time.time()
    if not args.ks:
        raise CliError("empty k list", EXIT_CONFIG)
    try:
        ks = [int(x) for x in args.ks.split(",") if x.strip()]
    except ValueError as exc:
        raise CliError(f"bad k list: {exc}", EXIT_CONFIG) from exc
    if not ks:
        raise CliError("empty k list", EXIT_CONFIG)
    config = _load_config(args)
    gs = _load_gs(args)
    rows, failed = [], []
    for k in ks:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            mu = config.mu(k) if not config.flat else 1.0
            cfg = BubbleConfig(k, mu * config.r0, args.lam, mu, config.r0)
        try:
            if args.which == "Rk_norm":
                x, val = mu, dstar_norm_Rk(gs, cfg, config)
            elif args.which == "interaction":
                x = cfg.min_separation if k > 1 else float("nan")
                val = pair_integral(gs, x, args.lam) if k > 1 else 0.0
            else:
                if k > 16:
                    raise CliError("k > 16 is not supported for reduction sweeps", EXIT_CONFIG)
                res = solve_nonlinear_contraction(gs, cfg, config)
                x = mu
                val = res.contraction_factor if args.which == "contraction" else res.star_norm
        except ReductionError as exc:
            failed.append({"k": k, "error": str(exc)})
            continue
        rows.append((k, mu, x, float(val)))
    out = args.out or f"sweep_{args.which}.csv"
    slope, half = _slope([r[2] for r in rows], [r[3] for r in rows])
    try:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "mu", "x", "value"])
            for r in rows:
                w.writerow([r[0], repr(r[1]), repr(r[2]), repr(r[3])])
            w.writerow(["# slope", "undefined" if slope is None else repr(slope), "half_width", "undefined" if half is None else repr(half)])
            if failed:
                w.writerow(["# partial", json.dumps(failed)])
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from exc
    man = _manifest(args, "sweep", config, {"which": args.which, "ks": ks, "lam": args.lam, "slope": slope, "half_width": half})
    man.add_output(out)
    _finish(man, t0, out)
    print(f"slope={'undefined' if slope is None else f'{slope:.4f}'} half_width={half}")
    if failed:
        print(f"partial results: {len(failed)} sub-run(s) failed", file=sys.stderr)
        return EXIT_SOLVER
    return 0


def cmd_report(args) -> int:
    t0 = time.time()
    inputs = [Path(p) for p in args.inputs]
    missing = [str(p) for p in inputs if not p.exists()]
    if args.gs and not Path(args.gs).exists():
        missing.append(args.gs)
    if missing:
        raise CliError("missing inputs: " + ", ".join(missing), EXIT_IO)
    manifests = []
    for p in inputs:
        manifests.extend(sorted(p.glob("*.manifest.json")) if p.is_dir() else [p])
    entries, problems = [], []
    for mp in manifests:
        try:
            with open(mp) as fh:
                man = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            problems.append(f"{mp}: unreadable manifest ({exc})")
            continue
        for path, digest in man.get("outputs", {}).items():
            if not Path(path).exists():
                problems.append(f"{path}: missing (listed in {mp})")
            elif sha256_file(path) != digest:
                problems.append(f"{path}: checksum mismatch (listed in {mp})")
        entry = {"manifest": str(mp), "command": man.get("command"), "parameters": man.get("parameters", {})}
        for path in man.get("outputs", {}):
            if path.endswith(".json") and Path(path).exists():
                try:
                    with open(path) as fh:
                        data = json.load(fh)
                    if "verdicts" in data:
                        entry["verdicts"] = data["verdicts"]
                except (OSError, json.JSONDecodeError):
                    pass
        entries.append(entry)
    if problems:
        raise CliError("; ".join(problems), EXIT_IO)
    out = args.out or "report.json"
    payload = {"runs": entries}
    verdicts = [v for e in entries for v in e.get("verdicts", [])]
    if verdicts:
        payload["verdicts"] = verdicts
    try:
        _write_json(out, payload)
        with open(Path(out).with_suffix(".md"), "w") as fh:
            fh.write("# bubblekit report\n\n| command | manifest | parameters |\n|---|---|---|\n")
            for e in entries:
                fh.write(f"| {e['command']} | {e['manifest']} | {json.dumps(e['parameters'], sort_keys=True)} |\n")
            if verdicts:
                fh.write("\n## Verdicts\n\n")
                for v in verdicts:
                    fh.write(f"- {'PASS' if v.get('passed') else 'FAIL'} {v.get('name')}: {v.get('detail', '')}\n")
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from exc
    man = RunManifest("report", None, None, {"inputs": [str(p) for p in inputs]})
    man.add_output(out)
    _finish(man, t0, out)
    print(f"{len(entries)} run(s) aggregated -> {out}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="system configuration JSON")
    common.add_argument("--gs", help="ground-state table")
    common.add_argument("--out", help="main output file")
    common.add_argument("--tol", type=float, default=None, help="solver tolerance (command-specific default)")
    common.add_argument("--threads", type=int, default=None, help="BLAS/OpenMP threads (best effort)")
    common.add_argument("--seed", type=int, default=0)

    bubble = argparse.ArgumentParser(add_help=False)
    bubble.add_argument("-k", type=int, required=True)
    bubble.add_argument("--lambda", dest="lam", type=float, default=1.0)
    bubble.add_argument("--r", default="auto", help="ring radius or 'auto' (mu r0)")

    p = argparse.ArgumentParser(prog="bubblekit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ground-state", parents=[common], help="solve the radial ground state")
    s.set_defaults(func=cmd_ground_state)

    s = sub.add_parser("ansatz", parents=[common, bubble], help="sample the ansatz pair")
    s.add_argument("--eta", type=float, default=0.05)
    s.add_argument("--symmetric", action="store_true", help="close the sample set under the symmetry group")
    s.add_argument("--random-samples", type=int, default=0)
    s.add_argument("--report")
    s.set_defaults(func=cmd_ansatz)

    s = sub.add_parser("energy", parents=[common, bubble], help="reduced energy and expansion constants")
    s.add_argument("--numeric", action="store_true", help="also integrate the ansatz energy")
    s.add_argument("--fit-pair", action="store_true", help="fit B2 from two-bubble energies instead of a * int U^q")
    s.add_argument("--sweep-lambda", help="start:stop:step; writes F(r, lambda) next to the JSON output")
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("reduce", parents=[common, bubble], help="projected nonlinear solve")
    s.add_argument("--report")
    s.add_argument("--h", type=float, default=0.4, help="core grid spacing times lambda")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("pohozaev", parents=[common], help="check the local Pohozaev identities")
    s.add_argument("--fields", help="phi.csv written by 'reduce' (default: exact bubble self-check)")
    s.add_argument("--domain", default="ball:0:5")
    s.add_argument("--axis", type=int, default=1)
    s.add_argument("--level", type=int, default=8)
    s.set_defaults(func=cmd_pohozaev)

    s = sub.add_parser("sweep", parents=[common], help="rate sweeps over k")
    s.add_argument("--which", choices=SWEEPS, required=True)
    s.add_argument("--ks", default="8,16,32", help="comma-separated k list")
    s.add_argument("--lambda", dest="lam", type=float, default=1.0)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("report", parents=[common], help="aggregate manifests and verdicts")
    s.add_argument("inputs", nargs="+", help="manifest files or directories")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
