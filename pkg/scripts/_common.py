"""Shared helpers for the experiment scripts."""

import argparse
import csv
import json
import warnings
from pathlib import Path

from bubblekit.ansatz import BubbleConfig
from bubblekit.config import PotentialSpec, SystemConfig

WELL = PotentialSpec(r0=1.0, c=1.0, m=2.0, delta=0.9)


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", default="results", help="output directory")
    return p


def well_config(N: int = 5) -> SystemConfig:
    return SystemConfig.symmetric(N, potential1=WELL, potential2=WELL)


def at_well(config: SystemConfig, k: int, lam: float = 1.0) -> BubbleConfig:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return BubbleConfig.at_well(config, k, lam)


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path}")


def write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump({"format_version": 1, **payload}, fh, indent=2, sort_keys=True)
    print(f"wrote {path}")
