"""Command-line surface: reduction dumps, spectra, constants, Regge CSV.

All output is deterministic: fixed column order, floats printed with 17
significant digits, comments prefixed by '#'.  Exit codes: 0 success,
2 usage/configuration error, 3 numerical failure.

Defaults (overridable by --config key=value file or flags):

    a        0.27 GeV^2     confining slope
    alpha    0.27           short-range coupling
    structure 2.7           structure code(s), e.g. "2.7" or "2.7+2.3"
    j-min/j-max 8..64       spectrum sweep range
    nr-max   2              radial excitations
    mass1/mass2 0.0         quark masses (GeV)
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .errors import ConfigError, LargejError
from .meson import (
    FAMILIES,
    FIT_LADDER,
    MesonPotentialSpec,
    check_properties,
    compute_trajectories,
    constants_j_set,
    extract_constants,
    family_orbital,
    make_meson_model,
    run_constants,
)
from .structures import SCALAR_CODES, VECTOR_CODES


def _fmt(x: float) -> str:
    if x != x:
        return "nan"
    return format(float(x), ".17g")


def _write_lines(path: Optional[str], lines: Sequence[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


@dataclass
class RunConfig:
    structure: str = "2.7"
    j_min: int = 8
    j_max: int = 64
    nr_max: int = 2
    mass1: float = 0.0
    mass2: float = 0.0
    a: float = 0.27
    alpha: float = 0.27
    e: float = 2.0
    j: int = 8
    sector: str = "pseudo"
    r_min: float = 1e-2
    r_max: float = 50.0
    n_r_points: int = 512
    vector_linear: bool = False
    out: Optional[str] = None
    ladder: Sequence[int] = field(default_factory=lambda: FIT_LADDER)

    def spec(self) -> MesonPotentialSpec:
        scalar = None
        vector = None
        for part in self.structure.split("+"):
            part = part.strip()
            if not part:
                continue
            if part in SCALAR_CODES:
                if scalar is not None:
                    raise ConfigError("two scalar structures given")
                scalar = part
            elif part in VECTOR_CODES:
                if vector is not None:
                    raise ConfigError("two vector structures given")
                vector = part
            else:
                raise ConfigError(
                    f"unknown structure code {part!r}; scalar codes {SCALAR_CODES}, "
                    f"vector codes {VECTOR_CODES}"
                )
        return MesonPotentialSpec(
            scalar_structure=scalar,
            vector_structure=vector,
            alpha=self.alpha,
            a=self.a,
            m1=self.mass1,
            m2=self.mass2,
            vector_profile="linear" if self.vector_linear else "coulomb",
        )


def _load_config_file(path: str) -> Dict[str, str]:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file {path!r} not found")
    out: Dict[str, str] = {}
    for ln, raw in enumerate(p.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


_FIELD_TYPES = {
    "structure": str,
    "j_min": int,
    "j_max": int,
    "nr_max": int,
    "mass1": float,
    "mass2": float,
    "a": float,
    "alpha": float,
    "e": float,
    "j": int,
    "r_min": float,
    "r_max": float,
    "n_r_points": int,
    "vector_linear": lambda s: s.lower() in ("1", "true", "yes"),
    "sector": str,
    "out": str,
}


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, val in _load_config_file(args.config).items():
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, _FIELD_TYPES[key](val))
    for key in _FIELD_TYPES:
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if cfg.j_min > cfg.j_max:
        raise ConfigError("empty j range (j-min > j-max)")
    if cfg.nr_max < 0:
        raise ConfigError("nr-max must be >= 0")
    return cfg


def cmd_reduce(cfg: RunConfig) -> List[str]:
    """CSV of channel functions r, W1, W2, Y, Z, det_V22 at fixed (E, j)."""
    from .reduction import channel_functions, split_system

    spec = cfg.spec()
    if cfg.sector not in ("pseudo", "natural"):
        raise ConfigError(f"unknown parity sector {cfg.sector!r}")
    model = make_meson_model(spec)
    sector = model.sectors[cfg.sector]
    ch = sector.channels(cfg.j)
    lines = [
        f"# structure={spec.label()} j={cfg.j} E={_fmt(cfg.e)} parity_sector={cfg.sector}",
        "r,W1,W2,Y,Z,det_V22",
    ]
    import numpy as np

    for r in np.geomspace(cfg.r_min, cfg.r_max, cfg.n_r_points):
        try:
            pt = ch.point(float(r), cfg.e)
            lines.append(
                ",".join(
                    _fmt(v)
                    for v in (r, pt.w1, pt.w2, pt.y, pt.z, pt.det_v22)
                )
            )
        except LargejError as exc:
            lines.append(f"# skipped r={_fmt(float(r))}: {type(exc).__name__}")
    for pole in ch.scan_poles(cfg.e, r_min=cfg.r_min, r_max=cfg.r_max):
        lines.append(f"# pole: which={pole.which} r={_fmt(pole.r)} E={_fmt(pole.e)}")
    return lines


def cmd_spectrum(cfg: RunConfig) -> List[str]:
    spec = cfg.spec()
    model = make_meson_model(spec)
    table = compute_trajectories(
        model, range(cfg.j_min, cfg.j_max + 1), range(cfg.nr_max + 1)
    )
    lines = [
        f"# structure={spec.label()} a={_fmt(cfg.a)} alpha={_fmt(cfg.alpha)} "
        f"m1={_fmt(cfg.mass1)} m2={_fmt(cfg.mass2)}",
        "j,n_r,family,E,E2,label,status",
    ]
    for row in table.sorted_rows():
        lines.append(
            f"{row.j},{row.n_r},{row.family},{_fmt(row.e)},{_fmt(row.e_sq)},"
            f"{row.label},{row.status}"
        )
    return lines


def cmd_constants(cfg: RunConfig, with_masses: bool = True) -> List[str]:
    spec = cfg.spec()
    if spec.m1 != 0.0 or spec.m2 != 0.0:
        raise ConfigError("constants runs use massless input; masses are scanned internally")
    fit, table = run_constants(spec, ladder=cfg.ladder, with_masses=with_masses)
    report = check_properties(fit, table)
    lines = [
        "structure,k,eta,kappa,zeta,delta1,delta2,k_spread,eta_spread,kappa_spread",
        ",".join(
            [spec.label()]
            + [
                _fmt(v)
                for v in (
                    fit.k,
                    fit.eta,
                    fit.kappa_ls,
                    fit.zeta,
                    fit.delta1,
                    fit.delta2,
                    fit.diagnostics.get("k_spread", float("nan")),
                    fit.diagnostics.get("eta_spread", float("nan")),
                    fit.diagnostics.get("kappa_spread", float("nan")),
                )
            ]
        ),
    ]
    lines.append("# property report:")
    for text in report.lines():
        lines.append("# " + text)
    return lines


def cmd_regge(cfg: RunConfig) -> List[str]:
    spec = cfg.spec()
    model = make_meson_model(spec)
    table = compute_trajectories(
        model, range(cfg.j_min, cfg.j_max + 1), range(cfg.nr_max + 1)
    )
    lines = [
        f"# structure={spec.label()} a={_fmt(cfg.a)}",
        "structure,family,n_r,ell,j,E2",
    ]
    slopes: Dict[str, float] = {}
    for fam in FAMILIES:
        for n_r in range(cfg.nr_max + 1):
            rows = table.select(fam, n_r)
            for row in rows:
                lines.append(
                    f"{spec.label()},{fam},{n_r},{family_orbital(fam, row.j)},"
                    f"{row.j},{_fmt(row.e_sq)}"
                )
            if len(rows) >= 2 and n_r == 0:
                slope = (rows[-1].e_sq - rows[0].e_sq) / (
                    family_orbital(fam, rows[-1].j) - family_orbital(fam, rows[0].j)
                )
                slopes[fam] = slope
    for fam, slope in slopes.items():
        lines.append(f"# slope_E2_vs_ell family={fam} sigma={_fmt(slope)}")
    return lines


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="largej",
        description="Spectral solver for two-fermion bound states via the "
        "large-j pseudo-perturbative expansion",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--structure", type=str, default=None,
                       help="structure code(s), e.g. 2.7 or 2.7+2.3")
        p.add_argument("--j-min", dest="j_min", type=int, default=None)
        p.add_argument("--j-max", dest="j_max", type=int, default=None)
        p.add_argument("--nr-max", dest="nr_max", type=int, default=None)
        p.add_argument("--mass1", type=float, default=None)
        p.add_argument("--mass2", type=float, default=None)
        p.add_argument("--a", type=float, default=None, help="confining slope (GeV^2)")
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--vector-linear", dest="vector_linear",
                       action="store_const", const=True, default=None,
                       help="use a linear (confining) vector profile")
        p.add_argument("--out", type=str, default=None, help="output path ('-' = stdout)")
        p.add_argument("--config", type=str, default=None, help="key=value config file")

    p_reduce = sub.add_parser("reduce", help="dump channel functions on an r grid")
    add_common(p_reduce)
    p_reduce.add_argument("--j", type=int, default=None)
    p_reduce.add_argument("--sector", type=str, default=None,
                          help="parity sector: pseudo (default) or natural")
    p_reduce.add_argument("--E", dest="e", type=float, default=None)
    p_reduce.add_argument("--r-min", dest="r_min", type=float, default=None)
    p_reduce.add_argument("--r-max", dest="r_max", type=float, default=None)
    p_reduce.add_argument("--points", dest="n_r_points", type=int, default=None)

    p_spec = sub.add_parser("spectrum", help="zero-order level table")
    add_common(p_spec)

    p_const = sub.add_parser("constants", help="trajectory constants and properties")
    add_common(p_const)
    p_const.add_argument("--no-masses", action="store_true",
                         help="skip the small-mass runs (zeta, delta1, delta2)")

    p_regge = sub.add_parser("regge", help="plot-ready (ell, E^2) long-format CSV")
    add_common(p_regge)

    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "reduce":
            lines = cmd_reduce(cfg)
        elif args.command == "spectrum":
            lines = cmd_spectrum(cfg)
        elif args.command == "constants":
            lines = cmd_constants(cfg, with_masses=not args.no_masses)
        elif args.command == "regge":
            lines = cmd_regge(cfg)
        else:  # pragma: no cover
            raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LargejError as exc:
        print(f"numerical failure ({cfg.structure}): {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3
    _write_lines(cfg.out, lines)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
