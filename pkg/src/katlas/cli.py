"""Command-line front end: ``katlas {check-f,solve-q,thresholds,atlas,verify}``.

Exit codes: 0 success, 1 domain failure (assumptions, nonexistence, failed
verification, solver errors), 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rescale as rs
from .atlas_io import verify_atlas, verify_sweep, write_atlas, write_sweep
from .cache import solve_cached
from .errors import KatlasError
from .groundstate import ShootingConfig
from .kirchhoff import build_atlas
from .nonlinearity import PowerNonlinearity, check_berestycki_lions
from .report import dumps, write_json_atomic, write_profile_csv
from .rescale import Branch, KirchhoffParams

log = logging.getLogger("katlas")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Sweep:
    """Sweep of b; bounds are numbers or ``"<factor>*<threshold>"`` strings."""
    min: float | str
    max: float | str
    count: int = 25
    log: bool = False

    def values(self, names: dict[str, float]) -> np.ndarray:
        lo, hi = _resolve(self.min, names), _resolve(self.max, names)
        if not (0 < lo < hi):
            raise UsageError(f"sweep bounds must satisfy 0 < min < max (got {lo!r}, {hi!r})")
        if self.count < 2:
            raise UsageError("sweep count must be >= 2")
        return np.geomspace(lo, hi, self.count) if self.log else np.linspace(lo, hi, self.count)


_BOUND = re.compile(r"^\s*(?:([0-9.eE+-]+)\s*\*\s*)?([A-Za-z_]\w*)\s*$")


def _resolve(x, names: dict[str, float]) -> float:
    if isinstance(x, (int, float)):
        return float(x)
    m = _BOUND.match(str(x))
    if not m:
        raise UsageError(f"cannot parse sweep bound {x!r}")
    factor, name = m.groups()
    if name not in names:
        raise UsageError(f"unknown threshold {name!r} in sweep bound (have {sorted(names)})")
    return float(factor or 1.0) * names[name]


@dataclass
class RunConfig:
    nonlinearity: PowerNonlinearity
    N: int
    a: float = 1.0
    b: float | Sweep = 1.0
    k_max: int = 1
    solver: ShootingConfig = field(default_factory=ShootingConfig)
    lambdas: tuple[float, ...] = (0.5, 1.0, 2.0)
    out: Path = Path("katlas-out")
    cache: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.k_max < 1:
            raise UsageError("k_max must be >= 1")
        if isinstance(self.b, Sweep) and not isinstance(self.b.min, str) and not self.b.min > 0:
            raise UsageError("sweep bounds must be positive")

    def params(self, b: float | None = None) -> KirchhoffParams:
        return KirchhoffParams(self.a, self.b if b is None else b, self.N)


def load_config(args) -> RunConfig:
    raw: dict = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: malformed JSON ({exc})") from exc
        if not isinstance(raw, dict):
            raise UsageError("config must be a JSON object")
    for key, flag in (("a", "a"), ("b", "b"), ("N", "N"), ("k_max", "k_max"), ("out", "out"),
                      ("cache", "cache"), ("workers", "workers")):
        val = getattr(args, flag, None)
        if val is not None:
            raw[key] = val
    if "nonlinearity" not in raw or "N" not in raw:
        raise UsageError("config needs 'nonlinearity' and 'N'")
    try:
        nl = PowerNonlinearity.from_dict(raw["nonlinearity"])
        b = raw.get("b", 1.0)
        if isinstance(b, dict):
            b = Sweep(b["min"], b["max"], int(b.get("count", 25)), bool(b.get("log", False)))
        else:
            b = float(b)
        return RunConfig(
            nonlinearity=nl,
            N=int(raw["N"]),
            a=float(raw.get("a", 1.0)),
            b=b,
            k_max=int(raw.get("k_max", 1)),
            solver=ShootingConfig(**raw.get("solver", {})),
            lambdas=tuple(float(x) for x in raw.get("lambdas", (0.5, 1.0, 2.0))),
            out=Path(raw.get("out", "katlas-out")),
            cache=raw.get("cache"),
            workers=int(raw.get("workers", 1)),
        )
    except (KeyError, TypeError, ValueError, KatlasError) as exc:
        raise UsageError(f"invalid config: {exc}") from exc


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")


def _ground(cfg: RunConfig):
    return solve_cached(cfg.nonlinearity, cfg.N, 0, cfg.solver, cfg.cache)


def _threshold_names(cfg: RunConfig, D1: float) -> dict[str, float]:
    names = {"D1": D1}
    if cfg.N == 4 or (cfg.N >= 5 and cfg.a > 0):
        names.update(rs.thresholds_b(cfg.a, cfg.N, D1).to_dict())
    return names


# --- subcommands ---------------------------------------------------------------------


def cmd_check_f(cfg: RunConfig) -> int:
    report = check_berestycki_lions(cfg.nonlinearity, cfg.N)
    _emit(report.to_dict())
    return EXIT_OK if report.ok else EXIT_DOMAIN


def _require_assumptions(cfg: RunConfig) -> bool:
    report = check_berestycki_lions(cfg.nonlinearity, cfg.N)
    if not report.ok:
        print("assumptions fail: " + "; ".join(report.messages), file=sys.stderr)
    return report.ok


def cmd_solve_q(cfg: RunConfig) -> int:
    if not _require_assumptions(cfg):
        return EXIT_DOMAIN
    status = EXIT_OK
    for k in range(cfg.k_max):
        try:
            bs = solve_cached(cfg.nonlinearity, cfg.N, k, cfg.solver, cfg.cache)
        except KatlasError as exc:
            print(f"k={k}: {type(exc).__name__}: {exc}", file=sys.stderr)
            status = EXIT_DOMAIN
            continue
        meta = {**bs.metadata(), "nonlinearity": cfg.nonlinearity.to_dict(), "solver": cfg.solver.key(),
                "profile_csv": f"state_k{k}.csv"}
        write_profile_csv(cfg.out / f"state_k{k}.csv", bs.profile)
        write_json_atomic(cfg.out / f"state_k{k}.json", meta)
        print(f"k={k} nodes={bs.nodes} zeta0={bs.zeta0:.17g} D={bs.D:.17g} S={bs.S:.17g} "
              f"pohozaev_residual={bs.pohozaev_residual:.3e}")
    return status


def cmd_thresholds(cfg: RunConfig) -> int:
    if cfg.N < 4:
        print(f"no thresholds for N={cfg.N} (need N >= 4)", file=sys.stderr)
        return EXIT_DOMAIN
    if not _require_assumptions(cfg):
        return EXIT_DOMAIN
    D1 = _ground(cfg).D
    out = {"N": cfg.N, "a": cfg.a, "D1": D1}
    if cfg.N == 4 or cfg.a > 0:
        out.update(rs.thresholds_b(cfg.a, cfg.N, D1).to_dict())
    b = cfg.b if isinstance(cfg.b, float) else None
    if cfg.N >= 5 and b is not None:
        out["b"] = b
        out.update(rs.thresholds_a(b, cfg.N, D1).to_dict())
    write_json_atomic(cfg.out / "thresholds.json", out)
    _emit(out)
    return EXIT_OK


def _states(cfg: RunConfig) -> dict:
    from .kirchhoff import _solve_states

    return _solve_states(cfg.nonlinearity, cfg.N, cfg.k_max, cfg.solver, cfg.cache, cfg.workers)


def _atlas_once(cfg: RunConfig, b: float, out: Path, states: dict):
    atlas = build_atlas(cfg.nonlinearity, cfg.params(b), cfg.k_max, cfg.solver, cfg.cache,
                        lambdas=cfg.lambdas, states=states)
    write_atlas(atlas, out, cfg.solver)
    return atlas


def _sweep_row(b: float, atlas) -> dict:
    lower = upper = float("nan")
    first = next((e for e in atlas.entries if e.branches), None)
    if first is not None:
        for s in first.branches:
            if s.label in (Branch.LOWER, Branch.UNIQUE, Branch.TANGENT):
                lower = s.phi_formula
            if s.label in (Branch.UPPER, Branch.TANGENT):
                upper = s.phi_formula
    return {"b": b, "branch_count": atlas.branch_count(), "verified_count": atlas.verified_count(),
            "phi_lower": lower, "phi_upper": upper}


def cmd_atlas(cfg: RunConfig) -> int:
    if not _require_assumptions(cfg):
        return EXIT_DOMAIN
    states = _states(cfg)
    for k, st in states.items():
        if isinstance(st, Exception):
            print(f"k={k}: {type(st).__name__}: {st}", file=sys.stderr)
    if not isinstance(cfg.b, Sweep):
        atlas = _atlas_once(cfg, cfg.b, cfg.out, states)
        for e, s in atlas.branches():
            fails = s.gate_failures(atlas.params)
            print(f"k={e.k} {s.label.value} t={s.t:.17g} phi={s.phi_formula:.17g} "
                  f"{'verified' if not fails else 'FAILED: ' + '; '.join(fails)}")
        return EXIT_OK if atlas.verified_count() >= 1 else EXIT_DOMAIN

    ground = states.get(0)
    if isinstance(ground, Exception) or ground is None:
        return EXIT_DOMAIN
    names = _threshold_names(cfg, ground.D)
    grid = cfg.b.values(names)
    # always sample the thresholds themselves when they fall in range
    extra = [names[k] for k in ("b_dstar", "b_star") if k in names and grid[0] <= names[k] <= grid[-1]]
    bs = sorted({float(x) for x in grid} | set(extra))
    rows, paths, verified = [], [], 0
    for i, b in enumerate(bs):
        rel = f"sweep/b_{i:04d}"
        atlas = _atlas_once(cfg, b, cfg.out / rel, states)
        rows.append(_sweep_row(b, atlas))
        paths.append(f"{rel}/atlas.json")
        verified += atlas.verified_count()
        print(f"b={b:.17g} branches={atlas.branch_count()}")
    write_sweep(cfg.out, rows, paths)
    return EXIT_OK if verified >= 1 else EXIT_DOMAIN


def cmd_verify(path: Path) -> int:
    doc = json.loads(Path(path).read_text())
    fails = verify_sweep(path) if doc.get("schema") == "katlas-sweep/1" else verify_atlas(path)
    for m in fails:
        print("FAIL " + m)
    print("verify: " + ("ok" if not fails else f"{len(fails)} failure(s)"))
    return EXIT_OK if not fails else EXIT_DOMAIN


# --- argument parsing ----------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="katlas", description="Kirchhoff solution atlas from scalar-field bound states")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("check-f", "check assumptions on f"), ("solve-q", "solve bound states"),
                           ("thresholds", "critical thresholds from D_1"), ("atlas", "build the solution atlas")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("config", nargs="?", help="config JSON file")
        s.add_argument("--a", type=float)
        s.add_argument("--b", type=float)
        s.add_argument("--N", type=int)
        s.add_argument("--k-max", dest="k_max", type=int)
        s.add_argument("--out")
        s.add_argument("--cache")
        s.add_argument("--workers", type=int)
    v = sub.add_parser("verify", help="re-run all gates on a stored atlas or sweep")
    v.add_argument("path")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.command == "verify":
            return cmd_verify(Path(args.path))
        cfg = load_config(args)
        return {"check-f": cmd_check_f, "solve-q": cmd_solve_q, "thresholds": cmd_thresholds,
                "atlas": cmd_atlas}[args.command](cfg)
    except UsageError as exc:
        print(f"katlas: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KatlasError as exc:
        print(f"katlas: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, ValueError) as exc:
        print(f"katlas: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
