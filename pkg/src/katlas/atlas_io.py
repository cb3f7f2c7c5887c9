"""Atlas reports on disk and their independent re-verification.

An atlas directory holds ``atlas.json`` and one ``branch_k{k}_{i}_{label}.csv``
per lifted solution with columns ``r,u,du``.  ``verify_atlas`` rebuilds every
solution from those files alone and re-runs all acceptance gates.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from types import SimpleNamespace

from . import rescale as rs
from .groundstate import ShootingConfig, dirichlet_norm_sq, potential_integral
from .kirchhoff import (
    KirchhoffSolution,
    SolutionAtlas,
    kirchhoff_residual,
)
from .nonlinearity import PowerNonlinearity
from .report import read_profile_csv, write_csv_atomic, write_json_atomic
from .rescale import Branch, KirchhoffParams

SCHEMA = "katlas-atlas/1"
CONTINUUM_ENERGY_TOL = 1e-6
STORED_TOL = 1e-9  # stored vs recomputed numbers from the same files


def branch_csv_name(k: int, i: int, label: Branch) -> str:
    return f"branch_k{k}_{i}_{label.value}.csv"


def atlas_to_dict(atlas: SolutionAtlas, cfg: ShootingConfig) -> dict:
    entries = []
    for e in atlas.entries:
        item = {"k": e.k, "D": e.D, "existence": e.existence.value, "error": e.error}
        if e.source is not None:
            item.update(nodes=e.source.nodes, zeta0=e.source.zeta0, n_core=e.source.profile.n_core)
        item["branches"] = [
            {**s.to_dict(), "profile_csv": branch_csv_name(e.k, i, s.label)} for i, s in enumerate(e.branches)
        ]
        entries.append(item)
    gs = atlas.ground_state
    return {
        "schema": SCHEMA,
        "params": atlas.params.to_dict(),
        "nonlinearity": atlas.nonlinearity.to_dict(),
        "solver": cfg.key(),
        "thresholds": atlas.thresholds.to_dict() if atlas.thresholds else None,
        "scales": atlas.scales.to_dict() if atlas.scales else None,
        "certified": atlas.certified,
        "interleaving": atlas.interleaving,
        "entries": entries,
        "ground_state": {"k": gs[0], "label": gs[1]} if gs else None,
        "witness_critical_values": atlas.witness_critical_values,
        "infimum_candidate": atlas.infimum_candidate,
        "branch_count": atlas.branch_count(),
        "verified_count": atlas.verified_count(),
        "timing": atlas.timing,
    }


def write_atlas(atlas: SolutionAtlas, out: Path, cfg: ShootingConfig) -> Path:
    """Write branch CSVs first, then atlas.json, each atomically."""
    out = Path(out)
    for e in atlas.entries:
        for i, s in enumerate(e.branches):
            u = s.profile_u
            write_csv_atomic(out / branch_csv_name(e.k, i, s.label), ["r", "u", "du"], [u.r, u.v, u.dv])
    path = out / "atlas.json"
    write_json_atomic(path, atlas_to_dict(atlas, cfg))
    return path


def _close(x, y, tol) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def verify_atlas(path) -> list[str]:
    """Re-run every gate from the stored files; returns failure messages (empty on success).

    Raises OSError / ValueError when files are missing or unreadable.
    """
    path = Path(path)
    doc = json.loads(path.read_text())
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"{path}: not an atlas report")
    params = KirchhoffParams(**doc["params"])
    nl = PowerNonlinearity.from_dict(doc["nonlinearity"])
    cfg = ShootingConfig(**doc["solver"])
    a, b, N = params.a, params.b, params.N
    fails = []
    for e in doc["entries"]:
        branches = e["branches"]
        if not branches:
            continue
        D_v = e["D"]
        tag = f"k={e['k']}"
        continuum = all(br["label"] == Branch.CONTINUUM.value for br in branches)
        if continuum:
            if not (N == 4 and a == 0 and abs(b * D_v - 1) <= rs.CONTINUUM_TOL):
                fails.append(f"{tag}: continuum members outside N=4, a=0, b D = 1")
        else:
            roots = rs.h_roots(b * D_v, a, N)
            if len(roots) != len(branches):
                fails.append(f"{tag}: {len(branches)} stored branches, {len(roots)} roots of h")
        for i, br in enumerate(branches):
            btag = f"{tag} {br['label']}#{i}"
            u = read_profile_csv(path.parent / br["profile_csv"], N, n_core=e.get("n_core"),
                                 tail_cutoff=cfg.tail_cutoff, names=("r", "u", "du"))
            t = br["t"]
            if not (isinstance(t, (int, float)) and t > 0):
                fails.append(f"{btag}: invalid t {t!r}")
                continue
            D_u = dirichlet_norm_sq(u)
            sol = KirchhoffSolution(SimpleNamespace(D=D_v), t, Branch(br["label"]), u, D_u,
                                    rs.g_energy(t, a, b, N, s=b * D_v))
            sol.int_F = potential_integral(u, nl)
            sol.phi_quadrature = 0.5 * a * D_u + 0.25 * b * D_u**2 - sol.int_F
            sol.residual_pde = kirchhoff_residual(sol, nl, params)
            sol.residual_pohozaev = (N - 2) / (2 * N) * (a * D_u + b * D_u**2) - sol.int_F
            fails += [f"{btag}: {m}" for m in sol.gate_failures(params)]
            if continuum and not abs(sol.phi_quadrature) <= CONTINUUM_ENERGY_TOL:
                fails.append(f"{btag}: continuum energy {sol.phi_quadrature!r} not zero")
            for key, val in (("phi_formula", sol.phi_formula), ("phi_quadrature", sol.phi_quadrature),
                             ("D_u", D_u)):
                stored = br.get(key)
                if stored is None or not math.isfinite(stored) or not _close(stored, val, STORED_TOL):
                    fails.append(f"{btag}: stored {key} {stored!r} disagrees with recomputed {val!r}")
    return fails


def write_sweep(out: Path, rows: list[dict], atlases: list[str]) -> None:
    """``sweep.csv`` (b, branch_count, phi_lower, phi_upper) plus a JSON index of per-b atlases."""
    out = Path(out)
    cols = [[r[c] for r in rows] for c in ("b", "branch_count", "phi_lower", "phi_upper")]
    write_csv_atomic(out / "sweep.csv", ["b", "branch_count", "phi_lower", "phi_upper"], cols)
    write_json_atomic(out / "sweep.json", {"schema": "katlas-sweep/1", "rows": rows, "atlases": atlases})


def verify_sweep(path) -> list[str]:
    path = Path(path)
    doc = json.loads(path.read_text())
    fails = []
    for rel in doc["atlases"]:
        fails += [f"{rel}: {m}" for m in verify_atlas(path.parent / rel)]
    return fails
