"""On-disk cache of solved bound states.

Entries are keyed by a SHA-256 of the canonical JSON of (nonlinearity, N, k,
solver settings) and stored as ``<key>.json`` (metadata) plus ``<key>.csv``
(``r,v,dv`` profile).  Writes go through a temporary file and ``os.replace``
so concurrent writers never expose a partial entry.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path

from .groundstate import BoundState, ShootingConfig, find_bound_state
from .nonlinearity import PowerNonlinearity
from .report import read_profile_csv, write_json_atomic, write_profile_csv

log = logging.getLogger(__name__)

CACHE_VERSION = 1
DEFAULT_DIR = ".katlas-cache"


def cache_dir(override: str | os.PathLike | None = None) -> Path:
    return Path(override or os.environ.get("KATLAS_CACHE") or DEFAULT_DIR)


def cache_key(nl: PowerNonlinearity, N: int, k: int, cfg: ShootingConfig) -> str:
    blob = json.dumps(
        {"v": CACHE_VERSION, "nl": nl.to_dict(), "N": N, "k": k, "cfg": cfg.key()},
        sort_keys=True, separators=(",", ":"),
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:32]


def load(nl, N, k, cfg, directory=None) -> BoundState | None:
    d = cache_dir(directory)
    key = cache_key(nl, N, k, cfg)
    meta_path, csv_path = d / f"{key}.json", d / f"{key}.csv"
    if not (meta_path.exists() and csv_path.exists()):
        return None
    try:
        meta = json.loads(meta_path.read_text())
        profile = read_profile_csv(csv_path, N, n_core=meta["n_core"], tail_cutoff=cfg.tail_cutoff)
    except (OSError, ValueError, KeyError) as exc:
        log.warning("ignoring unreadable cache entry %s: %s", key, exc)
        return None
    return BoundState(profile, meta["nodes"], meta["zeta0"], meta["D"], meta["S"],
                      meta["pohozaev_residual"], k=meta["k"], decay_rate=meta["decay_rate"],
                      nonlinearity=nl)


def store(bs: BoundState, nl, cfg, directory=None) -> Path:
    d = cache_dir(directory)
    d.mkdir(parents=True, exist_ok=True)
    key = cache_key(nl, bs.N, bs.k, cfg)
    # profile first: an entry only counts once its metadata exists
    write_profile_csv(d / f"{key}.csv", bs.profile)
    write_json_atomic(d / f"{key}.json", bs.metadata())
    return d / f"{key}.json"


def solve_cached(nl: PowerNonlinearity, N: int, k: int, cfg: ShootingConfig | None = None,
                 directory=None, use_cache: bool = True) -> BoundState:
    """Load the k-node state from the cache or solve and store it.

    ``directory=False`` disables the cache entirely.
    """
    cfg = cfg or ShootingConfig()
    if directory is False or not use_cache:
        return find_bound_state(nl, N, k, cfg)
    hit = load(nl, N, k, cfg, directory)
    if hit is not None:
        log.debug("cache hit N=%d k=%d", N, k)
        return hit
    bs = find_bound_state(nl, N, k, cfg)
    store(bs, nl, cfg, directory)
    # return what a later cache hit would return, so both paths are bit-identical
    return load(nl, N, k, cfg, directory) or bs
