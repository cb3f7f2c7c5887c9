"""File formats: JSON with 17 significant digits and CSV profiles, written atomically."""
from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .groundstate import RadialProfile


def _num(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return repr(float(x))
    return "%.17g" % x


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or obj is True or obj is False:
        return {None: "null", True: "true", False: "false"}[obj]
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(x, (int, float, np.floating, np.integer)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(dumps(x) for x in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _atomic_write(path: Path, write) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            write(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_atomic(path, obj) -> None:
    _atomic_write(path, lambda fh: fh.write(dumps(obj) + "\n"))


def write_csv_atomic(path, header: list[str], columns) -> None:
    data = np.column_stack(columns)

    def write(fh):
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, data, fmt="%.17g", delimiter=",")

    _atomic_write(path, write)


def write_profile_csv(path, p: RadialProfile, names=("r", "v", "dv")) -> None:
    write_csv_atomic(path, list(names), [p.r, p.v, p.dv])


def read_csv_columns(path) -> dict[str, np.ndarray]:
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(header):
        raise ValueError(f"{path}: header has {len(header)} columns, data {data.shape[1]}")
    return {name: data[:, i] for i, name in enumerate(header)}


def read_profile_csv(path, N: int, n_core=None, tail_cutoff: float = 1e-10,
                     names=("r", "v", "dv")) -> RadialProfile:
    cols = read_csv_columns(path)
    r, v, dv = (cols[n] for n in names)
    return RadialProfile(N, r, v, dv, n_core=n_core, tail_cutoff=tail_cutoff)
