"""Radial bound states of -Lap v = f(v) in R^N.

For N >= 2 the profile solves v'' + (N-1)/r v' + f(v) = 0, v'(0) = 0, v -> 0,
and is found by shooting on the height v(0) with bisection between
trajectories that have k and k+1 sign changes.  For N = 1 the even solution
follows from the first integral (v')^2/2 + F(v) = 0 without any shooting.

The profile keeps the part of the shot where the two bracketing trajectories
agree (they depart from the decaying solution around |v| ~ 1e-6 v(0) in double
precision).  Beyond that point it is continued by integrating the full equation
inward from a far radius, started on the decaying linear solution
r^(1-N/2) K_(N/2-1)(sqrt(omega) r) with its amplitude matched to the cut value,
down to ``tail_cutoff``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import DOP853, solve_ivp
from scipy.optimize import brentq
from scipy.special import kve

from ._numerics import radial_integral
from .errors import (
    BracketNotFound,
    Inconclusive,
    IntegratorFailure,
    NoConvergence,
    PreconditionError,
    TailTooShort,
)
from .nonlinearity import PowerNonlinearity, eval_F, eval_f, zeta_of


@dataclass(frozen=True)
class ShootingConfig:
    bisection_rel_tol: float = 1e-15
    tail_cutoff: float = 1e-10
    r_max_factor: float = 50.0  # initial r_max = r_max_factor / sqrt(omega)
    max_doublings: int = 12
    integrator_rel_tol: float = 1e-10
    max_bisection_iters: int = 200
    scan_factor: float = 1.25
    scan_limit: float = 1e6  # bracket scan stops at zeta * scan_limit
    decay_floor: float = 1e-5  # |v| below this fraction of v(0) before departure counts as Decays
    cut_tol: float = 1e-3  # max relative gap between bracketing shots kept in the profile
    points_per_length: int = 200

    def __post_init__(self):
        for name in ("bisection_rel_tol", "tail_cutoff", "r_max_factor", "integrator_rel_tol",
                     "decay_floor", "cut_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.scan_factor <= 1 or self.points_per_length < 10:
            raise ValueError("scan_factor must exceed 1 and points_per_length be >= 10")

    def key(self) -> dict:
        """Fields that influence a solved state; used for cache keys."""
        return {
            "bisection_rel_tol": self.bisection_rel_tol,
            "tail_cutoff": self.tail_cutoff,
            "r_max_factor": self.r_max_factor,
            "max_doublings": self.max_doublings,
            "integrator_rel_tol": self.integrator_rel_tol,
            "max_bisection_iters": self.max_bisection_iters,
            "scan_factor": self.scan_factor,
            "decay_floor": self.decay_floor,
            "cut_tol": self.cut_tol,
            "points_per_length": self.points_per_length,
        }


@dataclass
class RadialProfile:
    """Samples of a radial function on a uniform grid starting at r = 0.

    ``n_core`` marks where the integrated part ends and the analytic tail
    begins (equal to ``len(r)`` when there is no tail segment).
    """

    N: int
    r: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    n_core: int | None = None
    tail_cutoff: float = 1e-10

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.dv = np.asarray(self.dv, dtype=float)
        if self.n_core is None:
            self.n_core = len(self.r)
        if not (len(self.r) == len(self.v) == len(self.dv)) or len(self.r) < 8:
            raise PreconditionError("profile arrays must share a length of at least 8")
        if self.r[0] != 0.0 or self.dv[0] != 0.0:
            raise PreconditionError("radial profiles start at r=0 with zero slope")
        if not np.all(np.diff(self.r) > 0):
            raise PreconditionError("radii must be strictly increasing")
        if not np.all(np.isfinite(self.v)) or not np.all(np.isfinite(self.dv)):
            raise PreconditionError("profile contains non-finite values")
        if self.v[0] == 0.0:
            raise PreconditionError("trivial profile: v(0) = 0")
        if abs(self.v[-1]) > self.tail_cutoff * abs(self.v[0]):
            raise PreconditionError(
                f"profile has not decayed: |v(end)|/|v(0)| = {abs(self.v[-1] / self.v[0]):.3e}"
            )

    @property
    def h(self) -> float:
        return float(self.r[1] - self.r[0])

    def node_count(self) -> int:
        v = self.v[np.abs(self.v) > self.tail_cutoff * abs(self.v[0])]
        return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


@dataclass
class BoundState:
    profile: RadialProfile
    nodes: int
    zeta0: float
    D: float
    S: float
    pohozaev_residual: float
    k: int = 0
    decay_rate: float = float("nan")
    nonlinearity: PowerNonlinearity | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.profile.N

    def metadata(self) -> dict:
        return {
            "N": self.N,
            "k": self.k,
            "nodes": self.nodes,
            "zeta0": self.zeta0,
            "D": self.D,
            "S": self.S,
            "pohozaev_residual": self.pohozaev_residual,
            "decay_rate": self.decay_rate,
            "n_core": self.profile.n_core,
        }


class Outcome(Enum):
    CROSSES_ZERO = "CrossesZero"
    TURNS_BACK = "TurnsBack"
    DECAYS = "Decays"


@dataclass
class Trajectory:
    outcome: Outcome
    zeta0: float
    crossings: int  # sign changes before the terminating event
    r_end: float
    overshoot: bool  # True if it crossed zero more often than allowed
    min_abs_v: float
    crossing_radii: list[float] = field(default_factory=list)
    solution: object = field(default=None, repr=False)  # callable dense output, when requested


# --- radial ODE --------------------------------------------------------------


def _rhs(nl: PowerNonlinearity, N: int):
    omega = nl.omega
    terms = nl.terms
    nm1 = N - 1

    def rhs(r, y):
        v, dv = y
        av = abs(v)
        f = -omega * v
        for c, p in terms:
            f += c * av ** (p - 2) * v
        return np.array([dv, -f - nm1 * dv / r])

    return rhs


def _taylor_start(nl, N, zeta0, r0):
    # v = z + c2 r^2 + c4 r^4 with c2 = -f/(2N), c4 = f f'/(8N(N+2))
    f0 = eval_f(nl, zeta0)
    df0 = nl.df(zeta0)
    c2 = -f0 / (2 * N)
    c4 = f0 * df0 / (8 * N * (N + 2))
    return np.array([zeta0 + c2 * r0**2 + c4 * r0**4, 2 * c2 * r0 + 4 * c4 * r0**3])


def _core_length(nl, zeta0) -> float:
    """Length scale of the core: set by omega and by f'(v(0))."""
    stiff = max(nl.omega, abs(nl.df(zeta0)), abs(eval_f(nl, zeta0) / zeta0))
    return 1.0 / math.sqrt(stiff)


class _Dense:
    """Piecewise dense output collected while stepping, extended to r=0 by the Taylor start."""

    def __init__(self, nl, N, zeta0, r0):
        self.nl, self.N, self.zeta0, self.r0 = nl, N, zeta0, r0
        self.ts = []
        self.interps = []

    def add(self, t_old, t_new, interp):
        self.ts.append(t_new)
        self.interps.append(interp)

    def __call__(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty((2, len(r)))
        small = r <= self.r0
        if np.any(small):
            for i in np.nonzero(small)[0]:
                out[:, i] = _taylor_start(self.nl, self.N, self.zeta0, r[i])
        idx = np.searchsorted(self.ts, r[~small], side="left")
        idx = np.minimum(idx, len(self.interps) - 1)
        big = np.nonzero(~small)[0]
        for j in np.unique(idx):
            sel = big[idx == j]
            out[:, sel] = self.interps[j](r[sel])
        return out

    @property
    def r_end(self):
        return self.ts[-1]


def shoot(nl: PowerNonlinearity, N: int, zeta0: float, cfg: ShootingConfig | None = None,
          max_crossings: int = 0, dense: bool = False) -> Trajectory:
    """Integrate the radial ODE from v(0) = zeta0 and classify the trajectory.

    Integration stops at the first turning point where |v| has a local minimum
    (v f(v) < 0 at v' = 0, i.e. the shot falls back) or at sign change number
    ``max_crossings + 1``.  A shot that followed the decaying tail below
    ``decay_floor * zeta0`` before departing is reported as DECAYS.
    """
    cfg = cfg or ShootingConfig()
    if N < 2:
        raise PreconditionError("shoot requires N >= 2; use closed_form_1d for N = 1")
    if not (math.isfinite(zeta0) and zeta0 > 0):
        raise PreconditionError(f"shooting height must be positive and finite, got {zeta0}")

    rhs = _rhs(nl, N)
    r0 = 1e-4 * min(1.0 / math.sqrt(nl.omega), _core_length(nl, zeta0))
    y0 = _taylor_start(nl, N, zeta0, r0)
    dense_out = _Dense(nl, N, zeta0, r0) if dense else None

    if eval_f(nl, zeta0) <= 0:
        # v''(0) >= 0: |v| never decreases from the start
        return Trajectory(Outcome.TURNS_BACK, zeta0, 0, 0.0, False, zeta0, [], None)

    r_max = cfg.r_max_factor / math.sqrt(nl.omega)
    atol = cfg.integrator_rel_tol * zeta0 * 1e-8
    crossings = []
    min_abs = zeta0
    r, y = r0, y0
    doublings = 0
    solver = DOP853(rhs, r, y, r_max, rtol=cfg.integrator_rel_tol, atol=atol)
    while True:
        if solver.status == "finished":
            if doublings >= cfg.max_doublings:
                raise Inconclusive(f"no classification up to r = {r_max:g} (zeta0={zeta0!r})")
            doublings += 1
            r_max *= 2
            solver = DOP853(rhs, solver.t, solver.y, r_max, rtol=cfg.integrator_rel_tol,
                            atol=atol, first_step=solver.step_size)
        msg = solver.step()
        if solver.status == "failed":
            raise IntegratorFailure(f"integrator failed at r = {solver.t:g}: {msg}")
        r_old, r_new = solver.t_old, solver.t
        y_old, y_new = y, solver.y.copy()
        interp = solver.dense_output()
        if dense_out is not None:
            dense_out.add(r_old, r_new, interp)

        events = []
        if np.signbit(y_old[0]) != np.signbit(y_new[0]) and y_new[0] != 0.0:
            rc = brentq(lambda s: interp(s)[0], r_old, r_new, xtol=1e-14 * r_new)
            events.append((rc, "cross"))
        if np.signbit(y_old[1]) != np.signbit(y_new[1]) and y_new[1] != 0.0:
            re = brentq(lambda s: interp(s)[1], r_old, r_new, xtol=1e-14 * r_new)
            events.append((re, "extremum"))
        for re, kind in sorted(events):
            if kind == "cross":
                crossings.append(re)
                if len(crossings) > max_crossings:
                    out = Outcome.CROSSES_ZERO
                    if min_abs < cfg.decay_floor * zeta0:
                        out = Outcome.DECAYS
                    return Trajectory(out, zeta0, len(crossings), re, True, min_abs,
                                      crossings, dense_out)
            else:
                ve = float(interp(re)[0])
                if ve * eval_f(nl, ve) < 0:
                    # |v| has a local minimum without reaching zero: the shot falls back
                    out = Outcome.TURNS_BACK
                    min_abs = min(min_abs, abs(ve))
                    if min_abs < cfg.decay_floor * zeta0:
                        out = Outcome.DECAYS
                    return Trajectory(out, zeta0, len(crossings), re, False, min_abs,
                                      crossings, dense_out)
        if len(crossings) == max_crossings:
            min_abs = min(min_abs, abs(y_new[0]))
        y = y_new


def _count(nl, N, zeta0, k, cfg) -> Trajectory:
    return shoot(nl, N, zeta0, cfg, max_crossings=k)


def _bracket(nl, N, k, cfg):
    zeta = zeta_of(nl)
    z = zeta
    lo = None
    limit = zeta * cfg.scan_limit
    while z <= limit:
        tr = _count(nl, N, z, k, cfg)
        if tr.overshoot:
            if lo is None:
                raise BracketNotFound(f"shot from zeta={z:g} already overshoots")
            return lo, z
        lo = z
        z *= cfg.scan_factor
    raise BracketNotFound(f"no height up to {limit:g} produces {k + 1} sign changes")


def find_height(nl: PowerNonlinearity, N: int, k: int, cfg: ShootingConfig | None = None):
    """Bisect the shooting height; returns the final bracket (lo, hi)."""
    cfg = cfg or ShootingConfig()
    lo, hi = _bracket(nl, N, k, cfg)
    for _ in range(cfg.max_bisection_iters):
        if hi - lo <= cfg.bisection_rel_tol * hi:
            return lo, hi
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return lo, hi
        if _count(nl, N, mid, k, cfg).overshoot:
            hi = mid
        else:
            lo = mid
    raise NoConvergence(f"bisection did not reach rel tol {cfg.bisection_rel_tol:g}")


def _bessel_tail(N, kappa, rc, r):
    """G(r)/G(rc) and G'(r)/G(rc) for G(r) = r^-nu K_nu(kappa r), nu = N/2 - 1."""
    nu = N / 2 - 1
    base = kve(nu, kappa * rc)
    scale = (r / rc) ** (-nu) * np.exp(-kappa * (r - rc))
    g = scale * kve(nu, kappa * r) / base
    dg = -kappa * scale * kve(nu + 1, kappa * r) / base
    return g, dg


def _assemble(nl, N, k, lo, hi, cfg) -> RadialProfile:
    tr_lo = shoot(nl, N, lo, cfg, max_crossings=k, dense=True)
    tr_hi = shoot(nl, N, hi, cfg, max_crossings=k, dense=True)
    zeta0 = 0.5 * (lo + hi)
    h = min(1.0 / math.sqrt(nl.omega), _core_length(nl, hi)) / cfg.points_per_length
    r_end = min(tr_lo.r_end, tr_hi.r_end)
    n = int(r_end / h)
    r = h * np.arange(n + 1)
    y_lo = tr_lo.solution(r)
    y_hi = tr_hi.solution(r)
    v = 0.5 * (y_lo[0] + y_hi[0])
    dv = 0.5 * (y_lo[1] + y_hi[1])
    dv[0] = 0.0

    # keep the part where the two bracketing shots still agree
    start = np.searchsorted(r, tr_lo.crossing_radii[-1]) + 1 if k > 0 else 1
    gap = np.abs(y_hi[0] - y_lo[0])
    bad = np.nonzero(gap[start:] > cfg.cut_tol * np.abs(v[start:]))[0]
    if len(bad) == 0:
        raise TailTooShort("bracketing shots never separate; integration range too short")
    i_cut = start + bad[0] - 1
    if i_cut < start + 10:
        raise TailTooShort("decaying tail too short before the shots separate")
    # stay on the monotone decay: drop anything past the last point where |v| still decreases
    while i_cut > start and abs(v[i_cut]) >= abs(v[i_cut - 1]):
        i_cut -= 1

    kappa = math.sqrt(nl.omega)
    target = cfg.tail_cutoff * abs(v[0])
    n_ext = 0
    if abs(v[i_cut]) > target:
        n_ext = int(math.ceil(math.log(abs(v[i_cut]) / target) / (kappa * h) * 1.1)) + 10
    r_ext = r[i_cut] + h * np.arange(1, n_ext + 1)
    v_ext, dv_ext = _inward_tail(nl, N, r[i_cut], v[i_cut], r_ext, cfg)
    while n_ext and abs(v_ext[-1]) > target:
        n_ext = int(n_ext * 1.2) + 1
        r_ext = r[i_cut] + h * np.arange(1, n_ext + 1)
        v_ext, dv_ext = _inward_tail(nl, N, r[i_cut], v[i_cut], r_ext, cfg)
    r_all = h * np.arange(i_cut + 1 + n_ext)
    v_all = np.concatenate([v[: i_cut + 1], v_ext])
    dv_all = np.concatenate([dv[: i_cut + 1], dv_ext])
    return RadialProfile(N, r_all, v_all, dv_all, n_core=i_cut + 1,
                         tail_cutoff=cfg.tail_cutoff), zeta0


def _inward_tail(nl, N, rc, vc, r_ext, cfg):
    """Decaying solution on r_ext (r > rc) with v(rc) = vc.

    Integrating inwards from the far end is stable for the decaying mode.  The
    far-end data come from the linearised (Bessel K) tail and its amplitude is
    adjusted by secant iteration until the inward solution hits vc at rc.
    """
    if len(r_ext) == 0:
        return np.empty(0), np.empty(0)
    kappa = math.sqrt(nl.omega)
    R = r_ext[-1]
    g, dg = _bessel_tail(N, kappa, rc, np.array([R]))
    rhs = _rhs(nl, N)
    atol = abs(vc) * 1e-14 * float(g[0])

    def inward(amp):
        y0 = [amp * vc * g[0], amp * vc * dg[0]]
        sol = solve_ivp(rhs, (R, rc), y0, method="DOP853", rtol=cfg.integrator_rel_tol,
                        atol=atol, dense_output=True)
        if not sol.success:
            raise IntegratorFailure(f"inward tail integration failed: {sol.message}")
        return sol

    a0, a1 = 1.0, 1.05
    s0, s1 = inward(a0), inward(a1)
    e0, e1 = s0.y[0, -1] - vc, s1.y[0, -1] - vc
    for _ in range(30):
        if abs(e1) <= 1e-13 * abs(vc) or e1 == e0:
            break
        a0, a1, e0 = a1, a1 - e1 * (a1 - a0) / (e1 - e0), e1
        s1 = inward(a1)
        e1 = s1.y[0, -1] - vc
    else:
        raise NoConvergence("tail amplitude matching did not converge")
    y = s1.sol(r_ext)
    return y[0], y[1]


def find_bound_state(nl: PowerNonlinearity, N: int, k: int = 0,
                     cfg: ShootingConfig | None = None) -> BoundState:
    """Radial solution with exactly k sign changes (k = 0 is the positive ground state)."""
    cfg = cfg or ShootingConfig()
    if k < 0:
        raise PreconditionError("node count must be nonnegative")
    if N == 1:
        if k != 0:
            raise PreconditionError("in one dimension the only bound state is the even positive one")
        return closed_form_1d(nl, cfg)
    lo, hi = find_height(nl, N, k, cfg)
    profile, zeta0 = _assemble(nl, N, k, lo, hi, cfg)
    return _finish(profile, nl, zeta0, k)


def _finish(profile: RadialProfile, nl, zeta0, k) -> BoundState:
    D = dirichlet_norm_sq(profile)
    S = action(profile, nl, D=D)
    bs = BoundState(profile, profile.node_count(), zeta0, D, S, S - D / profile.N, k=k,
                    nonlinearity=nl)
    try:
        bs.decay_rate = tail_decay_rate(profile, nl)
    except TailTooShort:
        pass
    return bs


# --- one dimension ---------------------------------------------------------------


def closed_form_1d(nl: PowerNonlinearity, cfg: ShootingConfig | None = None) -> BoundState:
    """Even positive solution on the line from the first integral (v')^2/2 + F(v) = 0.

    Near x = 0 a Taylor series is used; afterwards log v obeys the first-order
    equation (log v)' = -sqrt(-2 F(v)) / v, which is stable all the way down
    the exponential tail, so no shooting is involved.
    """
    cfg = cfg or ShootingConfig()
    zeta = zeta_of(nl)
    f0 = eval_f(nl, zeta)
    df0 = nl.df(zeta)
    h = min(1.0 / math.sqrt(nl.omega), _core_length(nl, zeta)) / cfg.points_per_length
    x0 = 2 * h

    def series(x):
        c2 = -f0 / 2
        c4 = f0 * df0 / 24
        return zeta + c2 * x**2 + c4 * x**4, 2 * c2 * x + 4 * c4 * x**3

    def log_slope(x, y):
        v = math.exp(y[0])
        s = -2.0 * eval_F(nl, v) / (v * v)
        return [-math.sqrt(max(s, 0.0))]

    v_start, _ = series(x0)
    x_end = x0 + (math.log(zeta / (cfg.tail_cutoff * zeta)) + 5) / math.sqrt(nl.omega)
    sol = solve_ivp(log_slope, (x0, x_end), [math.log(v_start)], method="DOP853",
                    rtol=1e-13, atol=1e-14, dense_output=True)
    if not sol.success:
        raise IntegratorFailure(sol.message)
    n = int(x_end / h)
    x = h * np.arange(n + 1)
    v = np.empty_like(x)
    dv = np.empty_like(x)
    near = x <= x0
    v[near], dv[near] = series(x[near])
    v[~near] = np.exp(sol.sol(x[~near])[0])
    dv[~near] = -np.sqrt(np.maximum(-2.0 * eval_F(nl, v[~near]), 0.0))
    dv[0] = 0.0
    keep = np.nonzero(v <= cfg.tail_cutoff * zeta)[0]
    if len(keep):
        x, v, dv = x[: keep[0] + 1], v[: keep[0] + 1], dv[: keep[0] + 1]
    profile = RadialProfile(1, x, v, dv, tail_cutoff=cfg.tail_cutoff)
    return _finish(profile, nl, zeta, 0)


def time_map(nl: PowerNonlinearity, v: float) -> float:
    """x(v) = int_v^zeta dw / sqrt(-2F(w)): where the 1D bound state takes the value v."""
    from scipy.integrate import quad

    zeta = zeta_of(nl)
    if not 0 < v <= zeta:
        raise PreconditionError("time map is defined for 0 < v <= zeta")
    mid = 0.5 * zeta

    f0, df0 = float(eval_f(nl, zeta)), float(nl.df(zeta))

    # w = zeta - s^2 removes the inverse-square-root singularity at w = zeta;
    # near s = 0 the series -2F(zeta - e) = 2 f e - f' e^2 avoids cancellation
    def upper(s):
        e = s * s
        if s < 1e-4:
            return 2.0 / math.sqrt(2.0 * f0 - df0 * e)
        return 2.0 * s / math.sqrt(-2.0 * eval_F(nl, zeta - e))

    # w = e^y keeps the integrand bounded (-> 1/sqrt(omega)) as w -> 0
    def lower(y):
        w = math.exp(y)
        return w / math.sqrt(-2.0 * eval_F(nl, w))

    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=400)
    if v >= mid:
        return quad(upper, 0.0, math.sqrt(zeta - v), **opts)[0]
    return quad(upper, 0.0, math.sqrt(zeta - mid), **opts)[0] + quad(lower, math.log(v), math.log(mid), **opts)[0]


# --- functionals -----------------------------------------------------------------


def _tail_rate_or_default(p: RadialProfile, nl=None) -> float:
    if nl is not None:
        try:
            return tail_decay_rate(p, nl)
        except TailTooShort:
            return math.sqrt(nl.omega)
    # decay rate from the last two samples
    v1, v2 = abs(p.v[-2]), abs(p.v[-1])
    if v1 > 0 and v2 > 0 and v2 < v1:
        return math.log(v1 / v2) / p.h
    return 1.0


def dirichlet_norm_sq(p: RadialProfile, nl: PowerNonlinearity | None = None) -> float:
    """D = sigma_N int (v')^2 r^(N-1) dr plus the exponential tail beyond the grid."""
    body = radial_integral(p.r, p.dv**2, p.N)
    kappa = _tail_rate_or_default(p, nl)
    from ._numerics import sphere_area

    tail = sphere_area(p.N) * p.dv[-1] ** 2 * p.r[-1] ** (p.N - 1) / (2 * kappa)
    return body + tail


def potential_integral(p: RadialProfile, nl: PowerNonlinearity) -> float:
    """sigma_N int F(v) r^(N-1) dr plus the exponential tail (F ~ -omega v^2/2 there)."""
    body = radial_integral(p.r, eval_F(nl, p.v), p.N)
    kappa = _tail_rate_or_default(p, None)
    from ._numerics import sphere_area

    tail = sphere_area(p.N) * float(eval_F(nl, p.v[-1])) * p.r[-1] ** (p.N - 1) / (2 * kappa)
    return body + tail


def action(p: RadialProfile, nl: PowerNonlinearity, D: float | None = None) -> float:
    """S = D/2 - int F(v)."""
    if D is None:
        D = dirichlet_norm_sq(p)
    return 0.5 * D - potential_integral(p, nl)


def pohozaev_residual_q(bs: BoundState, nl: PowerNonlinearity | None = None) -> float:
    """S - D/N, which vanishes for exact solutions."""
    nl = nl or bs.nonlinearity
    S = action(bs.profile, nl, D=bs.D)
    return S - bs.D / bs.N


def tail_decay_rate(p: RadialProfile, nl: PowerNonlinearity) -> float:
    """Fitted kappa in |v| ~ C r^-(N-1)/2 exp(-kappa r) over the last decade of the integrated part.

    Only the integrated samples are used, so the analytic continuation of the
    tail does not feed back into the measurement.
    """
    n = p.n_core
    r, v = p.r[:n], np.abs(p.v[:n])
    vmax = v.max()
    end = n
    # the last monotone stretch after the final node or maximum
    i0 = int(np.argmax(v))
    sign = np.signbit(p.v[:n])
    flips = np.nonzero(sign[1:] != sign[:-1])[0]
    if len(flips):
        i0 = max(i0, int(flips[-1]) + 1)
    v_last = v[end - 1]
    if v_last <= 0 or v_last > 1e-2 * vmax:
        raise TailTooShort("integrated tail does not decay two decades")
    sel = np.nonzero((v[i0:end] <= 10 * v_last) & (v[i0:end] > 0))[0] + i0
    if len(sel) < 5:
        raise TailTooShort("fewer than five samples in the final decade")
    rr = r[sel]
    y = -np.log(v[sel]) - 0.5 * (p.N - 1) * np.log(rr)
    slope = np.polyfit(rr, y, 1)[0]
    return float(slope)
