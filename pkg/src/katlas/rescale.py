"""Scalar algebra linking solutions of -Lap v = f(v) to Kirchhoff solutions.

A solution v with Dirichlet energy D lifts to u(x) = v(t x) exactly when
h(t) = t^(N-4) - a t^(N-2) equals s = b D, and the lifted energy is the
closed form g(t) = (1 - a t^2)(4 - N(1 - a t^2)) / (4 b N t^4).
Everything here is closed form or a bracketed root of a monotone piece of h.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.optimize import brentq

from .errors import DegenerateRequiresA, NotApplicable, OutOfRange, PreconditionError

TANGENT_TOL = 1e-12
CONTINUUM_TOL = 1e-10


@dataclass(frozen=True)
class KirchhoffParams:
    a: float
    b: float
    N: int

    def __post_init__(self):
        if not (isinstance(self.N, int) and self.N >= 1):
            raise PreconditionError(f"N must be an integer >= 1, got {self.N!r}")
        if not (math.isfinite(self.a) and self.a >= 0):
            raise PreconditionError(f"a must be >= 0, got {self.a}")
        if not (math.isfinite(self.b) and self.b > 0):
            raise PreconditionError(f"b must be > 0, got {self.b}")

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "N": self.N}


class Branch(str, Enum):
    UNIQUE = "Unique"
    LOWER = "Lower"
    UPPER = "Upper"
    TANGENT = "Tangent"
    CONTINUUM = "ContinuumFree"


@dataclass(frozen=True)
class BranchRoot:
    t: float | None  # None for the continuum
    label: Branch


class ExistenceClass(str, Enum):
    NO_BRANCH = "NoBranch"
    UNIQUE = "UniqueBranch"
    TWO = "TwoBranches"
    TANGENT = "TangentBranch"
    CONTINUUM = "Continuum"


@dataclass(frozen=True)
class CriticalScales:
    t_star: float | None = None
    t_dstar: float | None = None
    s_star: float | None = None
    tau: float | None = None
    s_tau: float | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class Thresholds:
    b_star: float | None = None
    b_dstar: float | None = None
    a_star: float | None = None
    a_dstar: float | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def h_eval(t: float, a: float, N: int) -> float:
    if not t > 0:
        raise PreconditionError("h is defined for t > 0")
    return t ** (N - 4) - a * t ** (N - 2)


def _t_star(a, N):
    return math.sqrt((N - 4) / ((N - 2) * a))


def _t_dstar(a, N):
    return math.sqrt((N - 4) / (N * a))


def s_star(a: float, N: int) -> float:
    """Maximum of h for N >= 5, a > 0, in the closed form 2/(N-2) [(N-4)/((N-2)a)]^((N-4)/2)."""
    return 2.0 / (N - 2) * ((N - 4) / ((N - 2) * a)) ** ((N - 4) / 2)


def critical_scales(a: float, N: int) -> CriticalScales:
    if N >= 5 and a > 0:
        return CriticalScales(t_star=_t_star(a, N), t_dstar=_t_dstar(a, N), s_star=s_star(a, N))
    if N == 1 and a > 0:
        return CriticalScales(tau=math.sqrt(3.0 / a), s_tau=-2.0 * math.sqrt(3.0) / 9.0 * a**1.5)
    raise NotApplicable(f"no critical scales for N={N}, a={a}")


def _cubic_root_n1(s: float, a: float) -> float:
    """Largest real root w of w^3 - a w = s (s > 0); it is the only one with w > sqrt(a)."""
    if a == 0:
        w = s ** (1.0 / 3.0)
    else:
        disc = s * s / 4.0 - a**3 / 27.0
        if disc >= 0:
            # Cardano; the product of the two cube roots is a/3, which avoids cancellation
            A = (s / 2.0 + math.sqrt(disc)) ** (1.0 / 3.0)
            w = A + a / (3.0 * A)
        else:
            m = 2.0 * math.sqrt(a / 3.0)
            theta = math.acos(max(-1.0, min(1.0, 3.0 * s / (a * m))))
            w = m * math.cos(theta / 3.0)
    for _ in range(3):
        fw = w**3 - a * w - s
        dfw = 3 * w * w - a
        if dfw <= 0:
            break
        step = fw / dfw
        w -= step
        if abs(step) <= 1e-16 * w:
            break
    return w


def _bracket_root(fn, lo, hi):
    return brentq(fn, lo, hi, xtol=1e-300, rtol=4 * 2.220446049250313e-16, maxiter=500)


def h_roots(s: float, a: float, N: int) -> list[BranchRoot]:
    """Positive roots t of h(t) = s that lift a solution with b D = s.

    An empty list encodes nonexistence.  Only s > 0 arises from lifting, so
    s <= 0 returns an empty list.
    """
    if not s > 0:
        return []
    if N == 1:
        return [BranchRoot(1.0 / _cubic_root_n1(s, a), Branch.UNIQUE)]
    if N == 2:
        return [BranchRoot(1.0 / math.sqrt(s + a), Branch.UNIQUE)]
    if N == 3:
        # a t^2 + s t - 1 = 0, positive root written without cancellation
        return [BranchRoot(2.0 / (s + math.sqrt(s * s + 4.0 * a)), Branch.UNIQUE)]
    if N == 4:
        if a == 0:
            return [BranchRoot(None, Branch.CONTINUUM)] if abs(s - 1.0) <= CONTINUUM_TOL else []
        if s < 1.0:
            return [BranchRoot(math.sqrt((1.0 - s) / a), Branch.UNIQUE)]
        return []
    if a == 0:
        return [BranchRoot(s ** (1.0 / (N - 4)), Branch.UNIQUE)]
    ts = _t_star(a, N)
    ss = s_star(a, N)
    if abs(s - ss) <= TANGENT_TOL * ss:
        return [BranchRoot(ts, Branch.TANGENT)]
    if s > ss:
        return []

    def fn(t):
        return h_eval(t, a, N) - s

    lo = min(1e-8 * ts, 0.5 * s ** (1.0 / (N - 4)))
    t1 = _bracket_root(fn, lo, ts)
    t2 = _bracket_root(fn, ts, 1.0 / math.sqrt(a))
    return [BranchRoot(t1, Branch.LOWER), BranchRoot(t2, Branch.UPPER)]


def g_energy(t: float, a: float, b: float, N: int, s: float | None = None) -> float:
    """Energy of the lifted solution u = v(t .) expressed through t alone.

    When t is a root of h(t) = s, passing s evaluates 1 - a t^2 as s t^(4-N),
    which avoids the cancellation of the plain form near a t^2 = 1.
    """
    if not t > 0:
        raise PreconditionError("g is defined for t > 0")
    q = 1.0 - a * t * t if s is None else s * t ** (4 - N)
    return q * (4.0 - N * q) / (4.0 * b * N * t**4)


def thresholds_b(a: float, N: int, D1: float) -> Thresholds:
    """Existence threshold b* and negative-infimum threshold b** for the ground state energy D1."""
    if N == 4:
        return Thresholds(b_star=1.0 / D1)
    if N < 5 or not a > 0:
        raise NotApplicable(f"no b-thresholds for N={N}, a={a}")
    b_dstar = 4.0 / N * ((N - 4) / (N * a)) ** ((N - 4) / 2) / D1
    return Thresholds(b_star=s_star(a, N) / D1, b_dstar=b_dstar)


def thresholds_a(b: float, N: int, D1: float) -> Thresholds:
    """Dual thresholds in a at fixed b: existence iff a <= a*, negative infimum iff a < a**."""
    if N < 5:
        raise NotApplicable(f"no a-thresholds for N={N}")
    e = 2.0 / (N - 4)
    a_star = (N - 4) / (N - 2) * (2.0 / ((N - 2) * b * D1)) ** e
    a_dstar = (N - 4) / N * (4.0 / (N * b * D1)) ** e
    return Thresholds(a_star=a_star, a_dstar=a_dstar)


def b_tilde(a: float, N: int, D: float) -> float:
    """Largest b for which the solution with energy D has a negative-energy Lower lift."""
    if N < 5 or not a > 0:
        raise NotApplicable(f"b-tilde needs N >= 5 and a > 0 (N={N}, a={a})")
    return 4.0 / N * ((N - 4) / (N * a)) ** ((N - 4) / 2) / D


# --- dimension-specific closed forms -------------------------------------------------


def psi_n3(a: float, b: float, D: float) -> float:
    """Scale of the unique N=3 lift, (sqrt(4a + b^2 D^2) - b D) / (2a)."""
    if a == 0:
        raise DegenerateRequiresA("a = 0 has no psi; use h_roots")
    bd = b * D
    root = math.sqrt(4 * a + bd * bd)
    # conjugate form: (root - bd)/(2a) = 2/(root + bd)
    return 2.0 / (root + bd)


def phi_n3(a: float, b: float, D: float) -> float:
    """Energy of the N=3 lift as a function of D."""
    if a == 0:
        raise DegenerateRequiresA("a = 0 has no phi; use beta/g_energy")
    bd = b * D
    root = math.sqrt(4 * a + bd * bd)
    diff = 4 * a / (root + bd)  # root - bd without cancellation
    return a * a * (2 * root - bd) * D / (3 * diff * diff)


def t_n4(a: float, b: float, D: float) -> float | None:
    if 1.0 - b * D <= 0:
        return None
    return math.sqrt((1.0 - b * D) / a)


def phi_n4(a: float, b: float, D: float) -> float | None:
    if 1.0 - b * D <= 0:
        return None
    return a * a * D / (4.0 * (1.0 - b * D))


def beta_degenerate(b: float, N: int, D: float) -> float:
    """Energy of the a = 0 lift for N >= 5: (4-N)/(4 b N t^4) with t^(N-4) = b D.

    Written out, this is -(N-4)/(4N) * b^(-N/(N-4)) * D^(-4/(N-4)).
    """
    if N < 5:
        raise NotApplicable("beta is defined for N >= 5")
    return -(N - 4) / (4.0 * N) * b ** (-N / (N - 4)) * D ** (-4.0 / (N - 4))


# --- level sets of g (ordering of the two lifts of one v) ----------------------------


def c_star(a: float, b: float, N: int) -> float:
    """Maximum of g on (0, a^-1/2), attained at t*: a^2 / (N (N-4) b)."""
    return a * a / (N * (N - 4) * b)


def level_roots_g(c: float, a: float, b: float, N: int) -> tuple[float, float]:
    """The two solutions tau_c < t* < tau^c of g(t) = c for 0 < c < c*."""
    if N < 5 or not a > 0:
        raise NotApplicable("level roots of g need N >= 5 and a > 0")
    cs = c_star(a, b, N)
    if not 0 < c <= cs:
        raise OutOfRange(f"c = {c} outside (0, c*] with c* = {cs}")
    disc = max(a * a - N * (N - 4) * b * c, 0.0)
    den = N * (a * a + 4 * b * c)
    lo = math.sqrt(((N - 2) * a - 2 * math.sqrt(disc)) / den)
    hi = math.sqrt(((N - 2) * a + 2 * math.sqrt(disc)) / den)
    return lo, hi


def gamma(c: float, a: float, b: float, N: int) -> float:
    """h(tau^c) - h(tau_c); zero at c = c*."""
    if c == c_star(a, b, N):
        return 0.0
    lo, hi = level_roots_g(c, a, b, N)
    return h_eval(hi, a, N) - h_eval(lo, a, N)


def gamma_prime(c: float, a: float, b: float, N: int) -> float:
    """Closed-form derivative N b [(tau^c)^N - (tau_c)^N]."""
    lo, hi = level_roots_g(c, a, b, N)
    return N * b * (hi**N - lo**N)


# --- classification -------------------------------------------------------------------


def classify_existence(a: float, b: float, N: int, D: float) -> ExistenceClass:
    roots = h_roots(b * D, a, N)
    if not roots:
        return ExistenceClass.NO_BRANCH
    labels = {r.label for r in roots}
    if Branch.CONTINUUM in labels:
        return ExistenceClass.CONTINUUM
    if Branch.TANGENT in labels:
        return ExistenceClass.TANGENT
    if len(roots) == 2:
        return ExistenceClass.TWO
    return ExistenceClass.UNIQUE


def count_liftable(a: float, b: float, N: int, D_list) -> list[tuple[int, int]]:
    """(index, number of lifts) for each D; a continuum counts as one family."""
    return [(k, len(h_roots(b * D, a, N))) for k, D in enumerate(D_list)]
