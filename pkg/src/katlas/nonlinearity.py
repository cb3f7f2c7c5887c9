"""Prototype nonlinearities f(t) = -omega*t + sum_i c_i |t|^(p_i-2) t.

The family is odd, has a negative linear part at the origin and polynomial
growth, so every member satisfies the Berestycki-Lions conditions (f1)-(f4)
as long as the exponents stay below the critical Sobolev exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidNonlinearity, NoPositiveZero


@dataclass(frozen=True)
class PowerNonlinearity:
    omega: float
    terms: tuple[tuple[float, float], ...]  # (coeff, exponent)

    def __post_init__(self):
        terms = tuple((float(c), float(p)) for c, p in self.terms)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "terms", terms)
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise InvalidNonlinearity(f"omega must be positive, got {self.omega}")
        if not terms:
            raise InvalidNonlinearity("at least one power term is required")
        for c, p in terms:
            if not (math.isfinite(c) and c > 0):
                raise InvalidNonlinearity(f"coefficients must be positive, got {c}")
            if not (math.isfinite(p) and p > 2):
                raise InvalidNonlinearity(f"exponents must exceed 2, got {p}")

    @classmethod
    def single(cls, omega: float = 1.0, p: float = 4.0, coeff: float = 1.0) -> "PowerNonlinearity":
        return cls(omega, ((coeff, p),))

    @classmethod
    def from_dict(cls, d: dict) -> "PowerNonlinearity":
        """Build from the config form ``{"omega": w, "terms": [{"coeff": c, "p": p}]}``."""
        if "growth" in d and d["growth"] != "polynomial":
            raise InvalidNonlinearity("only polynomial-growth nonlinearities are supported")
        try:
            terms = tuple((float(t.get("coeff", 1.0)), float(t["p"])) for t in d["terms"])
            return cls(float(d["omega"]), terms)
        except (KeyError, TypeError) as exc:
            raise InvalidNonlinearity(f"malformed nonlinearity description: {d!r}") from exc

    def to_dict(self) -> dict:
        return {"omega": self.omega, "terms": [{"coeff": c, "p": p} for c, p in self.terms]}

    @property
    def max_exponent(self) -> float:
        return max(p for _, p in self.terms)

    def f(self, t):
        return eval_f(self, t)

    def F(self, t):
        return eval_F(self, t)

    def df(self, t):
        """Derivative f'(t); used for Taylor starts near the origin of the radial ODE."""
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, -self.omega)
        a = np.abs(t)
        for c, p in self.terms:
            out = out + c * (p - 1) * a ** (p - 2)
        return out if out.ndim else float(out)


def eval_f(nl: PowerNonlinearity, t):
    """f(t) = -omega t + sum c |t|^(p-2) t, vectorised over numpy input."""
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    out = -nl.omega * t
    for c, p in nl.terms:
        out = out + c * a ** (p - 2) * t
    return out if out.ndim else float(out)


def eval_F(nl: PowerNonlinearity, t):
    """Primitive F(t) = int_0^t f, i.e. -omega t^2/2 + sum c |t|^p / p."""
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    out = -0.5 * nl.omega * t * t
    for c, p in nl.terms:
        out = out + c * a**p / p
    return out if out.ndim else float(out)


def zeta_of(nl: PowerNonlinearity) -> float:
    """Smallest positive zero of F.

    Closed form (p*omega/(2c))^(1/(p-2)) for one term; otherwise a geometric
    scan up to 1e3 times the smallest single-term zero followed by bisection.
    """
    single = [(p * nl.omega / (2 * c)) ** (1.0 / (p - 2)) for c, p in nl.terms]
    if len(nl.terms) == 1:
        z = single[0]
    else:
        lo = min(single) * 1e-3
        hi_limit = min(single) * 1e3
        if eval_F(nl, lo) >= 0:
            raise NoPositiveZero("F is not negative near the origin")
        z = None
        x = lo
        while x < hi_limit:
            nxt = x * 1.05
            if eval_F(nl, nxt) >= 0:
                z = brentq(lambda s: eval_F(nl, s), x, nxt, xtol=1e-300, rtol=1e-15, maxiter=500)
                break
            x = nxt
        if z is None:
            raise NoPositiveZero(f"F < 0 on (0, {hi_limit:g}]")
    if not eval_f(nl, z) > 0:
        raise NoPositiveZero(f"f(zeta) = {eval_f(nl, z)} is not positive")
    return float(z)


def critical_exponent(N: int) -> float:
    """2N/(N-2) for N >= 3, infinity otherwise."""
    return math.inf if N <= 2 else 2.0 * N / (N - 2)


@dataclass
class AssumptionReport:
    f1_ok: bool
    f2_ok: bool
    f3_ok: bool
    f4_ok: bool
    zeta: float | None
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.f1_ok and self.f2_ok and self.f3_ok and self.f4_ok

    def to_dict(self) -> dict:
        return {
            "f1_ok": self.f1_ok,
            "f2_ok": self.f2_ok,
            "f3_ok": self.f3_ok,
            "f4_ok": self.f4_ok,
            "zeta": self.zeta,
            "messages": list(self.messages),
        }


def check_berestycki_lions(nl: PowerNonlinearity, N: int) -> AssumptionReport:
    if N < 1:
        raise ValueError(f"dimension must be >= 1, got {N}")
    msgs = []

    # (f1): odd and continuous; oddness holds by construction, check a sample anyway
    ts = np.linspace(0.0, 3.0, 31)
    f1 = bool(np.all(eval_f(nl, -ts) == -eval_f(nl, ts)))
    if not f1:
        msgs.append("f1: f is not odd on the sample")

    # (f2): f(t)/t = -omega + sum c |t|^(p-2) -> -omega exactly when every p > 2;
    # a sampled quotient would converge too slowly for p near 2
    f2 = nl.omega > 0 and all(p > 2 for _, p in nl.terms)
    if not f2:
        msgs.append(f"f2: f(t)/t does not tend to -omega = {-nl.omega}")

    crit = critical_exponent(N)
    bad = [p for _, p in nl.terms if p >= crit]
    f3 = not bad
    if bad:
        msgs.append(f"f3: exponents {bad} are not below 2N/(N-2) = {crit:g} for N={N}")

    zeta = None
    try:
        zeta = zeta_of(nl)
        sample = zeta * np.linspace(0.01, 0.99, 99)
        f4 = bool(np.all(eval_F(nl, sample) < 0)) and eval_f(nl, zeta) > 0
        if not f4:
            msgs.append("f4: sign structure of F on (0, zeta) violated")
    except NoPositiveZero as exc:
        f4 = False
        msgs.append(f"f4: {exc}")
    return AssumptionReport(f1, bool(f2), f3, f4, zeta, msgs)
