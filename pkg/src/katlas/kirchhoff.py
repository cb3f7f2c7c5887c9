"""Kirchhoff solutions u(x) = v(t x) and the per-parameter solution atlas."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from . import rescale as rs
from .errors import (
    ContinuumCase,
    EmptyAtlas,
    KatlasError,
    NotApplicable,
    NotOnContinuum,
    OutOfRegime,
    PreconditionError,
)
from .groundstate import BoundState, RadialProfile, ShootingConfig, dirichlet_norm_sq, potential_integral
from .nonlinearity import PowerNonlinearity, check_berestycki_lions, eval_f
from .rescale import Branch, KirchhoffParams

# acceptance gates on every lifted solution
PDE_TOL = 1e-6
POHOZAEV_TOL = 1e-5
ENERGY_TOL = 1e-4
SCALE_TOL = 1e-8
NORM_TOL = 1e-10


@dataclass
class KirchhoffSolution:
    source: BoundState
    t: float
    label: Branch
    profile_u: RadialProfile
    D_u: float
    phi_formula: float
    phi_quadrature: float = float("nan")
    residual_pde: float = float("nan")
    residual_pohozaev: float = float("nan")
    int_F: float = float("nan")

    def pohozaev_scale(self, params: KirchhoffParams) -> float:
        return max(params.a * self.D_u + params.b * self.D_u**2, abs(self.int_F))

    def gate_failures(self, params: KirchhoffParams) -> list[str]:
        """Names of the verification gates this solution fails (empty when accepted)."""
        out = []
        a, b, N, t = params.a, params.b, params.N, self.t
        if abs(a + b * self.D_u - t**-2) > SCALE_TOL * t**-2:
            out.append("scaling a + b D_u = t^-2")
        expect = t ** (2 - N) * self.source.D
        if abs(self.D_u - expect) > NORM_TOL * expect:
            out.append("norm D_u = t^(2-N) D_v")
        if not self.residual_pde <= PDE_TOL:
            out.append(f"pde residual {self.residual_pde:.3e}")
        if not abs(self.residual_pohozaev) <= POHOZAEV_TOL * self.pohozaev_scale(params):
            out.append(f"pohozaev residual {self.residual_pohozaev:.3e}")
        if not abs(self.phi_formula - self.phi_quadrature) <= ENERGY_TOL * max(1.0, abs(self.phi_formula)):
            out.append(f"energy mismatch {self.phi_formula:.17g} vs {self.phi_quadrature:.17g}")
        return out

    @property
    def norm_sq(self) -> float:
        """Dirichlet energy ||u||^2_{D^{1,2}}."""
        return self.D_u

    def to_dict(self) -> dict:
        return {
            "label": self.label.value,
            "t": self.t,
            "D_u": self.D_u,
            "phi_formula": self.phi_formula,
            "phi_quadrature": self.phi_quadrature,
            "residual_pde": self.residual_pde,
            "residual_pohozaev": self.residual_pohozaev,
        }


def rescaled_profile(p: RadialProfile, t: float) -> RadialProfile:
    """u(r) = v(t r): same samples on the grid r / t, slopes multiplied by t."""
    return RadialProfile(p.N, p.r / t, p.v.copy(), p.dv * t, n_core=p.n_core, tail_cutoff=p.tail_cutoff)


def energy_quadrature(u: RadialProfile, nl: PowerNonlinearity, params: KirchhoffParams,
                      D_u: float | None = None) -> float:
    """Phi(u) = a/2 D_u + b/4 D_u^2 - int F(u), all by quadrature on the grid."""
    if D_u is None:
        D_u = dirichlet_norm_sq(u)
    return 0.5 * params.a * D_u + 0.25 * params.b * D_u**2 - potential_integral(u, nl)


def flux_residual(u: RadialProfile, nl: PowerNonlinearity, coeff: float) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise residual of the radial equation in divergence form.

    -coeff * (r^(N-1) u')' = f(u) r^(N-1) integrated from 0 to r and divided by
    r^(N-1) gives coeff * u'(r) + r^(1-N) int_0^r f(u) s^(N-1) ds = 0.  No
    derivative of the samples is taken, so the check stays sharp at nodes where
    f is only C^1 (exponents p < 3).  Returns (residual, reference term).
    """
    fu = eval_f(nl, u.v)
    w = u.r ** (u.N - 1)
    flux = cumulative_simpson(fu * w, x=u.r, initial=0.0)
    mean = np.zeros_like(flux)
    mean[1:] = flux[1:] / w[1:]
    return coeff * u.dv + mean, mean


def pde_residual(u: RadialProfile, nl: PowerNonlinearity, params: KirchhoffParams,
                 D_u: float | None = None) -> float:
    """Relative weighted L2 norm of the Kirchhoff equation residual on the grid."""
    if D_u is None:
        D_u = dirichlet_norm_sq(u)
    res, ref = flux_residual(u, nl, params.a + params.b * D_u)
    w = u.r ** (u.N - 1)
    return math.sqrt(max(simpson(res * res * w, x=u.r), 0.0) / simpson(ref * ref * w, x=u.r))


def kirchhoff_residual(sol: KirchhoffSolution, nl: PowerNonlinearity, params: KirchhoffParams) -> float:
    return pde_residual(sol.profile_u, nl, params, D_u=sol.D_u)


def pohozaev_residual_p(sol: KirchhoffSolution, nl: PowerNonlinearity, params: KirchhoffParams) -> float:
    """(N-2)/(2N) (a D_u + b D_u^2) - int F(u), signed."""
    N = params.N
    int_F = potential_integral(sol.profile_u, nl)
    return (N - 2) / (2 * N) * (params.a * sol.D_u + params.b * sol.D_u**2) - int_F


def _build(bs: BoundState, t: float, label: Branch, nl, params: KirchhoffParams) -> KirchhoffSolution:
    u = rescaled_profile(bs.profile, t)
    D_u = dirichlet_norm_sq(u)
    sol = KirchhoffSolution(bs, t, label, u, D_u, rs.g_energy(t, params.a, params.b, params.N, s=params.b * bs.D))
    sol.int_F = potential_integral(u, nl)
    sol.phi_quadrature = 0.5 * params.a * D_u + 0.25 * params.b * D_u**2 - sol.int_F
    sol.residual_pde = kirchhoff_residual(sol, nl, params)
    N = params.N
    sol.residual_pohozaev = (N - 2) / (2 * N) * (params.a * D_u + params.b * D_u**2) - sol.int_F
    return sol


def lift(bs: BoundState, params: KirchhoffParams, nl: PowerNonlinearity | None = None) -> list[KirchhoffSolution]:
    """All Kirchhoff solutions u = v(t .) obtained from one bound state."""
    nl = nl or bs.nonlinearity
    if bs.N != params.N:
        raise PreconditionError(f"bound state lives in N={bs.N}, params ask for N={params.N}")
    roots = rs.h_roots(params.b * bs.D, params.a, params.N)
    if any(r.label is Branch.CONTINUUM for r in roots):
        raise ContinuumCase("N=4, a=0, b D = 1: use continuum_family")
    return [_build(bs, r.t, r.label, nl, params) for r in roots]


def continuum_family(bs: BoundState, lam: float, params: KirchhoffParams,
                     nl: PowerNonlinearity | None = None) -> KirchhoffSolution:
    """Member u_lambda = v(lambda .) of the zero-energy family at N=4, a=0, b D = 1."""
    nl = nl or bs.nonlinearity
    if params.N != 4 or params.a != 0 or abs(params.b * bs.D - 1.0) > rs.CONTINUUM_TOL:
        raise NotOnContinuum(f"need N=4, a=0, b D = 1 (got N={params.N}, a={params.a}, bD={params.b * bs.D!r})")
    if not lam > 0:
        raise PreconditionError("lambda must be positive")
    return _build(bs, lam, Branch.CONTINUUM, nl, params)


def l2_norm_sq(u: RadialProfile) -> float:
    from ._numerics import radial_integral

    return radial_integral(u.r, u.v**2, u.N)


# --- atlas ---------------------------------------------------------------------------


@dataclass
class AtlasEntry:
    k: int
    D: float
    existence: rs.ExistenceClass
    branches: list[KirchhoffSolution] = field(default_factory=list)
    source: BoundState | None = field(default=None, repr=False)
    error: str | None = None


@dataclass
class SolutionAtlas:
    params: KirchhoffParams
    nonlinearity: PowerNonlinearity
    entries: list[AtlasEntry]
    thresholds: rs.Thresholds | None = None
    scales: rs.CriticalScales | None = None
    ground_state: tuple[int, str] | None = None
    witness_critical_values: list[float] = field(default_factory=list)
    infimum_candidate: float | None = None
    certified: dict = field(default_factory=dict)
    interleaving: dict | None = None
    timing: dict = field(default_factory=dict)

    def branches(self):
        for e in self.entries:
            for s in e.branches:
                yield e, s

    def branch_count(self) -> int:
        return sum(len(e.branches) for e in self.entries)

    def verified_count(self) -> int:
        return sum(1 for _, s in self.branches() if not s.gate_failures(self.params))


def ground_state_select(atlas: SolutionAtlas) -> tuple[AtlasEntry, KirchhoffSolution]:
    """Minimal-energy branch among all computed ones, cross-checked against the known ordering."""
    cands = list(atlas.branches())
    if not cands:
        raise EmptyAtlas("no branch to select from")
    entry, sol = min(cands, key=lambda es: es[1].phi_formula)
    p = atlas.params
    first = min((e for e in atlas.entries if e.branches), key=lambda e: e.D)
    if p.N >= 5 and p.a > 0:
        assert entry is first and sol.label in (Branch.LOWER, Branch.TANGENT), \
            "the Lower lift of the smallest-D state should have the least energy"
    elif p.N in (2, 3) or (p.N >= 5 and p.a == 0):
        assert entry is first, "the smallest-D state should have the least energy"
    return entry, sol


def _solve_states(nl, N, k_max, cfg, cache, workers):
    from .cache import solve_cached

    ks = [0] if N == 1 else list(range(k_max))
    if workers > 1 and len(ks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = {k: ex.submit(solve_cached, nl, N, k, cfg, cache) for k in ks}
            return {k: f.result() if not f.exception() else f.exception() for k, f in futs.items()}
    out = {}
    for k in ks:
        try:
            out[k] = solve_cached(nl, N, k, cfg, cache)
        except KatlasError as exc:
            out[k] = exc
    return out


def build_atlas(nl: PowerNonlinearity, params: KirchhoffParams, k_max: int = 1,
                cfg: ShootingConfig | None = None, cache=None, lambdas=(0.5, 1.0, 2.0),
                workers: int = 1, states: dict | None = None) -> SolutionAtlas:
    """Solve v_1..v_k, lift each, and attach thresholds, classification and the ground state.

    Per-entry failures are recorded on the entry rather than raised.  Pass
    ``states`` (k -> BoundState) to reuse already solved profiles.
    """
    t0 = time.perf_counter()
    cfg = cfg or ShootingConfig()
    if k_max < 1:
        raise PreconditionError("k_max must be >= 1")
    report = check_berestycki_lions(nl, params.N)
    if not report.ok:
        raise PreconditionError("assumptions (f1)-(f4) fail: " + "; ".join(report.messages))
    N, a, b = params.N, params.a, params.b

    solved = states if states is not None else _solve_states(nl, N, k_max, cfg, cache, workers)
    entries = []
    for k, st in solved.items():
        if isinstance(st, Exception):
            entries.append(AtlasEntry(k, float("nan"), rs.ExistenceClass.NO_BRANCH, error=str(st)))
            continue
        entry = AtlasEntry(k, st.D, rs.classify_existence(a, b, N, st.D), source=st)
        try:
            if entry.existence is rs.ExistenceClass.CONTINUUM:
                entry.branches = [continuum_family(st, lam, params, nl) for lam in lambdas]
            else:
                entry.branches = lift(st, params, nl)
        except KatlasError as exc:
            entry.error = str(exc)
        entries.append(entry)
    ok = [e for e in entries if e.error is None or e.source is not None]
    entries = sorted(ok, key=lambda e: e.D) + [e for e in entries if e not in ok]

    atlas = SolutionAtlas(params, nl, entries)
    D1 = min((e.D for e in entries if e.source is not None), default=None)
    if D1 is not None:
        _attach_theory(atlas, D1)
    if atlas.branch_count():
        e, s = ground_state_select(atlas)
        atlas.ground_state = (e.k, s.label.value)
    energies = sorted({s.phi_formula for _, s in atlas.branches()})
    atlas.witness_critical_values = energies
    if N >= 5 and a > 0:
        atlas.infimum_candidate = min([0.0, *energies])
    atlas.timing = {"seconds": time.perf_counter() - t0}
    return atlas


def _attach_theory(atlas: SolutionAtlas, D1: float):
    p = atlas.params
    N, a, b = p.N, p.a, p.b
    try:
        atlas.scales = rs.critical_scales(a, N)
    except NotApplicable:
        pass
    th = {}
    if N == 4 or (N >= 5 and a > 0):
        th.update(rs.thresholds_b(a, N, D1).to_dict())
    if N >= 5:
        th.update(rs.thresholds_a(b, N, D1).to_dict())
    atlas.thresholds = rs.Thresholds(**th) if th else None

    cert = {}
    if N >= 5 and a > 0:
        bs_, bss = th["b_star"], th["b_dstar"]
        cert["exists"] = b <= bs_
        cert["negative_infimum"] = b < bss
        cert["critical_value_bound"] = a * a / (N * (N - 4) * b)
    elif N == 4 and a > 0:
        cert["exists"] = b * D1 < 1
    elif N == 4 and a == 0:
        # h is identically 1: the ground state lifts only on b D1 = 1
        cert["exists"] = abs(b * D1 - 1) <= rs.CONTINUUM_TOL
    else:
        cert["exists"] = True
    atlas.certified = cert

    if N >= 5 and a > 0:
        lifted = [e for e in atlas.entries if e.source is not None]
        D_max = max(e.D for e in lifted)
        bt = rs.b_tilde(a, N, D_max)
        pattern = {"b_tilde": bt, "applies": b < bt}
        if b < bt:
            lows = [next(s.phi_formula for s in e.branches if s.label is Branch.LOWER) for e in lifted]
            ups = [next(s.phi_formula for s in e.branches if s.label is Branch.UPPER) for e in lifted]
            pattern["lower_energies"] = lows
            pattern["upper_energies"] = ups
            pattern["holds"] = bool(
                all(x < y for x, y in zip(lows, lows[1:]))
                and lows[-1] < 0 < ups[0]
                and all(x < y for x, y in zip(ups, ups[1:]))
            )
        atlas.interleaving = pattern


def uniqueness_breaking_witness(nl: PowerNonlinearity, a: float, b: float, N: int = 5,
                                cfg: ShootingConfig | None = None, cache=None,
                                ground: BoundState | None = None):
    """Two positive radial Kirchhoff solutions built from the one positive ground state."""
    from .cache import solve_cached

    if N < 5 or not a > 0:
        raise OutOfRegime("two positive lifts need N >= 5 and a > 0")
    ground = ground or solve_cached(nl, N, 0, cfg or ShootingConfig(), cache)
    params = KirchhoffParams(a, b, N)
    b_star = rs.thresholds_b(a, N, ground.D).b_star
    if b >= b_star * (1 - rs.TANGENT_TOL):
        raise OutOfRegime(f"b = {b!r} is not below b* = {b_star!r}")
    sols = lift(ground, params, nl)
    u1 = next(s for s in sols if s.label is Branch.LOWER)
    u2 = next(s for s in sols if s.label is Branch.UPPER)
    return u1, u2
