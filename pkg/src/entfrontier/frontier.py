"""E_R boundary curves against C, N and B, gaps to the pure-state curve,
crossings and the Monte Carlo scatter."""

from __future__ import annotations

import csv
import io
import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, SearchFailure
from .kkt import a2_params, b0
from .measures import binary_entropy, concurrence, negativity, nonlocality_B, wootters_W
from .ree import SolverConfig, css_gen_horodecki, horodecki_ree_value, ree, ree_horodecki
from .states import sample_mixture

AXES = ("C", "N", "B")
GRID_POINTS = 401
SCAN_POINTS = 2001
XTOL = 1e-6
BAND_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class FrontierCurve:
    """Sampled E_R(x) on one axis, plus the exact evaluator it was built from."""

    axis: str
    label: str
    x: np.ndarray
    E: np.ndarray
    states: tuple
    func: Callable[[float], float] = field(repr=False)

    def __post_init__(self):
        if self.axis not in AXES:
            raise DomainError(f"unknown axis {self.axis!r}")
        if self.x.size > 1 and np.any(np.diff(self.x) <= 0.0):
            raise ValueError("curve abscissae must be strictly increasing")
        if np.any(self.E < -1e-12) or np.any(self.E > 1.0 + 1e-12):
            raise ValueError("E_R outside [0, 1]")

    def __call__(self, x: float) -> float:
        return self.func(float(x))

    @property
    def domain(self) -> tuple:
        return float(self.x[0]), float(self.x[-1])

    def interpolate(self, x) -> np.ndarray:
        return np.interp(x, self.x, self.E)

    def rows(self) -> list:
        return [(self.axis, float(x), float(e), self.label) for x, e in zip(self.x, self.E)]


@dataclass(frozen=True)
class GapResult:
    x_opt: float
    delta: float
    curve: str
    reference: str = "P"


def default_grid(n: int = GRID_POINTS) -> np.ndarray:
    if n < 2:
        raise DomainError("grid needs at least 2 points")
    return np.linspace(0.0, 1.0, n)


def a2_grid(n: int = GRID_POINTS) -> np.ndarray:
    """Uniform grid refined to step 1e-4 within 0.01 of the switching point."""
    switch = b0()
    dense = np.arange(switch - 0.01, switch + 0.01 + 5e-5, 1e-4)
    return np.unique(np.concatenate([default_grid(n), dense, [switch]]))


def _grid(grid) -> np.ndarray:
    g = np.asarray(default_grid() if grid is None else grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or g.min() < 0.0 or g.max() > 1.0:
        raise DomainError("grid must be a non-empty subset of [0, 1]")
    return np.unique(g)


def _build(axis, label, grid, evaluate) -> FrontierCurve:
    g = _grid(grid)
    values, states = [], []
    for x in g:
        e, desc = evaluate(float(x))
        values.append(e)
        states.append(desc)
    return FrontierCurve(axis, label, g, np.array(values), tuple(states),
                         lambda x: evaluate(x)[0])


def _check_axis(axis, allowed):
    if axis not in allowed:
        raise DomainError(f"axis {axis!r} not in {allowed}")


# --- individual curves ------------------------------------------------------

def curve_pure(axis: str = "B", grid=None) -> FrontierCurve:
    """W(x): pure states have C = N = B."""
    _check_axis(axis, AXES)
    return _build(axis, "P", grid, lambda x: (wootters_W(x), {"family": "pure"}))


def lower_D_value(x: float) -> float:
    return 1.0 - binary_entropy(0.5 * (1.0 + x))


def curve_lower_D(axis: str = "B", grid=None) -> FrontierCurve:
    """Bell-diagonal lower bound 1 - h((1 + x)/2) for x = N or B."""
    _check_axis(axis, ("N", "B"))
    return _build(axis, "D", grid,
                  lambda x: (lower_D_value(x), {"family": "bell_diagonal", "p": 0.5 * (1 + x)}))


def horodecki_p(axis: str, x: float) -> float:
    """Mixing weight p of p|psi+><psi+| + (1-p)|00><00| with the given measure."""
    if axis == "C":
        return x
    if axis == "N":
        return math.sqrt(2.0 * x * (1.0 + x)) - x
    if axis == "B":
        return math.sqrt(0.5 * (1.0 + x * x))
    raise DomainError(f"unknown axis {axis!r}")


def curve_horodecki(axis: str = "B", grid=None) -> FrontierCurve:
    """Horodecki states along any axis; at B = 0 the largest E_R (p = 1/sqrt2)."""
    _check_axis(axis, AXES)

    def evaluate(x):
        p = min(horodecki_p(axis, x), 1.0)
        return horodecki_ree_value(p), {"family": "horodecki", "p": p}

    return _build(axis, "H", grid, evaluate)


def curve_lower_C_horodecki(grid=None) -> FrontierCurve:
    """Lower bound of E_R against concurrence: Horodecki states with p = C."""
    g = _grid(grid)

    def evaluate(x):
        return (ree_horodecki(x).ree if x > 0.0 else 0.0), {"family": "horodecki", "p": x}

    return _build("C", "H", g, evaluate)


def upper_A2_point(B: float):
    bp = a2_params(B)
    return bp.ree, {"family": "adc", "alpha": bp.alpha, "p": bp.p}


def curve_upper_A2(grid=None) -> FrontierCurve:
    """Amplitude-damped upper-bound family on the B axis."""
    return _build("B", "A2", a2_grid() if grid is None else grid, upper_A2_point)


def adc_p_for_negativity(N: float, alpha: float) -> float:
    """p with N(p|psi_alpha><psi_alpha| + (1-p)|00><00|) = N.

    From (N + 1 - p)^2 = (1 - p)^2 + c p^2 with c = 4 alpha (1 - alpha):
    c p^2 + 2N p - N (N + 2) = 0.
    """
    c = 4.0 * alpha * (1.0 - alpha)
    return (-N + math.sqrt(N * N + c * N * (N + 2.0))) / c


def alpha_min_for_negativity(N: float) -> float:
    """Smallest alpha reaching N (at p = 1)."""
    return 0.5 * (1.0 - math.sqrt(max(1.0 - N * N, 0.0)))


def _adc_ree_at_negativity(N, alpha):
    p = min(adc_p_for_negativity(N, alpha), 1.0)
    if p >= 1.0 - 1e-14:
        return binary_entropy(alpha), p
    return css_gen_horodecki(alpha, p)[1].ree, p


def upper_A1_point(N: float, xatol: float = 1e-8):
    """Largest E_R over amplitude-damped states with negativity N."""
    e, desc = _upper_A1_cached(float(N), xatol)
    return e, dict(desc)


@lru_cache(maxsize=65536)
def _upper_A1_cached(N, xatol):
    if N <= 0.0:
        return 0.0, {"family": "adc", "alpha": 0.0, "p": 0.0}
    if N >= 1.0:
        return 1.0, {"family": "adc", "alpha": 0.5, "p": 1.0}
    lo = alpha_min_for_negativity(N)
    res = minimize_scalar(lambda a: -_adc_ree_at_negativity(N, a)[0], bounds=(lo, 0.5),
                          method="bounded", options={"xatol": xatol})
    if not (res.success and np.isfinite(res.fun)):
        raise SearchFailure(f"alpha search failed at N={N}: {res.message}")
    best_a, best_e = float(res.x), -float(res.fun)
    # the bounded search never evaluates the end points themselves
    for a in (lo, 0.5):
        e = _adc_ree_at_negativity(N, a)[0]
        if e > best_e:
            best_a, best_e = a, e
    p = min(adc_p_for_negativity(N, best_a), 1.0)
    return best_e, {"family": "adc", "alpha": best_a, "p": p}


def curve_upper_A1(grid=None) -> FrontierCurve:
    """E_R maximized over the amplitude-damped family at fixed negativity."""
    return _build("N", "A1", grid, upper_A1_point)


# --- gap and crossings ------------------------------------------------------

def gap(curve: FrontierCurve, n_scan: int = SCAN_POINTS, xtol: float = XTOL) -> GapResult:
    """max_x E_R(x) - W(x): scan then bounded Brent refinement."""
    if curve.axis not in ("N", "B"):
        raise DomainError("gap is defined on the N and B axes")
    lo, hi = curve.domain
    xs = np.linspace(lo, hi, n_scan)
    d = np.array([curve(x) - wootters_W(x) for x in xs])
    i = int(np.argmax(d))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, n_scan - 1)]
    res = minimize_scalar(lambda x: -(curve(x) - wootters_W(x)), bounds=(a, b),
                          method="bounded", options={"xatol": xtol})
    x_opt, delta = float(res.x), -float(res.fun)
    if d[i] > delta:
        x_opt, delta = float(xs[i]), float(d[i])
    return GapResult(x_opt, delta, curve.label)


def crossing(curve_a: FrontierCurve, curve_b: FrontierCurve, n_scan: int = SCAN_POINTS,
             xtol: float = XTOL, tol: float = 1e-12) -> list:
    """(x, E_R) where curve_a - curve_b stops having a given sign.

    Each run of one strict sign on the scan that is followed by the opposite
    sign or by coincidence (|difference| <= tol, as when a family merges
    into the pure states) ends at a reported point, located by bisection to
    ``xtol``.  Coincidence at the start of the domain is not a crossing.
    """
    if curve_a.axis != curve_b.axis:
        raise DomainError("curves live on different axes")
    lo = max(curve_a.domain[0], curve_b.domain[0])
    hi = min(curve_a.domain[1], curve_b.domain[1])
    if lo >= hi:
        return []

    def sign(x):
        d = curve_a(x) - curve_b(x)
        return 0 if abs(d) <= tol else (1 if d > 0 else -1)

    xs = np.linspace(lo, hi, n_scan)
    signs = [sign(x) for x in xs]
    out = []
    for i in range(n_scan - 1):
        s = signs[i]
        if s == 0 or signs[i + 1] == s:
            continue
        if i + 2 == n_scan and signs[i + 1] == 0:
            continue  # the curves only meet at the end of the domain
        a, b = xs[i], xs[i + 1]
        while b - a > xtol:
            m = 0.5 * (a + b)
            if sign(m) == s:
                a = m
            else:
                b = m
        x = 0.5 * (a + b)
        out.append((float(x), float(curve_a(x))))
    return out


# --- Monte Carlo ------------------------------------------------------------

@dataclass(frozen=True)
class ScatterPoint:
    C: float
    N: float
    B: float
    E_R: float
    rank: int
    index: int


def point_seed(seed: int, index: int) -> np.random.Generator:
    """Per-point generator; independent of how the run is chunked."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def scatter_point(seed: int, index: int, config: SolverConfig | None = None) -> ScatterPoint:
    config = config or SolverConfig(starts=4)
    rank, rho = sample_mixture(point_seed(seed, index))
    e = ree(rho, config).ree
    return ScatterPoint(concurrence(rho), negativity(rho), nonlocality_B(rho), e, rank, index)


@dataclass
class Bands:
    """Lower and upper E_R bounds per axis, screened on grids, exact on demand."""

    upper_B: FrontierCurve
    upper_N: FrontierCurve
    lower_C: FrontierCurve

    @classmethod
    def build(cls, n: int = GRID_POINTS) -> "Bands":
        return cls(curve_upper_A2(), curve_upper_A1(default_grid(n)),
                   curve_lower_C_horodecki(default_grid(n)))

    # The screens must flag a superset of the exact breaches.  On a
    # non-decreasing curve the grid value at or below x never exceeds the
    # exact upper bound, and the one at or above x is never below the exact
    # lower bound.
    @staticmethod
    def _upper_screen(curve: FrontierCurve, x: float) -> float:
        j = max(int(np.searchsorted(curve.x, x, side="right")) - 1, 0)
        return float(curve.E[j])

    @staticmethod
    def _lower_screen(curve: FrontierCurve, x: float) -> float:
        j = min(int(np.searchsorted(curve.x, x)), curve.x.size - 1)
        return float(curve.E[j])

    def violations(self, pt: ScatterPoint, tol: float = BAND_TOL, exact: bool = False) -> list:
        """Names of the bounds pt breaks beyond tol; screen first, exact if asked."""
        up_B = self.upper_B(pt.B) if exact else self._upper_screen(self.upper_B, pt.B)
        up_N = self.upper_N(pt.N) if exact else self._upper_screen(self.upper_N, pt.N)
        lo_C = self.lower_C(pt.C) if exact else self._lower_screen(self.lower_C, pt.C)
        checks = {
            "B_lower": pt.E_R >= lower_D_value(pt.B) - tol,
            "B_upper": pt.E_R <= up_B + tol,
            "N_lower": pt.E_R >= lower_D_value(pt.N) - tol,
            "N_upper": pt.E_R <= up_N + tol,
            "C_lower": pt.E_R >= lo_C - tol,
            "C_upper": pt.E_R <= wootters_W(pt.C) + tol,
        }
        return [k for k, ok in checks.items() if not ok]


@dataclass
class ScatterResult:
    points: list
    flagged: list  # (point, violated bounds) surviving the 16-start re-check
    rechecked: int


def monte_carlo_scatter(n: int, seed: int = 0, axes: Iterable[str] = AXES,
                        bands: Bands | None = None, starts: int = 4,
                        recheck_starts: int = 16, workers: int = 1) -> ScatterResult:
    """Sample n states, evaluate C, N, B and E_R, re-verify apparent band breaches."""
    if n < 0:
        raise DomainError("n must be non-negative")
    for a in axes:
        _check_axis(a, AXES)
    config = SolverConfig(starts=starts)
    indices = range(n)
    if workers > 1 and n > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_scatter_worker, [(seed, i, starts) for i in indices],
                                   chunksize=max(1, n // (4 * workers))))
    else:
        points = [scatter_point(seed, i, config) for i in indices]
    flagged, rechecked = [], 0
    if bands is not None and points:
        strong = SolverConfig(starts=recheck_starts)
        for k, pt in enumerate(points):
            if not _relevant(bands.violations(pt), axes):
                continue
            rechecked += 1
            _, rho = sample_mixture(point_seed(seed, pt.index))
            e = min(pt.E_R, ree(rho, strong).ree)
            pt = ScatterPoint(pt.C, pt.N, pt.B, e, pt.rank, pt.index)
            points[k] = pt
            bad = _relevant(bands.violations(pt, exact=True), axes)
            if bad:
                flagged.append((pt, bad))
    return ScatterResult(points, flagged, rechecked)


def _relevant(names, axes):
    return [v for v in names if v[0] in axes]


def _scatter_worker(args):
    seed, i, starts = args
    return scatter_point(seed, i, SolverConfig(starts=starts))


# --- CSV --------------------------------------------------------------------

CSV_HEADER = ("axis", "value", "E_R", "source")


def curve_rows(curves: Sequence[FrontierCurve]) -> list:
    return [row for c in curves for row in c.rows()]


def scatter_rows(points: Sequence[ScatterPoint], axes: Iterable[str] = AXES) -> list:
    return [(a, getattr(p, a), p.E_R, "MC") for p in points for a in axes]


def to_csv(rows, stream=None) -> str:
    """Write rows under the fixed header; values use repr-exact floats."""
    buf = io.StringIO() if stream is None else stream
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for axis, x, e, src in rows:
        w.writerow((axis, repr(float(x)), repr(float(e)), src))
    return buf.getvalue() if stream is None else ""
