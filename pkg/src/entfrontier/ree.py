"""Relative entropy of entanglement (REE) and closest separable states (CSS).

Closed forms cover pure, Bell-diagonal, Horodecki, amplitude-damped
(generalized Horodecki) and V states.  Everything else goes through
:func:`ree_numeric`, which minimizes S(rho||sigma) over mixtures of product
pure states.  For two qubits that set is exactly the PPT set, so every
iterate is feasible by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize

from ._kernels import objective
from .errors import ConvergenceFailure, DomainError, NonPhysicalCss, RootBracketFailure
from .measures import binary_entropy, wootters_W
from .states import (
    BELL_BASIS,
    KET,
    PSI_PLUS,
    SUPPORT_TOL,
    DensityMatrix,
    PureState,
    StateLike,
    as_matrix,
    gen_horodecki,
    horodecki,
    is_ppt,
    projector,
    relative_entropy,
    validate_density,
)

LN2 = math.log(2.0)
FAMILY_TOL = 1e-10
RESIDUAL_TOL = 1e-10
# The residual grows like sqrt(R1 - edge) next to the delta = 0 edge, so an
# edge root (the alpha = 1/2 case) is only resolvable to about sqrt(eps).
EDGE_RESIDUAL_TOL = 1e-6
DELTA_SLACK = 64 * np.finfo(float).eps
EDGE_DELTA = 1e-8
SCAN_POINTS = 1024
REGULARIZE_STEPS = (1e-12, 1e-10, 1e-8, 1e-6)


@dataclass(frozen=True, eq=False)
class CssSolution:
    sigma: DensityMatrix
    ree: float
    method: str
    diagnostics: dict = field(default_factory=dict)


def _solution(rho, sigma: np.ndarray, method: str, ree: float | None = None, **diag) -> CssSolution:
    sigma = validate_density(0.5 * (sigma + sigma.conj().T))
    value = relative_entropy(rho, sigma) if ree is None else float(ree)
    return CssSolution(sigma, value, method, diag)


# --- closed forms -----------------------------------------------------------

def ree_pure(psi: PureState) -> CssSolution:
    """W(2|ad - bc|) with the Schmidt-basis dephased state as CSS."""
    coeff = np.array([[psi.a, psi.b], [psi.c, psi.d]], dtype=complex)
    u, s, vh = np.linalg.svd(coeff)
    sigma = sum(
        s[k] ** 2 * projector(np.kron(u[:, k], vh[k, :])) for k in range(2)
    )
    c = min(1.0, 2.0 * abs(psi.a * psi.d - psi.b * psi.c))
    return _solution(psi.density(), sigma, "pure", wootters_W(c))


def ree_bell_diagonal(lams) -> CssSolution:
    """REE of sum_i lam_i |beta_i><beta_i| (beta: psi-, psi+, phi-, phi+)."""
    lams = np.clip(np.asarray(lams, dtype=float), 0.0, None)
    if lams.shape != (4,) or abs(lams.sum() - 1.0) > 1e-9:
        raise DomainError("Bell-diagonal weights must be 4 probabilities")
    rho = (BELL_BASIS * lams) @ BELL_BASIS.conj().T
    k = int(np.argmax(lams))
    top = lams[k]
    if top <= 0.5:
        return _solution(rho, rho, "bell_diagonal", 0.0)
    # summed directly: 1 - top cancels when the other weights are tiny
    rest = float(np.delete(lams, k).sum())
    if rest > 1e-15:
        weights = lams * (0.5 / rest)
    else:
        weights = np.zeros(4)
        weights[(k + 1) % 4] = 0.5
    weights[k] = 0.5
    sigma = (BELL_BASIS * weights) @ BELL_BASIS.conj().T
    return _solution(rho, sigma, "bell_diagonal", 1.0 - binary_entropy(top))


def horodecki_ree_value(p: float) -> float:
    """(p-2) log2(1-p/2) + (1-p) log2(1-p)."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p={p!r} outside [0, 1]")
    value = (p - 2.0) * math.log2(1.0 - p / 2.0)
    if p < 1.0:
        value += (1.0 - p) * math.log2(1.0 - p)
    return max(value, 0.0)


def horodecki_css(p: float) -> np.ndarray:
    a = 1.0 - p / 2.0
    sigma = a * a * projector(KET["00"]) + (p / 2.0) ** 2 * projector(KET["11"])
    return sigma + p * a * projector(PSI_PLUS)


def ree_horodecki(p: float) -> CssSolution:
    value = horodecki_ree_value(p)
    return _solution(horodecki(p), horodecki_css(p), "horodecki", value)


def v_state_ree_value(alpha_v: float) -> float:
    if not 0.5 <= alpha_v <= 1.0:
        raise DomainError(f"alpha'={alpha_v!r} outside [1/2, 1]")
    b = 2.0 * (1.0 - alpha_v)
    inner = 0.5 * (math.sqrt((1.0 - b) ** 2 + b * b) + 1.0)
    return max(binary_entropy(b / 2.0) - binary_entropy(min(inner, 1.0)), 0.0)


def ree_v_state(alpha_v: float) -> CssSolution:
    """REE of 2(1-a)|psi+><psi+| + (2a-1)|01><01|, a in [1/2, 1]."""
    from .channels import v_state

    value = v_state_ree_value(alpha_v)
    b = 2.0 * (1.0 - alpha_v)
    sigma = (1.0 - b / 2.0) * projector(KET["01"]) + (b / 2.0) * projector(KET["10"])
    return _solution(v_state(alpha_v), sigma, "v_state", value)


# --- amplitude-damped (generalized Horodecki) states ------------------------

@dataclass(frozen=True, eq=False)
class GenHorodeckiCss:
    """CSS parameters of p|psi_alpha><psi_alpha| + (1-p)|00><00|.

    sigma = R1|00><00| + R4|11><11| + lam+|lam+><lam+| + lam-|lam-><lam-|.
    ``branch`` is the sign in front of sqrt(delta) in R2 (-1 for alpha < 1/2,
    +1 above; the two meet at delta = 0 for alpha = 1/2).
    """

    alpha: float
    p: float
    R1: float
    R2: float
    R3: float
    R4: float
    delta: float
    z: float
    L: float
    lam_plus: float
    lam_minus: float
    Lambda_plus: float
    Lambda_minus: float
    ket_plus: np.ndarray
    ket_minus: np.ndarray
    residual: float
    branch: int

    def sigma_matrix(self) -> np.ndarray:
        s = np.zeros((4, 4), dtype=complex)
        s[0, 0], s[1, 1], s[2, 2], s[3, 3] = self.R1, self.R2, self.R3, self.R4
        s[1, 2] = s[2, 1] = math.sqrt(max(self.R1 * self.R4, 0.0))
        return s


def _gh_parts(r4, alpha, p, branch):
    """R1, R2, R3, delta and R2 - R3 as functions of R4 = R1 - (1 - p).

    Working in R4 avoids the cancellation in R3 = 1 - R1 - R2 - R4 when p is
    small: R2 + R3 = p - 2 R4 and R2 - R3 = (+-sqrt(delta) - p(1 - 2 alpha))/2.
    """
    r4 = np.asarray(r4, dtype=float)
    r1 = (1.0 - p) + r4
    ab = alpha * (1.0 - alpha)
    # (4-3p)^2 - 4ab p^2 - 8 R1 (2-p) + 16 sqrt(R1 R4 p^2 ab), rearranged
    s, t = np.sqrt(np.clip(r1, 0.0, None)), np.sqrt(np.clip(r4, 0.0, None))
    delta = (p * (1.0 - 2.0 * alpha)) ** 2 + 8.0 * t * (
        2.0 * p * math.sqrt(ab) * s - (2.0 - p) * t
    )
    root = np.sqrt(np.where(delta >= -DELTA_SLACK, np.clip(delta, 0.0, None), np.nan))
    diff = 0.5 * (branch * root - p * (1.0 - 2.0 * alpha))
    total = p - 2.0 * r4
    return r1, 0.5 * (total + diff), 0.5 * (total - diff), delta, diff


def _gh_residual(r4, alpha, p, branch):
    """Residual of the stationarity equation; NaN where sigma is unphysical."""
    r4 = np.asarray(r4, dtype=float)
    r1, r2, r3, delta, diff = _gh_parts(r4, alpha, p, branch)
    with np.errstate(invalid="ignore", divide="ignore"):
        z2 = diff * diff + 4.0 * r1 * r4
        z = np.sqrt(z2)
        total = p - 2.0 * r4
        # 2 lam- = R2 + R3 - z = 4 (R2 R3 - R1 R4) / (R2 + R3 + z)
        gap = p * p - 4.0 * r4 - diff * diff
        gap = np.where((gap < 0.0) & (gap > -DELTA_SLACK * p * p), 0.0, gap)
        small = gap / (total + z)
        # at lam- = 0 (the alpha = 1/2 edge) L -> -inf and its term drops out
        L = np.log(small) - np.log(total + z)
        res = (
            r2
            + 2.0 * r4 * (r2 * diff + 2.0 * r1 * r4) / z2
            + 2.0 * r4 * diff / (L * z)
            - alpha * p
        )
    ok = (
        (delta >= -DELTA_SLACK)
        & (r2 >= -RESIDUAL_TOL)
        & (r3 >= -RESIDUAL_TOL)
        & (r4 >= 0.0)
        & (gap >= 0.0)
        & (z > 0.0)
    )
    return np.where(ok & np.isfinite(res), res, np.nan)


def _gh_residual_scalar(r4, alpha, p, branch):
    """Float-only twin of :func:`_gh_residual`, used inside root refinement."""
    r1 = (1.0 - p) + r4
    ab = alpha * (1.0 - alpha)
    s, t = math.sqrt(max(r1, 0.0)), math.sqrt(max(r4, 0.0))
    delta = (p * (1.0 - 2.0 * alpha)) ** 2 + 8.0 * t * (2.0 * p * math.sqrt(ab) * s - (2.0 - p) * t)
    if delta < -DELTA_SLACK or r4 < 0.0:
        return math.nan
    diff = 0.5 * (branch * math.sqrt(max(delta, 0.0)) - p * (1.0 - 2.0 * alpha))
    total = p - 2.0 * r4
    r2, r3 = 0.5 * (total + diff), 0.5 * (total - diff)
    z2 = diff * diff + 4.0 * r1 * r4
    gap = p * p - 4.0 * r4 - diff * diff
    if -DELTA_SLACK * p * p < gap < 0.0:
        gap = 0.0
    if r2 < -RESIDUAL_TOL or r3 < -RESIDUAL_TOL or gap < 0.0 or z2 <= 0.0:
        return math.nan
    z = math.sqrt(z2)
    res = r2 + 2.0 * r4 * (r2 * diff + 2.0 * r1 * r4) / z2 - alpha * p
    if gap > 0.0:
        L = math.log(gap / (total + z)) - math.log(total + z)
        res += 2.0 * r4 * diff / (L * z)
    return res


def _gh_record(alpha, p, r4, branch, residual) -> GenHorodeckiCss:
    r1, r2, r3, delta, diff = (float(v) for v in _gh_parts(r4, alpha, p, branch))
    c2 = max(r1 * r4, 0.0)
    z = math.sqrt(diff * diff + 4.0 * c2)
    lam_p, lam_m = 0.5 * (r2 + r3 + z), 0.5 * (r2 + r3 - z)
    L = math.log(lam_m) - math.log(lam_p) if lam_m > 0 else -math.inf
    kets, norms = [], []
    for lam in (lam_p, lam_m):
        n2 = (lam - r3) ** 2 + c2
        big_lambda = 1.0 / math.sqrt(n2) if n2 > 0 else 0.0
        vec = np.zeros(4, dtype=complex)
        if n2 > 0:
            vec[1], vec[2] = (lam - r3) * big_lambda, math.sqrt(c2) * big_lambda
        norms.append(big_lambda)
        kets.append(vec)
    if n2 == 0 or norms[0] == 0:
        # no coherence: eigenvectors are |01> and |10>
        hi, lo = (1, 2) if r2 >= r3 else (2, 1)
        kets = [np.eye(4, dtype=complex)[hi], np.eye(4, dtype=complex)[lo]]
    return GenHorodeckiCss(
        alpha=alpha, p=p, R1=r1, R2=r2, R3=r3, R4=float(r4), delta=delta, z=z, L=L,
        lam_plus=lam_p, lam_minus=lam_m, Lambda_plus=norms[0], Lambda_minus=norms[1],
        ket_plus=kets[0], ket_minus=kets[1], residual=float(residual), branch=branch,
    )


def _delta_edge(alpha, p, branch, lo):
    """Largest R4 in [lo, p^2/4] up to which delta stays non-negative.

    R2 R3 >= R1 R4 already forces R4 <= p^2/4, and delta(p^2/4) <= 0 with
    equality only for alpha = 1/2.
    """
    top = 0.25 * p * p
    grid = np.linspace(lo, top, SCAN_POINTS)
    delta = _gh_parts(grid, alpha, p, branch)[3]
    neg = np.nonzero(delta < -DELTA_SLACK)[0]
    if neg.size == 0:
        return top
    i = neg[0]
    if i == 0:
        return lo
    f = lambda r: float(_gh_parts(r, alpha, p, branch)[3])
    edge = brentq(f, grid[i - 1], grid[i], xtol=1e-300, rtol=4 * np.finfo(float).eps)
    while f(edge) < -DELTA_SLACK and edge > lo:
        edge = np.nextafter(edge, -np.inf)
    return edge


def css_gen_horodecki(alpha: float, p: float) -> tuple[GenHorodeckiCss, CssSolution]:
    """CSS of the amplitude-damped state via a bracketed root solve.

    The unknown is R4 = R1 - (1 - p), searched on [lo, edge] where edge bounds
    the region with delta >= 0.  Sign changes of the residual on a scan
    (quadratically refined toward the edge, logarithmically toward both
    ends) are refined with Brent's method and the physical root with the
    smallest relative entropy is kept.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha={alpha!r} outside (0, 1)")
    if not (0.0 < p <= 1.0):
        raise DomainError(f"p={p!r} outside (0, 1]")
    rho = gen_horodecki(alpha, p)
    branch = -1 if alpha < 0.5 else 1

    if p >= 1.0 - 1e-14:
        # pure limit: R1 = R4 = 0, sigma is the dephased |psi_alpha>
        rec = _gh_record(alpha, 1.0, 0.0, branch, 0.0)
        rec = GenHorodeckiCss(**{**rec.__dict__, "R1": 0.0, "R2": alpha, "R3": 1.0 - alpha})
        sigma = rec.sigma_matrix()
        return rec, _solution(rho, sigma, "gen_horodecki", binary_entropy(alpha))

    lo = max(0.0, 1e-14 - (1.0 - p))
    edge = _delta_edge(alpha, p, branch, lo)
    span = edge - lo
    g = lambda r4: _gh_residual_scalar(r4, alpha, p, branch)
    # quadratic spacing toward the edge follows the square-root behaviour
    # there; logarithmic runs resolve roots crowding either end
    us = np.union1d(np.linspace(0.0, 1.0, SCAN_POINTS + 1), np.logspace(-12, -3, 181))
    ts = np.logspace(-16, -3, 131)
    grid = np.unique(np.concatenate([edge - span * us * us, lo + span * ts]))
    grid = grid[(grid >= lo) & (grid <= edge)]
    res = _gh_residual(grid, alpha, p, branch)

    roots = []
    if np.isfinite(res[-1]) and abs(res[-1]) <= EDGE_RESIDUAL_TOL:
        roots.append(edge)
    a, b = res[:-1], res[1:]
    both = np.isfinite(a) & np.isfinite(b)
    roots.extend(grid[1:][both & (b == 0.0)])
    for i in np.nonzero(both & (a * b < 0.0))[0]:
        roots.append(brentq(g, grid[i], grid[i + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps))

    best = None
    for r4 in roots:
        r = g(r4)
        near_edge = float(_gh_parts(r4, alpha, p, branch)[3]) <= EDGE_DELTA
        tol = EDGE_RESIDUAL_TOL if near_edge else RESIDUAL_TOL
        if not (np.isfinite(r) and abs(r) <= tol):
            continue  # sign flip across a singularity, not a root
        rec = _gh_record(alpha, p, r4, branch, r)
        if min(rec.R1, rec.R2, rec.R3, rec.R4, rec.lam_minus) < -RESIDUAL_TOL:
            continue
        sigma = rec.sigma_matrix()
        value = relative_entropy(rho, sigma)
        if best is None or value < best[0]:
            best = (value, rec, sigma)
    if best is None:
        finite = res[np.isfinite(res)]
        lo_res = float(finite[0]) if finite.size else math.nan
        hi_res = float(finite[-1]) if finite.size else math.nan
        raise RootBracketFailure(
            f"no physical root for alpha={alpha}, p={p} "
            f"(residual {lo_res:.3e} at R4={lo:.6g}, {hi_res:.3e} at R4={edge:.6g})",
            lo_res,
            hi_res,
        )
    value, rec, sigma = best
    if min(rec.R1, rec.R2, rec.R3, rec.R4) < -RESIDUAL_TOL:
        raise NonPhysicalCss(f"negative CSS weight for alpha={alpha}, p={p}")
    return rec, _solution(rho, sigma, "gen_horodecki", value, residual=rec.residual)


def ree_gen_horodecki(alpha: float, p: float) -> float:
    """REE of p|psi_alpha><psi_alpha| + (1-p)|00><00| in bits."""
    if p <= 0.0 or alpha <= 0.0 or alpha >= 1.0:
        return 0.0
    return css_gen_horodecki(alpha, p)[1].ree


# --- numerical minimization -------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    """Settings for :func:`ree_numeric`.

    ``tol`` is the relative objective stall used by L-BFGS; ``n_terms`` is
    the number of product states in the separable ansatz.
    """

    starts: int = 8
    max_iter: int = 3000
    tol: float = 1e-13
    seed: int = 0
    n_terms: int = 6
    eig_floor: float = 1e-12


class _ProductMixture:
    """sigma(x) = sum_k w_k |u_k><u_k| (x) |v_k><v_k| and its gradient."""

    def __init__(self, rho: np.ndarray, n_terms: int, floor: float):
        self.rho = np.ascontiguousarray(rho, dtype=complex)
        self.K = n_terms
        self.floor = floor
        self.size = n_terms * 9

    def split(self, x):
        K = self.K
        s = x[:K]
        uv = x[K:].reshape(2, K, 2, 2)
        u = uv[0, :, :, 0] + 1j * uv[0, :, :, 1]
        v = uv[1, :, :, 0] + 1j * uv[1, :, :, 1]
        return s, u, v

    def pack(self, s, u, v) -> np.ndarray:
        uv = np.stack([np.stack([u.real, u.imag], -1), np.stack([v.real, v.imag], -1)])
        return np.concatenate([s, uv.ravel()])

    def sigma(self, x) -> np.ndarray:
        s, u, v = self.split(x)
        w = s * s / (s @ s)
        prod = (u[:, :, None] * v[:, None, :]).reshape(self.K, 4)
        prod /= np.linalg.norm(prod, axis=1)[:, None]
        return (prod.T * w) @ prod.conj()

    def __call__(self, x):
        return objective(x, self.rho, self.K, self.floor)


def _schmidt(vec: np.ndarray):
    u, s, vh = np.linalg.svd(vec.reshape(2, 2))
    return [(s[k] ** 2, u[:, k], vh[k, :]) for k in range(2)]


def _starts(rho: np.ndarray, model: _ProductMixture, config: SolverConfig):
    """Maximally mixed, computational dephasing, Schmidt-dephased eigenmixture, random."""
    K = model.K
    rng = np.random.default_rng(config.seed)
    basis = np.eye(2, dtype=complex)
    comp = [(basis[i], basis[j]) for i in range(2) for j in range(2)]

    def fill(terms):
        terms = list(terms)[:K]
        while len(terms) < K:
            terms.append((1e-4, rng.normal(size=2) + 1j * rng.normal(size=2),
                          rng.normal(size=2) + 1j * rng.normal(size=2)))
        s = np.sqrt(np.array([max(t[0], 1e-8) for t in terms]))
        u = np.array([t[1] for t in terms]) + 1e-3 * rng.normal(size=(K, 2))
        v = np.array([t[2] for t in terms]) + 1e-3 * rng.normal(size=(K, 2))
        return model.pack(s, u, v)

    out = [fill((0.25, a, b) for a, b in comp)]
    diag = np.clip(np.real(np.diag(rho)), 1e-3, None)
    out.append(fill((d, a, b) for d, (a, b) in zip(diag, comp)))
    lam, vec = np.linalg.eigh(rho)
    terms = []
    for k in np.argsort(lam)[::-1][:2]:
        terms += [(lam[k] * w, a, b) for w, a, b in _schmidt(vec[:, k])]
    out.append(fill(terms))
    while len(out) < config.starts:
        out.append(rng.normal(size=model.size))
    return out[: config.starts]


def ree_numeric(rho: StateLike, config: SolverConfig | None = None) -> CssSolution:
    """Minimize S(rho||sigma) over separable sigma with multiple starts.

    Each start runs L-BFGS on a mixture of ``n_terms`` product pure states;
    the lowest objective wins.  PPT inputs return sigma = rho immediately.
    """
    config = config or SolverConfig()
    m = as_matrix(rho)
    if is_ppt(m):
        return _solution(m, m, "numeric", 0.0, starts=0, objective_trace=[])
    model = _ProductMixture(m, config.n_terms, config.eig_floor)
    s_rho = -_entropy_bits(m)
    runs = []
    for x0 in _starts(m, model, config):
        trace = []
        res = minimize(
            model,
            x0,
            jac=True,
            method="L-BFGS-B",
            callback=lambda intermediate_result: trace.append(float(intermediate_result.fun)),
            options={"maxiter": config.max_iter, "ftol": config.tol, "gtol": 1e-12, "maxcor": 30},
        )
        runs.append((float(res.fun), res, trace))
    if all(r.status == 1 for _, r, _ in runs):
        raise ConvergenceFailure(
            f"no start converged within {config.max_iter} iterations",
            {"objective": [f + s_rho for f, _, _ in runs]},
        )
    f_best, res, trace = min(runs, key=lambda t: t[0])
    sigma = model.sigma(res.x)
    # A rank-deficient optimum can leave rho with round-off weight just above
    # the support threshold on sigma's kernel; a trace of I/4 keeps sigma
    # separable and the value finite.
    mixed_in = 0.0
    for eps in REGULARIZE_STEPS:
        if math.isfinite(relative_entropy(m, sigma)):
            break
        sigma = (1.0 - eps) * model.sigma(res.x) + eps * np.eye(4) / 4
        mixed_in = eps
    return _solution(
        m,
        sigma,
        "numeric",
        regularized=mixed_in,
        starts=len(runs),
        start_values=[f + s_rho for f, _, _ in runs],
        objective_trace=[f + s_rho for f in trace],
        iterations=int(res.nit),
    )


def _entropy_bits(m: np.ndarray) -> float:
    w = np.linalg.eigvalsh(m)
    w = w[w > SUPPORT_TOL]
    return float(-np.sum(w * np.log2(w)))


# --- dispatcher -------------------------------------------------------------

def detect_family(rho: StateLike, tol: float = FAMILY_TOL):
    """Return (tag, params) for the closed-form family containing rho, or None."""
    m = as_matrix(rho)
    lam, vec = np.linalg.eigh(m)
    if lam[-2] <= tol:
        return "pure", PureState.from_vector(vec[:, -1] / np.linalg.norm(vec[:, -1]))

    k = BELL_BASIS.conj().T @ m @ BELL_BASIS
    if np.max(np.abs(k - np.diag(np.diag(k)))) <= tol:
        return "bell_diagonal", np.real(np.diag(k))

    others = np.abs(m).copy()
    for i, j in ((0, 0), (1, 1), (2, 2), (1, 2), (2, 1)):
        others[i, j] = 0.0
    c = m[1, 2]
    if np.max(others) <= tol and abs(c.imag) <= tol and c.real >= -tol:
        pop00, pop01, pop10 = m[0, 0].real, m[1, 1].real, m[2, 2].real
        p = 1.0 - pop00
        if p > tol and abs(c.real**2 - pop01 * pop10) <= tol:
            alpha = pop01 / p
            if abs(alpha - 0.5) <= tol:
                return "horodecki", (p,)
            if tol < alpha < 1.0 - tol:
                return "gen_horodecki", (alpha, p)
        if abs(pop00) <= tol and abs(pop10 - c.real) <= tol and pop01 >= 0.5 - tol:
            return "v_state", (min(max(pop01, 0.5), 1.0),)
    return None


def ree(rho: StateLike, config: SolverConfig | None = None) -> CssSolution:
    """Route rho to a closed form when it belongs to a known family."""
    m = as_matrix(rho)
    found = detect_family(m)
    if found is not None:
        tag, params = found
        if tag == "pure":
            return ree_pure(params)
        if tag == "bell_diagonal":
            return ree_bell_diagonal(params)
        if tag == "horodecki":
            return ree_horodecki(*params)
        if tag == "gen_horodecki":
            return css_gen_horodecki(*params)[1]
        if tag == "v_state":
            return ree_v_state(*params)
    return ree_numeric(m, config)
