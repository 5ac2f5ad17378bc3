"""KKT extremality checks for rank-2 states at fixed CHSH nonlocality.

The Lagrangian couples S(rho||sigma) to the constraint Tr(rho B_CHSH) = beta
with beta = 2 sqrt(M).  Natural logarithms are used throughout; E_R enters
as gamma * E_R with gamma = 1/log2(e) = ln 2 so that public values stay in
bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .channels import AdcState, adc_state
from .errors import DomainError, RankError
from .measures import binary_entropy, horodecki_M, nonlocality_B, wootters_W
from .ree import css_gen_horodecki, ree_bell_diagonal
from .states import (
    PAULI_PAIRS,
    DensityMatrix,
    StateLike,
    as_matrix,
    relative_entropy,
    rho_d2,
    support_log,
)

GAMMA = math.log(2.0)
RANK_TOL = 1e-10
PASS_TOL = 1e-8
#: nonlocality at which the upper-bound family switches to pure states, reference value
B0_REFERENCE = 0.81686

SXSX, SYSY, SZSZ = PAULI_PAIRS[0, 0], PAULI_PAIRS[1, 1], PAULI_PAIRS[2, 2]


@dataclass(frozen=True, eq=False)
class KktReport:
    multiplier_l: float
    beta: float
    gamma: float
    ree: float
    X: np.ndarray
    min_eig_X: float
    min_eig_X_full: float
    extremum: str
    cond0_residual: float
    cond1_residual: float
    cross_residual: float
    trace_X_rho: float
    verdict: bool

    def as_dict(self) -> dict:
        return {
            "multiplier_l": self.multiplier_l,
            "beta": self.beta,
            "gamma": self.gamma,
            "E_R": self.ree,
            "min_eig_X": self.min_eig_X,
            "min_eig_X_full": self.min_eig_X_full,
            "extremum": self.extremum,
            "cond0_residual": self.cond0_residual,
            "cond1_residual": self.cond1_residual,
            "cross_residual": self.cross_residual,
            "trace_X_rho": self.trace_X_rho,
            "verdict": "pass" if self.verdict else "fail",
        }


def chsh_op_bell_diagonal(p: float) -> np.ndarray:
    """Optimal CHSH operator for p|psi+><psi+| + (1-p)|psi-><psi-|."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p={p!r} outside [0, 1]")
    eta = 2.0 / math.sqrt(1.0 + (2.0 * p - 1.0) ** 2)
    return eta * (-SZSZ + (2.0 * p - 1.0) * SXSX)


def chsh_op_adc(alpha: float, p: float) -> np.ndarray:
    """Optimal CHSH operator for the amplitude-damped state.

    Both branches use the coherence 2p sqrt(alpha(1-alpha)) = sqrt(x), so the
    squared coefficients sum to 4 and the expectation is 2 sqrt(M).
    """
    if not (0.0 <= alpha <= 1.0 and 0.0 <= p <= 1.0):
        raise DomainError(f"alpha={alpha!r}, p={p!r} outside [0, 1]")
    x = 4.0 * p * p * alpha * (1.0 - alpha)
    zz = (1.0 - 2.0 * p) ** 2
    if x - zz < 0.0:
        eta1 = 2.0 / math.sqrt(zz + x)
        return eta1 * ((1.0 - 2.0 * p) * SZSZ + math.sqrt(x) * SXSX)
    eta2 = 2.0 / math.sqrt(2.0 * x)
    return eta2 * math.sqrt(x) * (SXSX + SYSY)


def chsh_op_degenerate(w: float) -> np.ndarray:
    """sqrt2 [w (XX + YY) - (2 - 2w) ZZ], w in [1/2, 1].

    When T^T T is proportional to the identity with T = diag(c, c, -c), the
    optimal CHSH operators form a convex set; this is its diagonal, xy-
    symmetric slice.  Every member has expectation 2 sqrt(M); w = 1 is the
    operator of :func:`chsh_op_adc`.
    """
    if not 0.5 <= w <= 1.0:
        raise DomainError(f"w={w!r} outside [1/2, 1]")
    return math.sqrt(2.0) * (w * (SXSX + SYSY) - (2.0 - 2.0 * w) * SZSZ)


def kkt_check(
    rho: StateLike, sigma: StateLike, chsh_op: np.ndarray, extremum: str = "min"
) -> KktReport:
    """Evaluate the KKT conditions for a rank-2 rho with CSS candidate sigma.

    On the support of rho the stationarity condition reads
    K0 + l K1 = 0 with K0 = ln rho - ln sigma - gamma E_R and
    K1 = B - beta (both as 2x2 blocks in rho's eigenbasis).  The multiplier
    l is its least-squares solution; the off-diagonal and diagonal
    remainders are reported as cond0 and cond1.  Logarithms are restricted
    to the respective supports.

    ``extremum="min"`` (lower bound) requires X >= 0 for the full 4x4 X.
    For ``"max"`` (upper bound) the slack is -X, and the true ln rho = -inf
    on the kernel of rho makes its kernel block unbounded, so only the
    support block has to be positive semidefinite; complementary slackness
    then needs both the support block and the support/kernel block of X to
    vanish (cond0, cond1 and ``cross_residual``).  ``min_eig_X`` is the
    smallest eigenvalue of the slack that applies; ``min_eig_X_full`` is
    always that of the support-restricted X.
    """
    if extremum not in ("min", "max"):
        raise DomainError(f"extremum must be 'min' or 'max', got {extremum!r}")
    m, s = as_matrix(rho), as_matrix(sigma)
    op = np.asarray(chsh_op, dtype=complex)
    lam, vec = np.linalg.eigh(m)
    order = np.argsort(lam)[::-1]
    lam, vec = lam[order], vec[:, order]
    rank = int(np.sum(lam > RANK_TOL))
    if rank != 2:
        raise RankError(f"rho has rank {rank}, expected 2")
    support = vec[:, :2]
    P = support @ support.conj().T
    ln_rho = (support * np.log(lam[:2])) @ support.conj().T
    ln_sigma = support_log(s)
    ree = relative_entropy(m, s)
    beta = 2.0 * math.sqrt(max(horodecki_M(m), 0.0))
    eye2 = np.eye(2)

    k0 = support.conj().T @ (ln_rho - ln_sigma) @ support - GAMMA * ree * eye2
    k1 = support.conj().T @ op @ support - beta * eye2
    norm1 = float(np.real(np.vdot(k1, k1)))
    l = -float(np.real(np.vdot(k1, k0))) / norm1 if norm1 > 1e-30 else 0.0
    block = k0 + l * k1

    X = ln_rho + P - ln_sigma + l * op - (GAMMA * ree + 1.0 + l * beta) * np.eye(4)
    X = 0.5 * (X + X.conj().T)
    min_eig_full = float(np.linalg.eigvalsh(X)[0])
    if extremum == "min":
        min_eig = min_eig_full
    else:
        min_eig = float(np.linalg.eigvalsh(-(support.conj().T @ X @ support))[0])
    trace_x_rho = float(np.real(np.trace(X @ m)))
    cond0 = float(abs(block[0, 1]))
    cond1 = float(max(abs(block[0, 0]), abs(block[1, 1])))
    cross = float(np.max(np.abs((np.eye(4) - P) @ X @ P)))
    verdict = (
        np.isfinite(ree)
        and min_eig >= -PASS_TOL
        and abs(trace_x_rho) <= PASS_TOL
        and cond0 <= PASS_TOL
    )
    if extremum == "max":
        verdict = verdict and cond1 <= PASS_TOL and cross <= PASS_TOL
    return KktReport(
        multiplier_l=l,
        beta=beta,
        gamma=GAMMA,
        ree=ree,
        X=X,
        min_eig_X=min_eig,
        min_eig_X_full=min_eig_full,
        extremum=extremum,
        cond0_residual=cond0,
        cond1_residual=cond1,
        cross_residual=cross,
        trace_X_rho=trace_x_rho,
        verdict=bool(verdict),
    )


# --- boundary families ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A state on one of the extremal E_R-versus-B families.

    ``family`` is "D" (Bell-diagonal lower bound) or "A2" (amplitude-damped
    upper bound).  ``p_interval`` is set at B = B0, where every p in the
    interval gives the same B and the returned state uses p = 1.
    """

    family: str
    B: float
    p: float
    alpha: float
    state: DensityMatrix
    sigma: DensityMatrix
    ree: float
    adc: AdcState | None = None
    p_interval: tuple | None = None
    extra: dict = field(default_factory=dict)

    def chsh_operator(self) -> np.ndarray:
        if self.family == "D":
            return chsh_op_bell_diagonal(self.p)
        if self.p < 1.0 and self.alpha > 0.0:
            # mixed branch: T^T T is degenerate, pick the optimal operator
            # that best satisfies stationarity
            return chsh_op_degenerate(self.degenerate_weight())
        return chsh_op_adc(self.alpha, self.p)

    def degenerate_weight(self) -> float:
        """w in [1/2, 1] zeroing <psi_alpha_perp| X |psi_alpha>, else the better end."""
        a = self.alpha
        psi = np.array([0.0, math.sqrt(a), math.sqrt(1.0 - a), 0.0])
        perp = np.array([0.0, math.sqrt(1.0 - a), -math.sqrt(a), 0.0])

        def cross(w):
            X = kkt_check(self.state, self.sigma, chsh_op_degenerate(w), "max").X
            return float(np.real(perp @ X @ psi))

        lo, hi = cross(0.5), cross(1.0)
        if lo * hi <= 0.0:
            return float(brentq(cross, 0.5, 1.0, xtol=1e-15))
        return 0.5 if abs(lo) < abs(hi) else 1.0

    @property
    def extremum(self) -> str:
        return "min" if self.family == "D" else "max"

    def kkt(self) -> KktReport:
        return kkt_check(self.state, self.sigma, self.chsh_operator(), self.extremum)


def _check_B(B: float) -> float:
    if not 0.0 <= B <= 1.0:
        raise DomainError(f"B={B!r} outside [0, 1]")
    return float(B)


def a2_p_mixed(B: float) -> float:
    """Survival p on the mixed branch: (2 + sqrt(2 + 2B^2)) / 4."""
    return 0.25 * (2.0 + math.sqrt(2.0 + 2.0 * B * B))


def a2_alpha(p: float, B: float) -> float:
    """alpha = (p - sqrt(5p^2 - 4p - B^2)) / (2p)."""
    disc = 5.0 * p * p - 4.0 * p - B * B
    if disc < -1e-12:
        raise DomainError(f"no amplitude-damped state with p={p!r}, B={B!r}")
    return (p - math.sqrt(max(disc, 0.0))) / (2.0 * p)


def _a2_mixed_ree(B: float) -> float:
    p = a2_p_mixed(B)
    return css_gen_horodecki(a2_alpha(p, B), p)[1].ree


def b0_crossing(lo: float = 0.7, hi: float = 0.9) -> float:
    """B where the mixed branch of the upper-bound family meets W(B)."""
    return brentq(lambda b: _a2_mixed_ree(b) - wootters_W(b), lo, hi, xtol=1e-13)


_B0_CACHE: list = []


def b0() -> float:
    """Computed switching point B0 (cached); close to :data:`B0_REFERENCE`."""
    if not _B0_CACHE:
        _B0_CACHE.append(b0_crossing())
    return _B0_CACHE[0]


def a2_params(B: float) -> BoundaryPoint:
    """Upper-bound amplitude-damped state with nonlocality B.

    Below B0 the survival probability follows the mixed branch; above it
    the state is pure (p = 1).  At B = B0 (within 1e-12) the interval of
    admissible p is recorded and the pure representative returned.
    """
    B = _check_B(B)
    switch = b0()
    interval = None
    if B < switch - 1e-12:
        p = a2_p_mixed(B)
    else:
        p = 1.0
        if abs(B - switch) <= 1e-12:
            interval = (a2_p_mixed(B), 1.0)
    alpha = a2_alpha(p, B)
    if alpha <= 0.0:
        # B = 0 on the pure branch is a product state
        adc = adc_state(0.0, p)
        rho = adc.density
        return BoundaryPoint("A2", B, p, 0.0, rho, rho, 0.0, adc, interval)
    rec, sol = css_gen_horodecki(alpha, p)
    adc = adc_state(alpha, p)
    return BoundaryPoint("A2", B, p, alpha, adc.density, sol.sigma, sol.ree, adc, interval,
                         {"residual": rec.residual})


def d_params(B: float) -> BoundaryPoint:
    """Lower-bound Bell-diagonal state p|psi+><psi+| + (1-p)|psi-><psi-|, p = (1+B)/2."""
    B = _check_B(B)
    p = 0.5 * (1.0 + B)
    rho = rho_d2(p)
    sol = ree_bell_diagonal([1.0 - p, p, 0.0, 0.0])
    # the CSS is the equal mixture of psi+ and psi- for every p
    sigma = rho_d2(0.5)
    return BoundaryPoint("D", B, p, 0.5, rho, sigma, 1.0 - binary_entropy(p), None, None,
                         {"closed_form_ree": sol.ree})


def recompute_B(point: BoundaryPoint) -> float:
    return nonlocality_B(point.state)
