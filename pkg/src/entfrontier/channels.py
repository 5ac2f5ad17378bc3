"""Amplitude- and phase-damping channels and the damped |psi_alpha> states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .measures import MeasureSet
from .states import (
    BELL_BASIS,
    KET,
    DensityMatrix,
    StateLike,
    as_matrix,
    gen_horodecki,
    projector,
    psi_alpha,
    validate_density,
)

_KET0 = np.array([1.0, 0.0], dtype=complex)
_KET1 = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    operators: tuple
    q: float
    name: str = ""

    def completeness_error(self) -> float:
        total = sum(e.conj().T @ e for e in self.operators)
        return float(np.max(np.abs(total - np.eye(2))))


IDENTITY = KrausChannel((np.eye(2, dtype=complex),), 0.0, "identity")


def _damping_q(q: float) -> float:
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"damping coefficient q={q!r} outside [0, 1]")
    return float(q)


def adc_kraus(q: float) -> KrausChannel:
    q = _damping_q(q)
    e0 = np.outer(_KET0, _KET0) + np.sqrt(1.0 - q) * np.outer(_KET1, _KET1)
    e1 = np.sqrt(q) * np.outer(_KET0, _KET1)
    return KrausChannel((e0, e1), q, "adc")


def pdc_kraus(q: float) -> KrausChannel:
    q = _damping_q(q)
    e0 = np.outer(_KET0, _KET0) + np.sqrt(1.0 - q) * np.outer(_KET1, _KET1)
    e1 = np.sqrt(q) * np.outer(_KET1, _KET1)
    return KrausChannel((e0, e1), q, "pdc")


def apply_two_side(ch1: KrausChannel, ch2: KrausChannel, rho_in: StateLike) -> DensityMatrix:
    """sum_ij (E_i x F_j) rho (E_i x F_j)^dag."""
    m = as_matrix(rho_in)
    out = np.zeros((4, 4), dtype=complex)
    for e in ch1.operators:
        for f in ch2.operators:
            k = np.kron(e, f)
            out += k @ m @ k.conj().T
    return validate_density(out)


def apply_one_side(ch: KrausChannel, rho_in: StateLike) -> DensityMatrix:
    """Damping of the first qubit only."""
    return apply_two_side(ch, IDENTITY, rho_in)


@dataclass(frozen=True, eq=False)
class AdcState:
    """p|psi_alpha_eff><psi_alpha_eff| + (1-p)|00><00|.

    ``degenerate`` marks total damping (p = 0), where alpha_eff is
    immaterial and set to 0.
    """

    alpha_eff: float
    p: float
    density: DensityMatrix
    degenerate: bool = False

    @property
    def q(self) -> float:
        return 1.0 - self.p


def adc_state(alpha_eff: float, p: float) -> AdcState:
    return AdcState(float(alpha_eff), float(p), gen_horodecki(alpha_eff, p))


def _check_unit(**kwargs):
    for name, v in kwargs.items():
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"{name}={v!r} outside [0, 1]")


def adc_closed_form(alpha: float, q1: float, q2: float) -> AdcState:
    """|psi_alpha> after amplitude damping q1 (qubit 1) and q2 (qubit 2)."""
    _check_unit(alpha=alpha, q1=q1, q2=q2)
    p1, p2 = 1.0 - q1, 1.0 - q2
    q = alpha * q2 + (1.0 - alpha) * q1
    p = 1.0 - q
    # alpha p2 + (1 - alpha) p1 equals p
    denom = alpha * p2 + (1.0 - alpha) * p1
    if denom <= 0.0:
        return AdcState(0.0, 0.0, gen_horodecki(0.0, 0.0), degenerate=True)
    # built from the damped amplitudes: going through alpha' would recompute
    # 1 - alpha', which cancels when one side is almost fully damped
    u = np.array([0.0, np.sqrt(alpha * p2), np.sqrt((1.0 - alpha) * p1), 0.0])
    m = projector(u)
    m[0, 0] += q
    return AdcState(float(alpha * p2 / denom), float(p), DensityMatrix(m))


def adc_measures(s: AdcState) -> MeasureSet:
    """C, N, M, B and purity of an amplitude-damped state in closed form."""
    a, p = s.alpha_eff, s.p
    x = 4.0 * (1.0 - a) * a * p * p
    m = max(x, (1.0 - 2.0 * p) ** 2) + x
    return MeasureSet(
        concurrence=float(np.sqrt(x)),
        negativity=float(np.sqrt((1.0 - p) ** 2 + x) - (1.0 - p)),
        horodecki_M=float(m),
        nonlocality_B=float(np.sqrt(max(0.0, m - 1.0))),
        purity=float(p * p + (1.0 - p) ** 2),
    )


@dataclass(frozen=True, eq=False)
class PdcState:
    alpha: float
    y: float
    alpha_eff: float
    p_eff: float
    density: DensityMatrix
    degenerate: bool = False

    @property
    def q_eff(self) -> float:
        return 1.0 - self.p_eff


def pdc_matrix(alpha: float, y: float) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    m[1, 1] = alpha
    m[2, 2] = 1.0 - alpha
    m[1, 2] = m[2, 1] = y
    return m


def pdc_closed_form(alpha: float, q1: float, q2: float) -> PdcState:
    """|psi_alpha> after phase damping q1 (qubit 1) and q2 (qubit 2)."""
    _check_unit(alpha=alpha, q1=q1, q2=q2)
    s = (1.0 - q1) * (1.0 - q2)
    y = float(np.sqrt(alpha * (1.0 - alpha) * s))
    q_eff = alpha * (1.0 - s)
    p_eff = 1.0 - q_eff
    degenerate = p_eff <= 0.0
    alpha_eff = 0.0 if degenerate else alpha * s / p_eff
    return PdcState(alpha, y, alpha_eff, p_eff, DensityMatrix(pdc_matrix(alpha, y)), degenerate)


def pdc_mixture_form(s: PdcState) -> np.ndarray:
    """p''|psi_alpha''><psi_alpha''| + q''|01><01|, the second PDC form."""
    return s.p_eff * projector(psi_alpha(s.alpha_eff)) + s.q_eff * projector(KET["01"])


def v_state(alpha_v: float) -> DensityMatrix:
    """2(1-a)|psi+><psi+| + (2a-1)|01><01| for a in [1/2, 1]."""
    if not 0.5 <= alpha_v <= 1.0:
        raise DomainError(f"alpha'={alpha_v!r} outside [1/2, 1]")
    b = 2.0 * (1.0 - alpha_v)
    return DensityMatrix(pdc_matrix(1.0 - b / 2.0, b / 2.0))


@dataclass(frozen=True, eq=False)
class BellBasisForm:
    """Matrix elements <beta_i|rho|beta_j> with beta = psi-, psi+, phi-, phi+."""

    coefficients: np.ndarray

    @property
    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.coefficients))

    @property
    def r_minus(self) -> float:
        return float(self.coefficients[0, 0].real)

    @property
    def r_plus(self) -> float:
        return float(self.coefficients[1, 1].real)

    @property
    def r(self) -> float:
        return float(self.coefficients[2, 2].real)

    @property
    def t(self) -> complex:
        """Coefficient of |beta_2><beta_1|."""
        return complex(self.coefficients[1, 0])

    def off_diagonal_norm(self) -> float:
        k = self.coefficients
        return float(np.max(np.abs(k - np.diag(np.diag(k)))))

    def is_diagonal(self, tol: float = 1e-10) -> bool:
        return self.off_diagonal_norm() <= tol

    def reconstruct(self) -> np.ndarray:
        return BELL_BASIS @ self.coefficients @ BELL_BASIS.conj().T


def bell_basis_decompose(rho: StateLike) -> BellBasisForm:
    return BellBasisForm(BELL_BASIS.conj().T @ as_matrix(rho) @ BELL_BASIS)


def damp(kind: str, alpha: float, q1: float, q2: float, closed_form: bool = True):
    """Channel output for |psi_alpha>; Kraus summation when not ``closed_form``."""
    if kind not in ("adc", "pdc"):
        raise DomainError(f"unknown channel {kind!r}")
    if closed_form:
        return (adc_closed_form if kind == "adc" else pdc_closed_form)(alpha, q1, q2).density
    make = adc_kraus if kind == "adc" else pdc_kraus
    _check_unit(alpha=alpha)
    rho_in = projector(psi_alpha(alpha))
    return apply_two_side(make(q1), make(q2), rho_in)

