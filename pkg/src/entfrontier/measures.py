"""Closed-form entanglement and CHSH-nonlocality measures for two qubits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .states import (
    PAULI_PAIRS,
    SYSY,
    StateLike,
    as_matrix,
    partial_transpose,
    to_bloch,
)

DOMAIN_TOL = 1e-12
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class MeasureSet:
    concurrence: float
    negativity: float
    horodecki_M: float
    nonlocality_B: float
    purity: float

    def as_dict(self) -> dict:
        return {
            "C": self.concurrence,
            "N": self.negativity,
            "M": self.horodecki_M,
            "B": self.nonlocality_B,
            "purity": self.purity,
        }


def _check_unit_interval(x: float, name: str) -> float:
    if not (-DOMAIN_TOL <= x <= 1.0 + DOMAIN_TOL):
        raise DomainError(f"{name}={x!r} outside [0, 1]")
    return min(max(float(x), 0.0), 1.0)


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2(1-x), with h(0) = h(1) = 0."""
    x = _check_unit_interval(x, "x")
    # + 0.0 turns the -0.0 of an empty sum into 0.0
    return float(-sum(t * np.log2(t) for t in (x, 1.0 - x) if t > 0.0)) + 0.0


def wootters_W(b: float) -> float:
    """Pure-state REE as a function of C = N = B."""
    b = _check_unit_interval(b, "B")
    return binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - b * b)))


def concurrence(rho: StateLike) -> float:
    """Wootters concurrence.

    With rho = V V^dag, the square roots of the spin-flip spectrum
    eig[rho (sy x sy) rho* (sy x sy)] are the singular values of
    V^T (sy x sy) V.  This avoids square roots of the eigenvalues of a
    product and stays accurate to round-off for rank-deficient states,
    where the sqrt(rho) similarity loses half the digits.
    """
    m = as_matrix(rho)
    w, u = np.linalg.eigh(0.5 * (m + m.conj().T))
    v = u * np.sqrt(np.clip(w, 0.0, None))
    lam = np.linalg.svd(v.T @ SYSY @ v, compute_uv=False)
    return float(max(0.0, 2.0 * lam.max() - lam.sum()))


def negativity(rho: StateLike) -> float:
    mu_min = np.linalg.eigvalsh(partial_transpose(rho))[0]
    return float(max(0.0, -2.0 * mu_min))


def correlation_eigensystem(rho: StateLike):
    """Eigenvalues (descending) and eigenvectors of U = T^T T, plus T."""
    T = to_bloch(rho).T
    h, c = np.linalg.eigh(T.T @ T)
    return h[::-1], c[:, ::-1], T


def horodecki_M(rho: StateLike) -> float:
    h, _, _ = correlation_eigensystem(rho)
    return float(h[0] + h[1])


def nonlocality_from_M(m: float) -> float:
    return float(np.sqrt(max(0.0, m - 1.0)))


def nonlocality_B(rho: StateLike) -> float:
    return nonlocality_from_M(horodecki_M(rho))


def bell_diagonal_B(lams) -> float:
    """Nonlocality of sum_i lam_i |beta_i><beta_i| (beta: psi-, psi+, phi-, phi+)."""
    l1, l2, l3, l4 = (float(x) for x in lams)
    terms = [
        (l1 - l2) ** 2 + (l3 - l4) ** 2,
        (l2 - l3) ** 2 + (l1 - l4) ** 2,
        (l3 - l1) ** 2 + (l2 - l4) ** 2,
    ]
    return float(np.sqrt(max(0.0, 2.0 * max(terms) - 1.0)))


def purity(rho: StateLike) -> float:
    m = as_matrix(rho)
    return float(np.real(np.trace(m @ m)))


def measure_set(rho: StateLike) -> MeasureSet:
    m = horodecki_M(rho)
    return MeasureSet(
        concurrence=concurrence(rho),
        negativity=negativity(rho),
        horodecki_M=m,
        nonlocality_B=nonlocality_from_M(m),
        purity=purity(rho),
    )


@dataclass(frozen=True, eq=False)
class ChshOperator:
    """Optimal Bell-CHSH operator a.s x (b+b').s + a'.s x (b-b').s."""

    matrix: np.ndarray
    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray
    expectation: float
    degenerate: bool


def chsh_from_settings(a, a_prime, b, b_prime) -> np.ndarray:
    """Operator for given unit vectors (Alice a, a'; Bob b, b')."""
    a, a_prime, b, b_prime = (np.asarray(v, dtype=float) for v in (a, a_prime, b, b_prime))
    coeff = np.outer(a, b + b_prime) + np.outer(a_prime, b - b_prime)
    return np.einsum("ij,ijkl->kl", coeff, PAULI_PAIRS)


def _unit(v: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    return v / n if n > 1e-14 else fallback


def _orthogonal_unit(v: np.ndarray) -> np.ndarray:
    trial = np.eye(3)[np.argmin(np.abs(v))]
    w = trial - v * (v @ trial)
    return w / np.linalg.norm(w)


def chsh_operator(rho: StateLike) -> ChshOperator:
    """Construct settings that attain max Tr(rho B_CHSH) = 2 sqrt(M).

    Bob's settings are rotated within the top-two eigenvectors c1, c2 of
    T^T T by the angle with tan(theta) = sqrt(h2/h1); Alice's settings are
    then aligned with T(b + b') and T(b - b').  When h1 and h2 coincide any
    eigenbasis is a valid choice and ``degenerate`` is set.
    """
    h, c, T = correlation_eigensystem(rho)
    h1, h2 = max(h[0], 0.0), max(h[1], 0.0)
    c1, c2 = c[:, 0], c[:, 1]
    theta = np.arctan2(np.sqrt(h2), np.sqrt(h1))
    b = np.cos(theta) * c1 + np.sin(theta) * c2
    b_prime = np.cos(theta) * c1 - np.sin(theta) * c2
    a = _unit(T @ c1, c1)
    a_prime = _unit(T @ c2, _orthogonal_unit(a))
    op = chsh_from_settings(a, a_prime, b, b_prime)
    value = float(np.real(np.trace(as_matrix(rho) @ op)))
    return ChshOperator(
        matrix=op,
        a=a,
        a_prime=a_prime,
        b=b,
        b_prime=b_prime,
        expectation=value,
        degenerate=bool(abs(h[0] - h[1]) <= DEGENERACY_TOL),
    )
