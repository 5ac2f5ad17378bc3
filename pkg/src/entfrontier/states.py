"""Two-qubit state representation, validation and basic linear algebra.

Basis order is |00>, |01>, |10>, |11> throughout; the partial transpose acts
on the second qubit.  Entropies are in bits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import NotHermitian, NotPSD, NotUnitTrace

STATE_TOL = 1e-9
SUPPORT_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)
#: sigma_i (x) sigma_j for i, j in {x, y, z}
PAULI_PAIRS = np.array([[np.kron(a, b) for b in PAULIS] for a in PAULIS])
SIGMA_A = np.array([np.kron(s, I2) for s in PAULIS])
SIGMA_B = np.array([np.kron(I2, s) for s in PAULIS])
SYSY = np.kron(SY, SY)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated 4x4 two-qubit density matrix.

    Build instances with :func:`validate_density`; the constructor itself
    does not check anything.
    """

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(\n{np.array2string(self.matrix, precision=4)})"


StateLike = Union[DensityMatrix, np.ndarray]


def as_matrix(rho: StateLike) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


@dataclass(frozen=True)
class PureState:
    """Amplitudes of a|00> + b|01> + c|10> + d|11>."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        norm = abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2 + abs(self.d) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"pure state is not normalized (|psi|^2 = {norm!r})")

    @classmethod
    def from_vector(cls, v) -> "PureState":
        v = np.asarray(v, dtype=complex).reshape(4)
        return cls(*(complex(x) for x in v))

    @classmethod
    def psi_alpha(cls, alpha: float) -> "PureState":
        """sqrt(alpha)|01> + sqrt(1-alpha)|10>."""
        return cls(0.0, np.sqrt(alpha), np.sqrt(1.0 - alpha), 0.0)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=complex)

    def density(self) -> DensityMatrix:
        v = self.vector
        return DensityMatrix(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class BlochForm:
    x: np.ndarray
    y: np.ndarray
    T: np.ndarray = field(repr=True)

    def __post_init__(self):
        for name in ("x", "y", "T"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted descending with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def validate_density(m, tol: float = STATE_TOL) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity; never renormalizes."""
    m = np.array(as_matrix(m), dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > tol:
        raise NotHermitian(f"matrix is not Hermitian (max |m - m^dag| = {asym:.3e})", asym)
    tr_err = float(abs(np.trace(m) - 1.0))
    if tr_err > tol:
        raise NotUnitTrace(f"trace differs from 1 by {tr_err:.3e}", tr_err)
    lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
    if lam_min < -tol:
        raise NotPSD(f"matrix has negative eigenvalue {lam_min:.3e}", lam_min)
    return DensityMatrix(m)


def spectrum(rho: StateLike) -> Spectrum:
    m = as_matrix(rho)
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def to_bloch(rho: StateLike) -> BlochForm:
    m = as_matrix(rho)
    x = np.einsum("kij,ji->k", SIGMA_A, m).real
    y = np.einsum("kij,ji->k", SIGMA_B, m).real
    T = np.einsum("abij,ji->ab", PAULI_PAIRS, m).real
    return BlochForm(x, y, T)


def bloch_matrix(b: BlochForm) -> np.ndarray:
    """Assemble the matrix of a Bloch form without validating it."""
    m = np.eye(4, dtype=complex)
    m += np.einsum("k,kij->ij", b.x, SIGMA_A)
    m += np.einsum("k,kij->ij", b.y, SIGMA_B)
    m += np.einsum("ab,abij->ij", b.T, PAULI_PAIRS)
    return m / 4


def from_bloch(b: BlochForm) -> DensityMatrix:
    return validate_density(bloch_matrix(b))


def partial_transpose(rho: StateLike) -> np.ndarray:
    """Transpose on the second qubit. Works on stacks of 4x4 matrices too."""
    m = as_matrix(rho)
    lead = m.shape[:-2]
    return m.reshape(lead + (2, 2, 2, 2)).swapaxes(-1, -3).reshape(lead + (4, 4))


def is_ppt(rho: StateLike, tol: float = STATE_TOL) -> bool:
    return bool(np.linalg.eigvalsh(partial_transpose(rho))[0] >= -tol)


def _entropy_terms(w: np.ndarray) -> float:
    w = w[w > SUPPORT_TOL]
    return float(-np.sum(w * np.log2(w)))


def von_neumann_entropy(rho: StateLike) -> float:
    m = as_matrix(rho)
    return _entropy_terms(np.linalg.eigvalsh(m))


def reduced_state(rho: StateLike, qubit: int) -> np.ndarray:
    """Reduced density matrix of ``qubit`` (1 or 2)."""
    r = as_matrix(rho).reshape(2, 2, 2, 2)
    if qubit == 1:
        return np.einsum("ijkj->ik", r)
    if qubit == 2:
        return np.einsum("ijil->jl", r)
    raise ValueError("qubit must be 1 or 2")


def support_log(m: np.ndarray, base: float = np.e) -> np.ndarray:
    """Matrix logarithm restricted to the support (0 on the kernel)."""
    w, v = np.linalg.eigh(m)
    lw = np.zeros_like(w)
    keep = w > SUPPORT_TOL
    lw[keep] = np.log(w[keep]) / np.log(base)
    return (v * lw) @ v.conj().T


def relative_entropy(rho: StateLike, sigma: StateLike) -> float:
    """S(rho||sigma) in bits; ``inf`` when supp(rho) is not inside supp(sigma)."""
    r, s = as_matrix(rho), as_matrix(sigma)
    mu, v = np.linalg.eigh(s)
    weights = np.einsum("ji,jk,ki->i", v.conj(), r, v).real
    kernel = mu <= SUPPORT_TOL
    if np.sum(weights[kernel]) > SUPPORT_TOL:
        return float("inf")
    cross = float(np.sum(weights[~kernel] * np.log2(mu[~kernel])))
    value = -von_neumann_entropy(r) - cross
    # round-off may leave tiny negatives
    return max(value, 0.0) if value > -1e-12 else value


# --- named states -----------------------------------------------------------

KET = {label: np.eye(4, dtype=complex)[i] for i, label in enumerate(("00", "01", "10", "11"))}
PSI_MINUS = (KET["01"] - KET["10"]) / np.sqrt(2)
PSI_PLUS = (KET["01"] + KET["10"]) / np.sqrt(2)
PHI_MINUS = (KET["00"] - KET["11"]) / np.sqrt(2)
PHI_PLUS = (KET["00"] + KET["11"]) / np.sqrt(2)
#: Bell kets beta_1..beta_4 as columns, ordered psi-, psi+, phi-, phi+
BELL_BASIS = np.column_stack([PSI_MINUS, PSI_PLUS, PHI_MINUS, PHI_PLUS])


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def psi_alpha(alpha: float) -> np.ndarray:
    return PureState.psi_alpha(alpha).vector


def gen_horodecki(alpha: float, p: float) -> DensityMatrix:
    """p|psi_alpha><psi_alpha| + (1-p)|00><00| (amplitude-damped state)."""
    m = p * projector(psi_alpha(alpha))
    m[0, 0] += 1.0 - p
    return DensityMatrix(m)


def horodecki(p: float) -> DensityMatrix:
    return gen_horodecki(0.5, p)


def bell_diagonal(lams) -> DensityMatrix:
    """sum_i lam_i |beta_i><beta_i| with the psi-, psi+, phi-, phi+ ordering."""
    lams = np.asarray(lams, dtype=float)
    return DensityMatrix((BELL_BASIS * lams) @ BELL_BASIS.conj().T)


def rho_d2(p: float) -> DensityMatrix:
    """p|psi+><psi+| + (1-p)|psi-><psi-|."""
    return bell_diagonal([1.0 - p, p, 0.0, 0.0])


# --- sampling ---------------------------------------------------------------

RANK_WEIGHTS = {1: 0.1, 2: 0.3, 3: 0.2, 4: 0.4}


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_state(seed, rank: int) -> DensityMatrix:
    """Rank-``rank`` Hilbert-Schmidt-style sample G G^dag / Tr(G G^dag)."""
    if rank not in (1, 2, 3, 4):
        raise ValueError("rank must be 1..4")
    rng = _rng(seed)
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.trace(m).real)


def sample_mixture(seed) -> tuple[int, DensityMatrix]:
    """Draw a rank by :data:`RANK_WEIGHTS`, then a state of that rank."""
    rng = _rng(seed)
    ranks = list(RANK_WEIGHTS)
    rank = int(rng.choice(ranks, p=[RANK_WEIGHTS[r] for r in ranks]))
    return rank, sample_state(rng, rank)


# --- JSON state files -------------------------------------------------------

def state_to_json(rho: StateLike) -> dict:
    m = as_matrix(rho)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def state_from_json(obj: dict) -> DensityMatrix:
    try:
        m = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj.get("im", 0.0), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError("state JSON needs 're' and 'im' 4x4 arrays") from exc
    return validate_density(m)


def load_state(path: Union[str, Path]) -> DensityMatrix:
    with open(path) as fh:
        return state_from_json(json.load(fh))


def save_state(rho: StateLike, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_json(rho), fh)
