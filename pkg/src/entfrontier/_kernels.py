"""Objective and gradient of S(rho||sigma) over mixtures of product states.

sigma(x) = sum_k w_k |a_k><a_k| (x) |b_k><b_k| with w = s^2 / |s|^2 and
a_k, b_k the normalized local vectors.  ``x`` packs s (K reals), then the
real/imaginary parts of the K first-qubit vectors, then the second-qubit
vectors.  The objective is -Tr(rho log2 sigma); the entropy of rho is a
constant and is added by the caller.
"""

import math

import numba
import numpy as np

LN2 = math.log(2.0)


@numba.njit(cache=True)
def _local_vectors(x, start, K):
    vec = np.empty((K, 2), np.complex128)
    norm = np.empty(K)
    for k in range(K):
        o = start + 4 * k
        c0 = x[o] + 1j * x[o + 1]
        c1 = x[o + 2] + 1j * x[o + 3]
        n = math.sqrt(x[o] ** 2 + x[o + 1] ** 2 + x[o + 2] ** 2 + x[o + 3] ** 2)
        norm[k] = n
        vec[k, 0] = c0 / n
        vec[k, 1] = c1 / n
    return vec, norm


@numba.njit(cache=True)
def objective(x, rho, K, floor):
    """Value and gradient; eigenvalues of sigma are floored at ``floor``."""
    s = x[:K]
    ss = 0.0
    for k in range(K):
        ss += s[k] * s[k]
    w = s * s / ss
    a, nu = _local_vectors(x, K, K)
    b, nv = _local_vectors(x, 5 * K, K)

    prod = np.empty((K, 4), np.complex128)
    for k in range(K):
        for i in range(2):
            for j in range(2):
                prod[k, 2 * i + j] = a[k, i] * b[k, j]
    sigma = np.zeros((4, 4), np.complex128)
    for k in range(K):
        for i in range(4):
            for j in range(4):
                sigma[i, j] += w[k] * prod[k, i] * np.conj(prod[k, j])

    lam, q = np.linalg.eigh(sigma)
    for i in range(4):
        lam[i] = max(lam[i], floor)
    r = q.conj().T @ rho @ q
    log_lam = np.log(lam)
    f = 0.0
    for i in range(4):
        f -= r[i, i].real * log_lam[i]
    f /= LN2

    # derivative of log at sigma through first divided differences
    m = np.empty((4, 4), np.complex128)
    for i in range(4):
        for j in range(4):
            d = lam[i] - lam[j]
            if abs(d) <= 1e-10 * max(lam[i], lam[j]):
                m[i, j] = r[i, j] / lam[i]
            else:
                m[i, j] = r[i, j] * (log_lam[i] - log_lam[j]) / d
    G = (q @ m @ q.conj().T) * (-1.0 / LN2)

    grad = np.empty(9 * K)
    g_w = np.empty(K)
    ga = np.empty((K, 2), np.complex128)
    gb = np.empty((K, 2), np.complex128)
    for k in range(K):
        gp = G @ prod[k]
        for i in range(2):
            ga[k, i] = gp[2 * i] * np.conj(b[k, 0]) + gp[2 * i + 1] * np.conj(b[k, 1])
            gb[k, i] = gp[i] * np.conj(a[k, 0]) + gp[2 + i] * np.conj(a[k, 1])
        g_w[k] = (np.conj(a[k, 0]) * ga[k, 0] + np.conj(a[k, 1]) * ga[k, 1]).real
    mean = 0.0
    for k in range(K):
        mean += w[k] * g_w[k]
    for k in range(K):
        grad[k] = 2.0 * s[k] / ss * (g_w[k] - mean)
        cu = 2.0 * w[k] / nu[k]
        cv = 2.0 * w[k] / nv[k]
        for i in range(2):
            hu = (ga[k, i] - g_w[k] * a[k, i]) * cu
            hv = (gb[k, i] - g_w[k] * b[k, i]) * cv
            grad[K + 4 * k + 2 * i] = hu.real
            grad[K + 4 * k + 2 * i + 1] = hu.imag
            grad[5 * K + 4 * k + 2 * i] = hv.real
            grad[5 * K + 4 * k + 2 * i + 1] = hv.imag
    return f, grad


def reference_objective(x, rho, K, floor):
    """Vectorized numpy version of :func:`objective`, kept as a cross-check."""
    s = x[:K]
    uv = x[K:].reshape(2, K, 2, 2)
    u = uv[0, :, :, 0] + 1j * uv[0, :, :, 1]
    v = uv[1, :, :, 0] + 1j * uv[1, :, :, 1]
    ss = s @ s
    w = s * s / ss
    nu = np.linalg.norm(u, axis=1)[:, None]
    nv = np.linalg.norm(v, axis=1)[:, None]
    a, b = u / nu, v / nv
    prod = (a[:, :, None] * b[:, None, :]).reshape(K, 4)
    sigma = (prod.T * w) @ prod.conj()

    lam, q = np.linalg.eigh(sigma)
    lam = np.maximum(lam, floor)
    r = q.conj().T @ rho @ q
    log_lam = np.log(lam)
    f = -float(r.diagonal().real @ log_lam) / LN2

    dl = lam[:, None] - lam[None, :]
    close = np.abs(dl) <= 1e-10 * np.maximum(lam[:, None], lam[None, :])
    kernel = np.where(close, 1.0 / lam[:, None], (log_lam[:, None] - log_lam[None, :]) / np.where(close, 1.0, dl))
    G = (q @ (kernel * r) @ q.conj().T) * (-1.0 / LN2)

    # column k of gp is G|a_k b_k>; partial contractions give the local gradients
    gp = (G @ prod.T).T.reshape(K, 2, 2)
    ga = (gp * b.conj()[:, None, :]).sum(2)
    gb = (gp * a.conj()[:, :, None]).sum(1)
    g_w = (a.conj() * ga).sum(1).real
    g_s = 2.0 * s / ss * (g_w - w @ g_w)
    hu = (ga - g_w[:, None] * a) * (2.0 * w[:, None] / nu)
    hv = (gb - g_w[:, None] * b) * (2.0 * w[:, None] / nv)
    grad = np.concatenate([
        g_s,
        np.stack([hu.real, hu.imag], -1).ravel(),
        np.stack([hv.real, hv.imag], -1).ravel(),
    ])
    return f, grad
