"""Hot inner loops: numba-compiled kernels with pure-numpy fallbacks.

Set ``DLAB_DISABLE_NUMBA=1`` (before import) to force the numpy path.  Both
implementations are importable as ``<name>_numba`` / ``<name>_numpy`` so tests
and the benchmark can compare them directly; the unsuffixed name is the
dispatched one.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("DLAB_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap if not (len(args) == 1 and callable(args[0])) else args[0]


USING_NUMBA = HAVE_NUMBA and not _DISABLED

# rows per numpy chunk; bounds the (chunk x n_terms) temporaries
_CHUNK = 4096


# --------------------------------------------------------------- weighted prefix sup


def weighted_prefix_sup_numpy(terms: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``max_N |sum_{n<=N} terms[s, n]| * weights[N]`` for every row ``s``."""
    terms = np.atleast_2d(terms)
    out = np.empty(terms.shape[0])
    for lo in range(0, terms.shape[0], _CHUNK):
        blk = np.abs(np.cumsum(terms[lo : lo + _CHUNK], axis=1)) * weights
        out[lo : lo + _CHUNK] = blk.max(axis=1) if blk.shape[1] else 0.0
    return out


@njit(cache=True)
def _weighted_prefix_sup_nb(terms, weights):
    S, n = terms.shape
    out = np.zeros(S)
    for s in range(S):
        acc = 0j
        best = 0.0
        for k in range(n):
            acc += terms[s, k]
            v = abs(acc) * weights[k]
            if v > best:
                best = v
        out[s] = best
    return out


def weighted_prefix_sup_numba(terms, weights):
    return _weighted_prefix_sup_nb(np.ascontiguousarray(np.atleast_2d(terms), dtype=np.complex128),
                                   np.ascontiguousarray(weights, dtype=np.float64))


# --------------------------------------------------------------- torus polynomials


def torus_eval_numpy(theta: np.ndarray, R: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """``f(z) = sum_n coeffs[n] exp(i <R[n], theta[s]>)`` at every angle row ``theta[s]``."""
    theta = np.atleast_2d(theta)
    out = np.empty(theta.shape[0], dtype=complex)
    Rf = R.astype(float)
    for lo in range(0, theta.shape[0], _CHUNK):
        out[lo : lo + _CHUNK] = np.exp(1j * (theta[lo : lo + _CHUNK] @ Rf.T)) @ coeffs
    return out


@njit(cache=True)
def _torus_eval_nb(theta, R, coeffs):
    S, P = theta.shape
    n = R.shape[0]
    out = np.zeros(S, dtype=np.complex128)
    for s in range(S):
        acc = 0j
        for k in range(n):
            ph = 0.0
            for j in range(P):
                ph += R[k, j] * theta[s, j]
            acc += coeffs[k] * np.exp(1j * ph)
        out[s] = acc
    return out


def torus_eval_numba(theta, R, coeffs):
    return _torus_eval_nb(np.ascontiguousarray(np.atleast_2d(theta), dtype=np.float64),
                          np.ascontiguousarray(R, dtype=np.int64),
                          np.ascontiguousarray(coeffs, dtype=np.complex128))


def torus_prefix_sup_numpy(theta, R, coeffs, weights):
    """Weighted prefix sup of the terms ``coeffs[n] exp(i <R[n], theta[s]>)`` in row order."""
    theta = np.atleast_2d(theta)
    out = np.empty(theta.shape[0])
    Rf = R.astype(float)
    for lo in range(0, theta.shape[0], _CHUNK):
        terms = np.exp(1j * (theta[lo : lo + _CHUNK] @ Rf.T)) * coeffs
        out[lo : lo + _CHUNK] = weighted_prefix_sup_numpy(terms, weights)
    return out


@njit(cache=True)
def _torus_prefix_sup_nb(theta, R, coeffs, weights):
    S, P = theta.shape
    n = R.shape[0]
    out = np.zeros(S)
    for s in range(S):
        acc = 0j
        best = 0.0
        for k in range(n):
            ph = 0.0
            for j in range(P):
                ph += R[k, j] * theta[s, j]
            acc += coeffs[k] * np.exp(1j * ph)
            v = abs(acc) * weights[k]
            if v > best:
                best = v
        out[s] = best
    return out


def torus_prefix_sup_numba(theta, R, coeffs, weights):
    return _torus_prefix_sup_nb(np.ascontiguousarray(np.atleast_2d(theta), dtype=np.float64),
                                np.ascontiguousarray(R, dtype=np.int64),
                                np.ascontiguousarray(coeffs, dtype=np.complex128),
                                np.ascontiguousarray(weights, dtype=np.float64))


# --------------------------------------------------------------- flow partial sums


def flow_prefix_max_numpy(t: np.ndarray, lam: np.ndarray, coeffs: np.ndarray, checkpoints: np.ndarray) -> np.ndarray:
    """``max_t |sum_{n<=N} coeffs[n] exp(-i t lam[n])|`` for each ``N`` in ``checkpoints`` (1-based counts)."""
    out = np.zeros(len(checkpoints))
    tblock, nblock = 256, 4096
    for lo in range(0, len(t), tblock):
        tt = t[lo : lo + tblock]
        acc = np.zeros(len(tt), dtype=complex)
        prev = 0
        for i, N in enumerate(checkpoints):
            for a in range(prev, N, nblock):
                b = min(N, a + nblock)
                acc += np.exp(-1j * np.outer(tt, lam[a:b])) @ coeffs[a:b]
            prev = N
            out[i] = max(out[i], np.abs(acc).max())
    return out


@njit(cache=True)
def _flow_prefix_max_nb(t, lam, coeffs, checkpoints):
    out = np.zeros(len(checkpoints))
    for s in range(len(t)):
        acc = 0j
        c = 0
        for k in range(checkpoints[-1]):
            acc += coeffs[k] * np.exp(-1j * t[s] * lam[k])
            if k + 1 == checkpoints[c]:
                v = abs(acc)
                if v > out[c]:
                    out[c] = v
                c += 1
    return out


def flow_prefix_max_numba(t, lam, coeffs, checkpoints):
    return _flow_prefix_max_nb(np.ascontiguousarray(t, dtype=np.float64),
                               np.ascontiguousarray(lam, dtype=np.float64),
                               np.ascontiguousarray(coeffs, dtype=np.complex128),
                               np.ascontiguousarray(checkpoints, dtype=np.int64))


def flow_eval_numpy(t: np.ndarray, lam: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """``sum_n coeffs[n] exp(-i t lam[n])`` at every ``t``."""
    out = np.empty(len(t), dtype=complex)
    tblock = max(1, (1 << 21) // max(1, len(lam)))
    for lo in range(0, len(t), tblock):
        out[lo : lo + tblock] = np.exp(-1j * np.outer(t[lo : lo + tblock], lam)) @ coeffs
    return out


@njit(cache=True)
def _flow_eval_nb(t, lam, coeffs):
    out = np.zeros(len(t), dtype=np.complex128)
    for s in range(len(t)):
        acc = 0j
        for k in range(len(lam)):
            acc += coeffs[k] * np.exp(-1j * t[s] * lam[k])
        out[s] = acc
    return out


def flow_eval_numba(t, lam, coeffs):
    return _flow_eval_nb(np.ascontiguousarray(t, dtype=np.float64),
                         np.ascontiguousarray(lam, dtype=np.float64),
                         np.ascontiguousarray(coeffs, dtype=np.complex128))


def grid_prefix_max_numpy(t0: float, h: float, S: int, lam: np.ndarray, coeffs: np.ndarray, checkpoints: np.ndarray):
    """``flow_prefix_max`` on the uniform grid ``t0 + h*s`` (``s < S``), also returning ``|S_N(t)|`` at the last checkpoint."""
    t = t0 + h * np.arange(S)
    best = flow_prefix_max_numpy(t, lam, coeffs, checkpoints)
    N = checkpoints[-1]
    return best, np.abs(flow_eval_numpy(t, lam[:N], coeffs[:N]))


@njit(cache=True)
def _grid_prefix_max_nb(t0, h, S, lam, coeffs, checkpoints):
    acc = np.zeros(S, dtype=np.complex128)
    best = np.zeros(len(checkpoints))
    c = 0
    for k in range(checkpoints[-1]):
        w = np.exp(-1j * h * lam[k])
        z = 0j
        for s in range(S):
            # re-anchor the rotation with an exact exponential every 256 steps
            if s % 256 == 0:
                z = coeffs[k] * np.exp(-1j * (t0 + h * s) * lam[k])
            acc[s] += z
            z *= w
        if k + 1 == checkpoints[c]:
            m = 0.0
            for s in range(S):
                v = abs(acc[s])
                if v > m:
                    m = v
            best[c] = m
            c += 1
    return best, np.abs(acc)


def grid_prefix_max_numba(t0, h, S, lam, coeffs, checkpoints):
    return _grid_prefix_max_nb(float(t0), float(h), int(S), np.ascontiguousarray(lam, dtype=np.float64),
                               np.ascontiguousarray(coeffs, dtype=np.complex128),
                               np.ascontiguousarray(checkpoints, dtype=np.int64))


# --------------------------------------------------------------- multiplicative characters


def multiplicative_angles_numpy(prime_angles: np.ndarray, spf: np.ndarray, prime_col: np.ndarray) -> np.ndarray:
    """Angles of a completely multiplicative character on ``1..N``.

    ``prime_angles[c, j]`` is the angle at the j-th prime for character ``c``;
    ``spf`` the smallest-prime-factor table (length N+1) and ``prime_col[p]`` the
    column of prime ``p``.  Returns an array ``(C, N)`` with column ``n-1`` the
    angle of ``chi(n)``; ``chi(n) = chi(spf(n)) chi(n / spf(n))``.
    """
    N = len(spf) - 1
    C = prime_angles.shape[0]
    out = np.zeros((C, N))
    n = np.arange(2, N + 1)
    p = spf[2:]
    # Omega(n) levels: n / spf(n) has one prime factor fewer, so fill level by level
    omega = np.zeros(N + 1, dtype=np.int64)
    for i in range(2, N + 1):
        omega[i] = omega[i // spf[i]] + 1
    for level in range(1, int(omega.max(initial=0)) + 1):
        sel = omega[2:] == level
        nn, pp = n[sel], p[sel]
        out[:, nn - 1] = out[:, nn // pp - 1] + prime_angles[:, prime_col[pp]]
    return out


@njit(cache=True)
def _multiplicative_angles_nb(prime_angles, spf, prime_col):
    N = len(spf) - 1
    C = prime_angles.shape[0]
    out = np.zeros((C, N))
    for c in range(C):
        for m in range(2, N + 1):
            p = spf[m]
            out[c, m - 1] = out[c, m // p - 1] + prime_angles[c, prime_col[p]]
    return out


def multiplicative_angles_numba(prime_angles, spf, prime_col):
    return _multiplicative_angles_nb(np.ascontiguousarray(prime_angles, dtype=np.float64),
                                     np.ascontiguousarray(spf, dtype=np.int64),
                                     np.ascontiguousarray(prime_col, dtype=np.int64))


if USING_NUMBA:
    weighted_prefix_sup = weighted_prefix_sup_numba
    torus_eval = torus_eval_numba
    torus_prefix_sup = torus_prefix_sup_numba
    flow_prefix_max = flow_prefix_max_numba
    flow_eval = flow_eval_numba
    grid_prefix_max = grid_prefix_max_numba
    multiplicative_angles = multiplicative_angles_numba
else:
    weighted_prefix_sup = weighted_prefix_sup_numpy
    torus_eval = torus_eval_numpy
    torus_prefix_sup = torus_prefix_sup_numpy
    flow_prefix_max = flow_prefix_max_numpy
    flow_eval = flow_eval_numpy
    grid_prefix_max = grid_prefix_max_numpy
    multiplicative_angles = multiplicative_angles_numpy

BACKEND = "numba" if USING_NUMBA else "numpy"
