"""Finite-torus models of Dirichlet groups.

A model is a torus ``T^P`` with basis reals ``b_1..b_P`` and an integer Bohr
matrix ``R``.  Points are angle vectors; the character of ``lambda_n`` is
``z -> exp(i <R_n, theta>)`` and the flow is ``beta(t) = (-t b_j)_j`` in angles,
so that ``h_{lambda_n}(beta(t)) = exp(-i lambda_n t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _accel
from .errors import InvalidExponent, InvalidModel, InvalidParameter, ModelMismatch
from .frequency import BasisDecomposition, ordinary_decomposition
from .quad import panel_quad

__all__ = [
    "GroupModel",
    "CharacterPoint",
    "NormEstimate",
    "build_model",
    "model_for",
    "ordinary_model",
    "haar_sample",
    "haar_points",
    "split_seeds",
    "evaluate",
    "evaluate_flow",
    "besicovitch_mean",
    "besicovitch_error_bound",
    "lp_norm",
    "parseval_norm",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class GroupModel:
    basis: np.ndarray
    matrix: np.ndarray
    decomposition: BasisDecomposition | None = None
    notes: tuple[str, ...] = ()
    covered: np.ndarray | None = None

    @property
    def P(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def rows(self, indices) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size and (idx.min() < 1 or idx.max() > self.size):
            raise ModelMismatch(f"model covers indices 1..{self.size}, got {int(idx.min())}..{int(idx.max())}")
        if self.covered is not None and idx.size and not self.covered[idx - 1].all():
            bad = int(idx[~self.covered[idx - 1]][0])
            raise ModelMismatch(f"index {bad} uses basis columns beyond the truncated model")
        return self.matrix[idx - 1]

    def lambdas(self, indices) -> np.ndarray:
        return self.rows(indices) @ self.basis

    def flow(self, t) -> np.ndarray:
        """Angles of ``beta(t)``, one row per ``t``, reduced to ``[0, 2pi)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.mod(-np.outer(t, self.basis), TWO_PI)

    def characters(self, indices, angles) -> np.ndarray:
        """``h_{lambda_n}`` at every angle row; shape ``(points, len(indices))``."""
        R = self.rows(indices).astype(float)
        return np.exp(1j * (np.atleast_2d(angles) @ R.T))

    def identity(self) -> "CharacterPoint":
        return CharacterPoint(self, np.zeros(self.P))

    def point(self, angles) -> "CharacterPoint":
        return CharacterPoint(self, angles)


@dataclass(frozen=True, eq=False)
class CharacterPoint:
    model: GroupModel
    angles: np.ndarray

    def __post_init__(self):
        a = np.mod(np.asarray(self.angles, dtype=float).ravel(), TWO_PI)
        if a.shape != (self.model.P,):
            raise ModelMismatch(f"point needs {self.model.P} angles, got {a.shape[0]}")
        object.__setattr__(self, "angles", a)

    def value(self, n: int) -> complex:
        return complex(self.model.characters([n], self.angles)[0, 0])


def build_model(decomp: BasisDecomposition, columns: int | None = None) -> GroupModel:
    """Torus model of a decomposition, optionally truncated to its first ``columns`` basis elements.

    Rows using a dropped column make the model raise ModelMismatch when addressed.
    """
    if decomp.P == 0:
        raise InvalidModel("empty basis")
    basis = np.asarray(decomp.basis, dtype=float)
    R = np.asarray(decomp.matrix, dtype=np.int64)
    covered = None
    if columns is not None and columns < decomp.P:
        if columns < 1:
            raise InvalidModel("need at least one column")
        covered = ~np.any(R[:, columns:] != 0, axis=1)
        basis, R = basis[:columns], R[:, :columns]
    return GroupModel(basis, R, decomp, tuple(decomp.notes), covered)


def model_for(D) -> GroupModel:
    """Model covering a polynomial: the frequency's default decomposition cut at the largest column used."""
    N = max(D.max_index, 1)
    dec = D.freq.default_decomposition(N)
    used = dec.matrix[D.indices - 1] if len(D) else np.zeros((0, dec.P), dtype=np.int64)
    nz = np.nonzero(np.any(used != 0, axis=0))[0]
    cols = int(nz[-1]) + 1 if len(nz) else 1
    model = build_model(dec, cols) if dec.P else None
    if model is None:
        raise InvalidModel("frequency has no positive entries to build a basis from")
    return model


def ordinary_model(N: int) -> GroupModel:
    """Model of ``(log n)_{n<=N}`` over the log-primes up to N."""
    return build_model(ordinary_decomposition(N))


# --------------------------------------------------------------------------- sampling


def split_seeds(master, k: int) -> list[np.random.SeedSequence]:
    """Independent child seeds for ``k`` tasks; the same master always yields the same children."""
    ss = master if isinstance(master, np.random.SeedSequence) else np.random.SeedSequence(master)
    return ss.spawn(k)


def haar_sample(model: GroupModel, count: int, seed) -> np.ndarray:
    """``count`` i.i.d. uniform angle vectors, shape ``(count, P)``."""
    if count < 1:
        raise InvalidParameter("count must be at least 1")
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, TWO_PI, size=(count, model.P))


def haar_points(model: GroupModel, count: int, seed) -> list[CharacterPoint]:
    return [CharacterPoint(model, a) for a in haar_sample(model, count, seed)]


# --------------------------------------------------------------------------- evaluation


def _twisted(D, model: GroupModel, omega: CharacterPoint | None) -> np.ndarray:
    c = D.coeffs
    if omega is not None:
        if omega.model is not model:
            raise ModelMismatch("point belongs to a different model")
        c = c * model.characters(D.indices, omega.angles)[0]
    return c


def evaluate(D, model: GroupModel, angles) -> np.ndarray:
    """``f(z) = sum a_n h_{lambda_n}(z)`` at each angle row."""
    return _accel.torus_eval(np.atleast_2d(angles), model.rows(D.indices), D.coeffs)


def evaluate_flow(D, model: GroupModel, t, omega: CharacterPoint | None = None) -> np.ndarray:
    """``f(omega beta(t))`` by direct summation ``sum a_n h_n(omega) e^{-i lambda_n t}``."""
    c = _twisted(D, model, omega)
    lam = model.lambdas(D.indices)
    return _accel.flow_eval(np.atleast_1d(np.asarray(t, dtype=float)), lam, c)


def besicovitch_mean(D, model: GroupModel, omega: CharacterPoint | None, T: float) -> complex:
    """``(1/2T) int_{-T}^{T} f(omega beta(t)) dt`` in closed form."""
    if T <= 0:
        raise InvalidParameter("T must be positive")
    c = _twisted(D, model, omega)
    lam = model.lambdas(D.indices)
    return complex(np.sum(c * np.sinc(lam * T / math.pi)))


def besicovitch_error_bound(D, model: GroupModel, T: float) -> float:
    lam = model.lambdas(D.indices)
    pos = lam > 0
    return float(np.sum(np.abs(D.coeffs[pos]) / (lam[pos] * T)))


# --------------------------------------------------------------------------- norms


class NormEstimate(NamedTuple):
    value: float
    stderr: float
    method: str
    p: float
    budget: dict
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = self._asdict()
        d["p"] = "inf" if math.isinf(self.p) else self.p
        d["notes"] = list(self.notes)
        return d


def parseval_norm(D) -> float:
    return float(np.sqrt(np.sum(np.abs(D.coeffs) ** 2)))


def _haar_moment(D, model, p, samples, seed, chunk=20000):
    rng = np.random.default_rng(seed)
    R = model.rows(D.indices)
    total = total2 = 0.0
    vmax = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        theta = rng.uniform(0.0, TWO_PI, size=(m, model.P))
        a = np.abs(_accel.torus_eval(theta, R, D.coeffs))
        if math.isinf(p):
            vmax = max(vmax, float(a.max()))
        else:
            v = a**p
            total += float(v.sum())
            total2 += float((v * v).sum())
        done += m
    return total / samples, total2 / samples, vmax


def _merge_power(rows: np.ndarray, coeffs: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Spectrum of ``f^m`` as (integer rows, coefficients), merging equal rows exactly."""
    cur = {tuple([0] * rows.shape[1]): 1.0 + 0j}
    for _ in range(m):
        nxt: dict[tuple, complex] = {}
        for key, c in cur.items():
            base = np.array(key)
            for r, a in zip(rows, coeffs):
                k = tuple((base + r).tolist())
                nxt[k] = nxt.get(k, 0j) + c * a
        cur = nxt
    keys = np.array(list(cur.keys()), dtype=np.int64).reshape(len(cur), rows.shape[1])
    return keys, np.array(list(cur.values()), dtype=complex)


def _flow_even(D, model, c, p, T):
    """``(1/2T) int |f|^p`` along the flow for even ``p``: ``|g|^2`` with ``g = f^{p/2}`` in closed form."""
    rows, g = _merge_power(model.rows(D.indices), c, int(p) // 2)
    mu = rows @ model.basis
    diff = mu[:, None] - mu[None, :]
    val = float(np.real(np.sum(np.outer(g, g.conj()) * np.sinc(diff * T / math.pi))))
    return max(val, 0.0)


def _flow_quadrature(D, model, c, p, T, step, order=16):
    lam = model.lambdas(D.indices)

    def integrand(t):
        return np.abs(np.exp(-1j * np.outer(t, lam)) @ c) ** p

    edges = np.linspace(-T, T, max(2, int(math.ceil(2 * T / step))) + 1)
    total = err = 0.0
    chunk = max(1, 200_000 // (order * max(1, len(lam))))
    for lo in range(0, len(edges) - 1, chunk):
        v, e = panel_quad(integrand, edges[lo : lo + chunk + 1], order)
        total += float(np.real(v))
        err += e
    return total / (2 * T), err / (2 * T)


def lp_norm(D, model: GroupModel, p: float, method: str = "haar-mc", *, samples: int = 100_000,
            T: float = 1e4, step: float | None = None, seed=0, omega: CharacterPoint | None = None,
            flow_points: int = 100_000) -> NormEstimate:
    """Estimate ``||f||_p`` on the group.

    haar-mc: Monte Carlo over ``samples`` Haar points; ``stderr`` is the delta-method error bar.
    flow-average: ``(1/2T) int_{-T}^{T} |f(omega beta(t))|^p dt``; closed form for even integer
    ``p``, composite Gauss-Legendre panels of width ``step`` otherwise (``stderr`` then holds the
    quadrature error estimate).  ``p = inf``: maximum over Haar samples and a flow grid of
    ``flow_points`` points on ``[0, T]``, a lower estimate.
    """
    p = float(p)
    if not p >= 1:
        raise InvalidExponent(f"p must be >= 1, got {p}")
    if len(D) == 0:
        return NormEstimate(0.0, 0.0, method, p, {})
    if math.isinf(p):
        _, _, vmax = _haar_moment(D, model, p, samples, seed)
        t = np.linspace(0.0, T, flow_points)
        fmax = float(np.abs(evaluate_flow(D, model, t, omega)).max())
        return NormEstimate(max(vmax, fmax), 0.0, "sup-sampling", p, {"samples": samples, "flow_points": flow_points, "T": T},
                            ("lower estimate of the supremum",))
    if method == "haar-mc":
        m1, m2, _ = _haar_moment(D, model, p, samples, seed)
        val = m1 ** (1 / p)
        se_m = math.sqrt(max(m2 - m1 * m1, 0.0) / samples)
        se = val / (p * m1) * se_m if m1 > 0 else 0.0
        return NormEstimate(val, se, method, p, {"samples": samples, "seed": _seed_repr(seed)})
    if method == "flow-average":
        c = _twisted(D, model, omega)
        if p == int(p) and int(p) % 2 == 0:
            return NormEstimate(_flow_even(D, model, c, p, T) ** (1 / p), 0.0, method, p, {"T": T},
                                ("closed form",))
        lam_max = float(np.max(np.abs(model.lambdas(D.indices))))
        h = step if step is not None else math.pi / (4 * lam_max + 4)
        m, err = _flow_quadrature(D, model, c, p, T, h)
        val = m ** (1 / p)
        return NormEstimate(val, val / (p * m) * err if m > 0 else err, method, p, {"T": T, "step": h})
    raise InvalidParameter(f"unknown method {method!r}")


def _seed_repr(seed):
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": seed.entropy, "spawn_key": list(seed.spawn_key)}
    return seed
