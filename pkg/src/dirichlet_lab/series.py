"""Dirichlet polynomials ``sum a_n exp(-lambda_n s)`` and the operations on them.

A polynomial stores sorted 1-based frequency indices and complex
coefficients; ``lambda_n`` comes from its Frequency.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _accel
from .errors import InvalidAbscissa, InvalidParameter, ModelMismatch, UndefinedAbscissa
from .frequency import BasisDecomposition, Frequency, parse_frequency

__all__ = [
    "DirichletPolynomial",
    "partial_sum",
    "translate",
    "vertical_limit",
    "riesz_mean",
    "AbelCheck",
    "abel_majorant",
    "abel_constant",
    "abel_extremal_instance",
    "abel_sharp_constant",
    "AbscissaEstimate",
    "sup_on_line",
    "sigma_u_estimate",
    "abschnitt",
]


@dataclass(frozen=True)
class DirichletPolynomial:
    freq: Frequency
    indices: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if idx.shape != c.shape:
            raise InvalidParameter("indices and coefficients differ in length")
        if len(idx) and idx.min() < 1:
            raise InvalidParameter("frequency indices are 1-based")
        order = np.argsort(idx, kind="stable")
        idx, c = idx[order], c[order]
        if len(idx) > 1 and np.any(np.diff(idx) == 0):
            raise InvalidParameter("duplicate frequency index")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_coefficients(cls, freq: Frequency, coeffs: Sequence[complex]) -> "DirichletPolynomial":
        """Dense polynomial with ``a_n = coeffs[n-1]``."""
        return cls(freq, np.arange(1, len(coeffs) + 1), np.asarray(coeffs, dtype=complex))

    @property
    def lambdas(self) -> np.ndarray:
        if not len(self.indices):
            return np.zeros(0)
        return self.freq.values(int(self.indices[-1]))[self.indices - 1]

    @property
    def max_index(self) -> int:
        return int(self.indices[-1]) if len(self.indices) else 0

    def __len__(self):
        return len(self.indices)

    def with_coeffs(self, coeffs) -> "DirichletPolynomial":
        return DirichletPolynomial(self.freq, self.indices, coeffs)

    def select(self, mask) -> "DirichletPolynomial":
        return DirichletPolynomial(self.freq, self.indices[mask], self.coeffs[mask])

    def __call__(self, s):
        """Direct summation of ``sum a_n exp(-lambda_n s)``; ``s`` scalar or array."""
        s = np.asarray(s, dtype=complex)
        return np.exp(-np.multiply.outer(s, self.lambdas)) @ self.coeffs

    def equals(self, other: "DirichletPolynomial") -> bool:
        return (
            self.freq.name == other.freq.name
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def to_json(self) -> str:
        terms = [{"n": int(n), "re": float(a.real), "im": float(a.imag)} for n, a in zip(self.indices, self.coeffs)]
        return json.dumps({"freq": self.freq.name, "terms": terms})

    @classmethod
    def from_json(cls, text: str | dict, freq: Frequency | None = None) -> "DirichletPolynomial":
        data = json.loads(text) if isinstance(text, str) else text
        fr = freq if freq is not None else parse_frequency(data["freq"])
        terms = data["terms"]
        return cls(fr, [t["n"] for t in terms], [complex(t.get("re", 0.0), t.get("im", 0.0)) for t in terms])


def partial_sum(D: DirichletPolynomial, N: int) -> DirichletPolynomial:
    """``S_N D = sum_{n <= N} a_n exp(-lambda_n s)`` (by frequency index)."""
    if N < 0:
        raise InvalidParameter("N must be nonnegative")
    return D.select(D.indices <= N)


def translate(D: DirichletPolynomial, z: complex) -> DirichletPolynomial:
    return D.with_coeffs(D.coeffs * np.exp(-D.lambdas * z))


def vertical_limit(D: DirichletPolynomial, omega) -> DirichletPolynomial:
    """Twist coefficients by the character values ``h_{lambda_n}(omega)``."""
    return D.with_coeffs(D.coeffs * omega.model.characters(D.indices, omega.angles)[0])


def riesz_mean(D: DirichletPolynomial, x: float, k: float) -> DirichletPolynomial:
    """First ``(lambda, k)``-Riesz mean: terms with ``lambda_n < x`` weighted by ``(1 - lambda_n/x)^k``."""
    if x <= 0:
        raise InvalidAbscissa(f"Riesz mean needs x > 0, got {x}")
    if k < 0:
        raise InvalidParameter("k must be nonnegative")
    lam = D.lambdas
    keep = lam < x
    return DirichletPolynomial(D.freq, D.indices[keep], D.coeffs[keep] * (1.0 - lam[keep] / x) ** k)


# --------------------------------------------------------------------------- Abel summation


class AbelCheck(NamedTuple):
    lhs: float
    rhs: float
    constant: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else (0.0 if self.lhs == 0 else math.inf)

    @property
    def holds(self) -> bool:
        return self.lhs <= self.constant * self.rhs * (1 + 1e-12)


def abel_constant(u: float) -> float:
    """``C(u) = 1 + 1/u^2``, the constant read off the Abel-summation bound."""
    return 1.0 + 1.0 / u**2


def abel_sharp_constant(u: float, eps: float) -> float:
    """Best constant over all frequencies with ``lambda_1 >= 0``: ``1 + eps/u``.

    Abel summation bounds the ratio by ``e^{-u l_N} + sum_n (e^{-u l_n} - e^{-u l_{n+1}} e^{-eps g_n})``,
    and ``1 - e^{-(u+eps) g} <= (1 + eps/u)(1 - e^{-u g})`` telescopes it below ``1 + eps/u``;
    equally spaced frequencies with vanishing gap approach it.
    """
    return 1.0 + eps / u


def abel_majorant(a: Sequence[complex], lam: Sequence[float], u: float, eps: float) -> AbelCheck:
    """``|sum a_n e^{-(u+eps) lambda_n}|`` against ``sup_n |e^{-eps lambda_n} sum_{k<=n} a_k|``."""
    if u <= 0 or eps <= 0:
        raise InvalidParameter("u and eps must be positive")
    a = np.asarray(a, dtype=complex)
    lam = np.asarray(lam, dtype=float)[: len(a)]
    lhs = float(abs(np.sum(a * np.exp(-(u + eps) * lam))))
    rhs = float(np.max(np.abs(np.exp(-eps * lam) * np.cumsum(a)))) if len(a) else 0.0
    return AbelCheck(lhs, rhs, abel_constant(u))


def abel_extremal_instance(u: float, eps: float, N: int, gap: float) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients and frequency realising the Abel ratio for ``lambda_n = (n-1) gap``.

    Partial sums are chosen as ``A_n = e^{eps lambda_n}`` so every weighted partial
    sum has modulus one and all Abel terms add with the same sign.
    """
    lam = gap * np.arange(N)
    A = np.exp(eps * lam)
    a = np.diff(np.concatenate(([0.0], A)))
    return a.astype(complex), lam


# --------------------------------------------------------------------------- Bohr-Cahen


class AbscissaEstimate(NamedTuple):
    estimate: float
    checkpoints: list[int]
    ratios: list[float]
    grid_sup: list[float]
    torus_sup: list[float] | None
    notes: list[str]

    def to_dict(self) -> dict:
        d = self._asdict()
        d["estimate"] = _jf(self.estimate)
        d["ratios"] = [_jf(r) for r in self.ratios]
        return d


def _jf(x):
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else ("-inf" if x < 0 else "nan"))


def sup_on_line(lam: np.ndarray, coeffs: np.ndarray, checkpoints: Sequence[int], T_sup: float,
                grid_points: int, refine: int = 3) -> np.ndarray:
    """``sup_t |sum_{n<=N} a_n e^{-i t lambda_n}|`` for each checkpoint N, over ``[-T_sup, T_sup]``.

    A uniform grid on ``[-T_sup, T_sup]`` plus the point ``t = 0`` is scanned; then the
    neighbourhoods of the ``refine`` largest grid values (for the longest prefix) are
    rescanned 64x finer.
    """
    cps = np.asarray(checkpoints, dtype=np.int64)
    half = max(1, grid_points // 2)
    grid = np.linspace(-T_sup, T_sup, 2 * half + 1)
    h = grid[1] - grid[0]
    best, final = _accel.grid_prefix_max(-T_sup, h, len(grid), lam, coeffs, cps)
    # t = 0 by direct summation, so aligned coefficients give their exact sum
    best = np.maximum(best, _accel.flow_prefix_max(np.zeros(1), lam, coeffs, cps))
    if refine:
        top = np.argsort(final)[-refine:]
        fine = np.concatenate([np.linspace(grid[i] - h, grid[i] + h, 129) for i in top])
        best = np.maximum(best, _accel.flow_prefix_max(fine, lam, coeffs, cps))
    # rounding in the rotation recurrence must not push a sup past the triangle bound
    return np.minimum(best, np.cumsum(np.abs(coeffs))[cps - 1])


def sigma_u_estimate(coeffs: Sequence[complex], lam: Sequence[float], N_max: int | None = None, *,
                     T_sup: float = 100.0, grid_points: int = 4001, model=None, torus_samples: int = 0,
                     seed=0) -> AbscissaEstimate:
    """Prefix limsup estimate of ``log(sup_t |sum_{n<=N} a_n e^{-i t lambda_n}|) / lambda_N``.

    Checkpoints are ``N = 2, 4, 8, ..., N_max``; the estimate is the maximum of the
    ratios over the upper half of the checkpoints.  With a GroupModel and
    ``torus_samples > 0`` the sup is also sampled over Haar points of the torus and
    the larger of the two sups is used.
    """
    a = np.asarray(coeffs, dtype=complex)
    lam = np.asarray(lam, dtype=float)
    N_max = len(a) if N_max is None else min(N_max, len(a))
    cps = sorted({2**j for j in range(1, int(math.log2(N_max)) + 1)} | {N_max}) if N_max >= 2 else [N_max]
    cps = [c for c in cps if c >= 1]
    notes: list[str] = []
    grid_sup = sup_on_line(lam, a, cps, T_sup, grid_points)
    sups = grid_sup.copy()
    torus = None
    if model is not None and torus_samples > 0:
        from .group import haar_sample

        theta = haar_sample(model, torus_samples, seed)
        R = model.rows(np.arange(1, N_max + 1))
        torus = np.array([np.abs(_accel.torus_eval(theta, R[:c], a[:c])).max() for c in cps])
        sups = np.maximum(sups, torus)
        notes.append(f"torus sup from {torus_samples} Haar samples")
    ratios = []
    for c, s in zip(cps, sups):
        lN = lam[c - 1]
        if lN == 0:
            ratios.append(math.nan)
            continue
        ratios.append(math.log(s) / lN if s > 0 else -math.inf)
    usable = [(c, r) for c, r in zip(cps, ratios) if not math.isnan(r)]
    if not usable:
        raise UndefinedAbscissa("lambda_N = 0 at every checkpoint")
    # limsup proxy: the largest ratio over the later half of the checkpoints
    tail = [r for _, r in usable[len(usable) // 2 :]]
    est = max(tail)
    nz = np.nonzero(a[:N_max])[0]
    if len(nz) and nz[-1] + 1 < N_max:
        notes.append(f"no growth: coefficients vanish beyond index {nz[-1] + 1}")
    if est == -math.inf:
        notes.append("no growth")
    return AbscissaEstimate(float(est), list(cps), ratios, [float(x) for x in grid_sup],
                            None if torus is None else [float(x) for x in torus], notes)


# --------------------------------------------------------------------------- abschnitte


def abschnitt(D: DirichletPolynomial, decomp: BasisDecomposition, N: int) -> DirichletPolynomial:
    """Keep the terms whose Bohr-matrix row vanishes outside the first ``N`` basis columns."""
    if D.max_index > decomp.size:
        raise ModelMismatch(f"decomposition covers {decomp.size} indices, polynomial needs {D.max_index}")
    rows = decomp.matrix[D.indices - 1]
    keep = ~np.any(rows[:, N:] != 0, axis=1) if N < decomp.P else np.ones(len(D), dtype=bool)
    return D.select(keep)
