"""Maximal operators on torus polynomials and the integer lattice machinery behind them.

Torus polynomials here are pairs ``(alphas, coeffs)``: an integer spectrum
``alphas[m, N]`` and complex coefficients, evaluated at angle rows ``theta``
as ``sum c_m exp(i <alpha_m, theta>)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import _accel
from .errors import InvalidParameter, NotCoprime
from .group import GroupModel, evaluate_flow, lp_norm
from .series import partial_sum

__all__ = [
    "UnimodularPlan",
    "RationalDirection",
    "MaximalEstimate",
    "extended_gcd",
    "bareiss_det",
    "unimodular_plan",
    "rational_direction",
    "carleson_maximal",
    "carleson_maximal_substituted",
    "carleson_norm",
    "smax_u",
    "tmax_weighted",
    "tmax_weights",
    "hl_flow",
    "weak_l1_norm",
    "partial_sum_ratio",
]


# --------------------------------------------------------------------------- exact integer linear algebra


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, s, t)`` with ``a s + b t = g = gcd(a, b) >= 0``."""
    old_r, r, old_s, s, old_t, t = a, b, 1, 0, 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def bareiss_det(M: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant of an integer matrix, in Python integers."""
    A = [[int(v) for v in row] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


@dataclass(frozen=True)
class UnimodularPlan:
    """Integer matrix with first row ``q`` and determinant one, with its exact inverse."""

    q: tuple[int, ...]
    Q: int
    r: tuple[int, int]
    A: tuple[tuple[int, ...], ...]
    Ainv: tuple[tuple[int, ...], ...]

    @property
    def N(self) -> int:
        return len(self.q)

    @property
    def det(self) -> int:
        return bareiss_det(self.A)

    def is_inverse_exact(self) -> bool:
        eye = [[int(i == j) for j in range(self.N)] for i in range(self.N)]
        return _matmul(self.A, self.Ainv) == eye and _matmul(self.Ainv, self.A) == eye

    def apply(self, alphas) -> np.ndarray:
        """Row-wise ``A alpha``."""
        return np.asarray(alphas, dtype=np.int64) @ np.asarray(self.A, dtype=np.int64).T

    def apply_inverse(self, betas) -> np.ndarray:
        return np.asarray(betas, dtype=np.int64) @ np.asarray(self.Ainv, dtype=np.int64).T

    def to_dict(self) -> dict:
        return {"q": list(self.q), "Q": self.Q, "r": list(self.r), "A": [list(r) for r in self.A],
                "Ainv": [list(r) for r in self.Ainv], "det": self.det}


def unimodular_plan(q: Sequence[int], Q: int = 1) -> UnimodularPlan:
    """Build ``A`` with first row ``q``, second row ``(r1, r2, 0, ...)`` where ``q1 r2 - q2 r1 = 1``, identity below.

    ``r`` is normalised to ``0 <= r2 < |q2|`` (or ``0 <= r1 < |q1|`` when ``q2 = 0``).
    The inverse is block-triangular: ``[[M^-1, -M^-1 C], [0, I]]`` with
    ``M = [[q1, q2], [r1, r2]]`` and ``C`` the first two rows of columns ``3..N``.
    """
    q = tuple(int(v) for v in q)
    if Q < 1:
        raise InvalidParameter("Q must be a positive integer")
    N = len(q)
    if N == 0:
        raise InvalidParameter("empty direction")
    if N == 1:
        if abs(q[0]) != 1:
            raise NotCoprime(f"a 1x1 unimodular matrix needs q1 = +-1, got {q[0]}")
        return UnimodularPlan(q, Q, (0, 0), ((q[0],),), ((q[0],),))
    q1, q2 = q[0], q[1]
    g, s, t = extended_gcd(q1, q2)
    if g != 1:
        raise NotCoprime(f"gcd(q1, q2) = {g}; permute coordinates or perturb the direction")
    # q1 s + q2 t = 1  ->  r2 = s, r1 = -t; shift along (q1, q2) to normalise
    r1, r2 = -t, s
    if q2 != 0:
        m = (r2 - r2 % abs(q2)) // q2
    else:
        m = (r1 - r1 % abs(q1)) // q1
    r1, r2 = r1 - m * q1, r2 - m * q2
    assert q1 * r2 - q2 * r1 == 1
    A = [list(q), [r1, r2] + [0] * (N - 2)] + [[int(i == j) for j in range(N)] for i in range(2, N)]
    Minv = [[r2, -q2], [-r1, q1]]
    C = [list(q[2:]), [0] * (N - 2)]
    MC = _matmul(Minv, C) if N > 2 else [[], []]
    Ainv = [Minv[0] + [-v for v in MC[0]], Minv[1] + [-v for v in MC[1]]]
    Ainv += [[int(i == j) for j in range(N)] for i in range(2, N)]
    return UnimodularPlan(q, Q, (r1, r2), tuple(map(tuple, A)), tuple(map(tuple, Ainv)))


class RationalDirection(NamedTuple):
    q: tuple[int, ...]
    Q: int
    perm: tuple[int, ...]

    @property
    def x(self) -> np.ndarray:
        """The approximated direction in the original coordinate order."""
        out = np.empty(len(self.q))
        out[list(self.perm)] = np.asarray(self.q, dtype=float) / self.Q
        return out

    def permute(self, alphas) -> np.ndarray:
        """Spectrum columns reordered to match ``q``."""
        return np.atleast_2d(np.asarray(alphas, dtype=np.int64))[:, list(self.perm)]


def rational_direction(x: Sequence[float], Qmax: int = 10**6, max_increments: int = 10_000) -> RationalDirection:
    """Approximate ``x`` by ``q/Q`` (``Q <= Qmax``) whose leading pair is coprime.

    Each coordinate goes through continued fractions with a shrinking
    denominator cap until the common denominator fits.  If ``gcd(q1, q2) != 1``
    the coordinates are permuted to bring a coprime pair to the front
    (``perm`` maps new positions to old); failing that ``Q`` is incremented and
    ``q = round(x Q)`` retried.
    """
    x = [float(v) for v in x]
    if len(x) < 2:
        raise InvalidParameter("direction needs at least two coordinates")
    cap = Qmax
    while True:
        fr = [Fraction(v).limit_denominator(cap) for v in x]
        Q = math.lcm(*(f.denominator for f in fr))
        if Q <= Qmax:
            break
        cap = max(1, cap // 2)
    q = [int(f * Q) for f in fr]
    for _ in range(max_increments):
        pair = _coprime_pair(q)
        if pair is not None:
            i, j = pair
            perm = [i, j] + [k for k in range(len(q)) if k not in (i, j)]
            return RationalDirection(tuple(q[k] for k in perm), Q, tuple(perm))
        Q += 1
        q = [round(v * Q) for v in x]
    raise NotCoprime("no coprime leading pair found")


def _coprime_pair(q):
    for i in range(len(q)):
        for j in range(len(q)):
            if i != j and math.gcd(q[i], q[j]) == 1:
                return i, j
    return None


# --------------------------------------------------------------------------- Carleson maximal function


def _group_weights(keys: np.ndarray, exact: bool) -> tuple[np.ndarray, np.ndarray]:
    """Sort order and prefix weights realising ``sup_{S>0}`` over threshold prefixes.

    Ties enter together, so only the last index of each tie group can be a
    prefix end.  Every nonempty ``S > 0`` prefix contains all nonpositive keys,
    so among groups with key ``<= 0`` only the last one counts.
    """
    order = np.argsort(keys, kind="stable")
    k = keys[order]
    if exact:
        ends = np.append(k[1:] != k[:-1], True)
    else:
        ends = np.append(~np.isclose(k[1:], k[:-1], rtol=0, atol=1e-12 * max(1.0, float(np.max(np.abs(k))))), True)
    w = ends.astype(float)
    nonpos = k <= 0
    if nonpos.any():
        last = int(np.nonzero(nonpos)[0][-1])
        w[:last] = 0.0
        w[last] = 1.0
    return order, w


def carleson_maximal(alphas, coeffs, x, angles) -> np.ndarray:
    """``M_x f(z) = sup_{S>0} |sum_{<alpha, x> <= S} c_alpha z^alpha|`` at every angle row.

    ``x`` may be a float vector or a RationalDirection; for the latter
    ``<alpha, q>`` is compared in exact integer arithmetic.
    """
    alphas = np.atleast_2d(np.asarray(alphas, dtype=np.int64))
    c = np.asarray(coeffs, dtype=complex)
    if isinstance(x, RationalDirection):
        keys, exact = x.permute(alphas) @ np.asarray(x.q, dtype=np.int64), True
    else:
        keys, exact = alphas @ np.asarray(x, dtype=float), False
    order, w = _group_weights(keys, exact)
    return _accel.torus_prefix_sup(np.atleast_2d(angles), alphas[order], c[order], w)


def carleson_maximal_substituted(alphas, coeffs, plan: UnimodularPlan, angles) -> np.ndarray:
    """``M_x f`` after the change of variables ``beta = A alpha``.

    Then ``<alpha, q> = beta_1`` and the threshold prefixes become prefixes in
    the first coordinate of ``beta``; the transformed polynomial is evaluated
    at the same (Haar) angles.  ``alphas`` must already be in the column order of ``plan.q``.
    """
    betas = plan.apply(alphas)
    c = np.asarray(coeffs, dtype=complex)
    order, w = _group_weights(betas[:, 0], True)
    return _accel.torus_prefix_sup(np.atleast_2d(angles), betas[order], c[order], w)


@dataclass(frozen=True)
class MaximalEstimate:
    operator: str
    p: float | str
    samples: int
    seed: object
    estimate: float
    stderr: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"operator": self.operator, "p": self.p, "samples": self.samples, "seed": _seed_json(self.seed),
                "estimate": self.estimate, "stderr": self.stderr, **self.extra}


def _seed_json(seed):
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": seed.entropy, "spawn_key": list(seed.spawn_key)}
    return seed


def _lp_from_samples(v: np.ndarray, p: float) -> tuple[float, float]:
    vp = v**p
    m = float(vp.mean())
    se_m = float(vp.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
    val = m ** (1 / p)
    return val, (val / (p * m) * se_m if m > 0 else 0.0)


def carleson_norm(alphas, coeffs, direction: RationalDirection, p: float = 2.0, samples: int = 100_000, seed=0,
                  substituted: bool = False, chunk: int = 20_000) -> MaximalEstimate:
    """Monte Carlo ``||M_x f||_p`` over Haar samples, directly or through the unimodular substitution.

    ``extra`` records ``||f||_p`` on the same samples and whether ``M_x f >= |f|`` held at every sample.
    """
    alphas = np.atleast_2d(np.asarray(alphas, dtype=np.int64))
    c = np.asarray(coeffs, dtype=complex)
    plan = unimodular_plan(direction.q, direction.Q) if substituted else None
    rng = np.random.default_rng(seed)
    Mv, fv = [], []
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        theta = rng.uniform(0.0, 2 * math.pi, size=(m, alphas.shape[1]))
        if substituted:
            Mv.append(carleson_maximal_substituted(direction.permute(alphas), c, plan, theta))
            fv.append(np.abs(_accel.torus_eval(theta, plan.apply(direction.permute(alphas)), c)))
        else:
            Mv.append(carleson_maximal(alphas, c, direction, theta))
            fv.append(np.abs(_accel.torus_eval(theta, alphas, c)))
        done += m
    M = np.concatenate(Mv)
    f = np.concatenate(fv)
    val, se = _lp_from_samples(M, p)
    fval, _ = _lp_from_samples(f, p)
    dominated = bool(np.all(M >= f * (1 - 1e-12) - 1e-12))
    return MaximalEstimate("carleson-substituted" if substituted else "carleson", p, samples, seed, val, se,
                           {"f_norm": fval, "pointwise_dominance": dominated})


# --------------------------------------------------------------------------- Dirichlet maximal operators


def smax_u(D, model: GroupModel, u: float, angles) -> np.ndarray:
    """``sup_N |sum_{n<=N} a_n e^{-u lambda_n} h_{lambda_n}(omega)|`` at every angle row."""
    if not u > 0:
        raise InvalidParameter("u must be positive")
    if len(D) == 0:
        return np.zeros(np.atleast_2d(angles).shape[0])
    c = D.coeffs * np.exp(-u * D.lambdas)
    return _accel.torus_prefix_sup(np.atleast_2d(angles), model.rows(D.indices), c, np.ones(len(D)))


def tmax_weights(freq, M: int, k) -> np.ndarray:
    """``w_N = k_N ((lambda_{N+1} - lambda_N)/lambda_{N+1})^{k_N}`` for ``N = 1..M``.

    ``k`` is a constant, an array of ``k_1..k_M`` or a callable of the array ``lambda_1..lambda_M``.
    """
    lam = freq.values(M + 1)
    kN = np.asarray(k(lam[:M]) if callable(k) else k, dtype=float)
    if kN.ndim == 0:
        kN = np.full(M, float(kN))
    if kN.shape != (M,):
        raise InvalidParameter(f"need {M} weights, got shape {kN.shape}")
    if np.any(kN <= 0) or np.any(kN > 1):
        raise InvalidParameter("weights must lie in (0, 1]")
    nxt = lam[1:]
    if np.any(nxt == 0):
        raise InvalidParameter("lambda_{N+1} = 0")
    return kN * ((nxt - lam[:M]) / nxt) ** kN


def tmax_weighted(D, model: GroupModel, k, angles) -> np.ndarray:
    """``sup_N |sum_{n<=N} a_n h_{lambda_n}(omega)| w_N`` for ``N`` up to the polynomial's last index.

    Between consecutive indices of ``D`` the partial sum is constant, so each
    term carries the largest ``w_N`` over the ``N`` it covers.
    """
    if len(D) == 0:
        return np.zeros(np.atleast_2d(angles).shape[0])
    M = D.max_index
    w = tmax_weights(D.freq, M, k)
    starts = D.indices
    stops = np.append(D.indices[1:], M + 1)
    eff = np.array([w[s - 1 : e - 1].max() for s, e in zip(starts, stops)])
    return _accel.torus_prefix_sup(np.atleast_2d(angles), model.rows(D.indices), D.coeffs, eff)


def hl_flow(D, model: GroupModel, omega=None, *, step: float = 0.01, J: int = 10, T: float | None = None) -> float:
    """Discretised ``sup_I (1/|I|) int_I |f(omega beta(t))| dt``.

    ``|f|`` is sampled at midpoints ``(i + 1/2) step`` on ``[-T, T]``; windows are
    ``2^j`` consecutive cells (``j = 0..J``) at every position, averaged by the
    midpoint rule.  A lower estimate of the supremum over all intervals.
    """
    if step <= 0 or J < 0:
        raise InvalidParameter("step must be positive and J nonnegative")
    T = T if T is not None else 2 ** J * step
    K = max(1, int(round(T / step)))
    t = (np.arange(-K, K) + 0.5) * step
    a = np.abs(evaluate_flow(D, model, t, omega))
    cs = np.concatenate(([0.0], np.cumsum(a)))
    best = 0.0
    for j in range(J + 1):
        m = 2**j
        if m > len(a):
            break
        best = max(best, float(((cs[m:] - cs[:-m]) / m).max()))
    return best


def weak_l1_norm(values, mode: str = "grid", points: int = 64) -> float:
    """Empirical ``sup_alpha alpha * P(|g| >= alpha)``.

    grid: ``points`` log-spaced levels between the 1st and 99.9th percentiles.
    exact: every sample value as a level (the exact supremum for the sample).
    """
    v = np.sort(np.abs(np.asarray(values, dtype=float).ravel()))
    if v.size == 0:
        raise InvalidParameter("empty sample")
    n = v.size
    if mode == "exact":
        tail = (n - np.arange(n)) / n
        return float(np.max(v * tail))
    if mode != "grid":
        raise InvalidParameter(f"unknown mode {mode!r}")
    lo, hi = np.percentile(v, [1.0, 99.9])
    if hi <= 0:
        return 0.0
    lo = lo if lo > 0 else v[v > 0][0]
    alphas = np.geomspace(lo, hi, points) if hi > lo else np.array([hi])
    tail = (n - np.searchsorted(v, alphas, side="left")) / n
    return float(np.max(alphas * tail))


def partial_sum_ratio(D, N: int, k: float, model: GroupModel, *, samples: int = 100_000, T: float = 1e4,
                      flow_points: int = 100_000, seed=0) -> tuple[float, float]:
    """``(||S_N D||_inf / ||D||_inf, (1/k) (lambda_{N+1}/(lambda_{N+1} - lambda_N))^k)``.

    Both sup norms use the same Haar samples and flow grid.
    """
    if not 0 < k <= 1:
        raise InvalidParameter("k must lie in (0, 1]")
    lam = D.freq.values(N + 1)
    scale = (1 / k) * (lam[N] / (lam[N] - lam[N - 1])) ** k
    top = lp_norm(partial_sum(D, N), model, math.inf, samples=samples, T=T, flow_points=flow_points, seed=seed).value
    bottom = lp_norm(D, model, math.inf, samples=samples, T=T, flow_points=flow_points, seed=seed).value
    return (top / bottom if bottom > 0 else math.inf), float(scale)
