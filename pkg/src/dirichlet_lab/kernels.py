"""Poisson and Perron kernels, with quadrature oracles for the closed forms.

Closed forms are the primary API.  Every ``*_oracle`` function integrates the
defining integral numerically and reports ``quad_error + tail_bound`` so the
comparison against the closed form carries an honest error budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import AccuracyNotAchieved, InvalidFrequency, InvalidParameter
from .quad import QuadResult, QuadratureSpec, adaptive, graded_edges, uniform_edges

__all__ = [
    "poisson_eval",
    "poisson_mass",
    "char_poisson_convolve",
    "char_poisson_oracle",
    "perron_line_integral",
    "perron_closed_form",
    "perron_transform",
    "perron_transform_oracle",
    "DecayCheck",
    "decay_inner_integral",
    "decay_bound_check",
    "lyapunov_bound",
    "decay_pointwise_bound",
    "decay_outer_bounds",
    "OuterIntegral",
    "decay_outer_integral",
    "decay_lower_bound",
    "proof_g",
    "proof_h",
]


def _check_u(u: float) -> None:
    if not u > 0:
        raise InvalidParameter(f"u must be positive, got {u}")


def poisson_eval(u: float, t):
    """``P_u(t) = u / (pi (u^2 + t^2))``."""
    _check_u(u)
    t = np.asarray(t, dtype=float)
    out = u / (math.pi * (u * u + t * t))
    return float(out) if out.ndim == 0 else out


def poisson_mass(u: float, quad: QuadratureSpec = QuadratureSpec(tol=1e-6)) -> QuadResult:
    """``int P_u`` by quadrature on ``[-T_q, T_q]`` plus the exact mass outside it.

    The outside mass ``1 - (2/pi) arctan(T_q/u)`` is added to the value, so the
    result should equal 1 up to the quadrature error.
    """
    _check_u(u)
    T = quad.T_q if quad.T_q is not None else 1e3 * u
    res = adaptive(lambda t: poisson_eval(u, t),
                   lambda w: graded_edges([0.0], w, T, 2 * u), u / 4, quad.tol, quad.order, quad.max_refine)
    outside = 1.0 - 2.0 / math.pi * math.atan(T / u)
    return QuadResult(float(res.value) + outside, res.quad_error, 0.0, res.panels)


def char_poisson_convolve(lam: float, u: float, t: float) -> complex:
    """``(h_lam * P_u)(t) = exp(-(u + i t) lam)`` for ``h_lam(t) = exp(-i lam t)``."""
    _check_u(u)
    if lam < 0:
        raise InvalidFrequency(f"frequency value must be nonnegative, got {lam}")
    return complex(np.exp(-(u + 1j * t) * lam))


def char_poisson_oracle(lam: float, u: float, t: float, quad: QuadratureSpec = QuadratureSpec(tol=1e-7)) -> QuadResult:
    """Quadrature of ``int exp(-i lam (t - y)) P_u(y) dy``.

    Tail outside ``[-T, T]``: exact Poisson mass for ``lam = 0``; for ``lam > 0``
    the second mean value theorem bounds each side by ``2 sqrt(2) P_u(T) / lam``.
    """
    _check_u(u)
    if lam < 0:
        raise InvalidFrequency(f"frequency value must be nonnegative, got {lam}")

    def f(y):
        return np.exp(-1j * lam * (t - y)) * poisson_eval(u, y)

    if lam == 0:
        T = quad.T_q or 1e3 * u
        res = adaptive(f, lambda w: graded_edges([0.0], w, T, 2 * u), u / 4, quad.tol, quad.order, quad.max_refine)
        outside = 1.0 - 2.0 / math.pi * math.atan(T / u)
        return QuadResult(complex(res.value) + outside, res.quad_error, 0.0, res.panels)
    # smallest T with 2 * 2sqrt2 * u/(pi T^2 lam) <= tol/2
    T = quad.T_q or max(10 * u, math.sqrt(8 * math.sqrt(2) * u / (math.pi * lam * quad.tol)))
    tail = 4 * math.sqrt(2) * poisson_eval(u, T) / lam
    width = min(math.pi / (4 * lam + 1), u / 4)
    return adaptive(f, lambda w: uniform_edges(-T, T, w), width, quad.tol, quad.order, quad.max_refine, tail)


# --------------------------------------------------------------------------- Perron


def perron_closed_form(y: float, k: float) -> float:
    """``y^k`` for ``y >= 0`` (with ``0^k = 0``), else 0."""
    return float(y**k) if y > 0 else 0.0


def _line_quad(components, k: float, alpha: float, quad: QuadratureSpec) -> QuadResult:
    """``(Gamma(k+1)/2pi) int sum_j c_j exp(i w_j t) (alpha + i t)^{-1-k} dt`` over the real line.

    ``components`` is a list of ``(c_j, w_j)``.  Components with ``w_j = 0`` get
    their exact tail ``(alpha -+ i T)^{-k} / (+-i k)``; the others an
    integration-by-parts bound ``4 |c_j| T^{-1-k} / |w_j|`` (both sides).
    """
    if not k > 0:
        raise InvalidParameter("k must be positive")
    if not alpha > 0:
        raise InvalidParameter("alpha must be positive")
    c = np.array([cj for cj, _ in components], dtype=complex)
    w = np.array([wj for _, wj in components], dtype=float)
    scale = math.gamma(k + 1) / (2 * math.pi)
    osc = w != 0
    ibp = float(np.sum(4 * np.abs(c[osc]) / np.abs(w[osc]))) * scale
    if quad.T_q is not None:
        T = quad.T_q
    elif ibp > 0:
        T = (ibp / (quad.tol / 2)) ** (1 / (1 + k))
    else:
        T = 50.0
    T = max(T, 20 * alpha, 20.0)
    tail = ibp * T ** (-1 - k)
    if tail > quad.tol:
        raise AccuracyNotAchieved(math.nan, tail, quad.tol)
    exact_tail = 0j
    if np.any(~osc):
        cz = np.sum(c[~osc])
        exact_tail = scale * cz * ((alpha + 1j * T) ** (-k) / (1j * k) - (alpha - 1j * T) ** (-k) / (1j * k))

    def f(t):
        return scale * (np.exp(1j * np.outer(t, w)) @ c) * (alpha + 1j * t) ** (-1 - k)

    width = min(math.pi / (4 * float(np.max(np.abs(w), initial=0.0)) + 1), alpha / 4)
    res = adaptive(f, lambda h: graded_edges([0.0], h, T, 4 * alpha, ratio=1.05) if not np.any(osc)
                   else uniform_edges(-T, T, h), width, quad.tol, quad.order, quad.max_refine, tail)
    return QuadResult(complex(res.value) + exact_tail, res.quad_error, res.tail_bound, res.panels)


def perron_line_integral(y: float, k: float, alpha: float = 1.0, quad: QuadratureSpec = QuadratureSpec(tol=1e-4)) -> QuadResult:
    """``(Gamma(k+1)/2 pi i) int_{alpha - i inf}^{alpha + i inf} e^{ys} s^{-1-k} ds`` by quadrature.

    Along ``s = alpha + i t`` the integrand is ``e^{y alpha} e^{i y t} (alpha + i t)^{-1-k}``.
    The exact value is :func:`perron_closed_form`.
    """
    res = _line_quad([(math.exp(y * alpha), y)], k, alpha, quad)
    return QuadResult(float(np.real(res.value)), res.quad_error, res.tail_bound, res.panels)


def perron_transform(lam: Sequence[float], coeffs: Sequence[complex], u: float, k: float, x: float) -> complex:
    """``e^{-u|x|} sum_{lam_n < x} a_n (x - lam_n)^k`` (``k = 0`` gives the plain partial sum)."""
    _check_u(u)
    if k < 0:
        raise InvalidParameter("k must be nonnegative")
    lam = np.asarray(lam, dtype=float)
    a = np.asarray(coeffs, dtype=complex)
    keep = lam < x
    return complex(math.exp(-u * abs(x)) * np.sum(a[keep] * (x - lam[keep]) ** k))


def perron_transform_oracle(lam: Sequence[float], coeffs: Sequence[complex], u: float, k: float, x: float,
                            quad: QuadratureSpec = QuadratureSpec(tol=1e-4)) -> QuadResult:
    """``(Gamma(k+1)/2pi) F(g*P_u / (u + i.)^{1+k})(-x)`` by quadrature, ``F`` the Fourier transform.

    With ``g(t) = sum a_n e^{-i lam_n t}``: ``g*P_u(t) = sum a_n e^{-u lam_n} e^{-i lam_n t}``
    and ``F(phi)(-x) = int phi(t) e^{i x t} dt``.
    """
    _check_u(u)
    lam = np.asarray(lam, dtype=float)
    a = np.asarray(coeffs, dtype=complex)
    comps = [(an * math.exp(-u * ln), x - ln) for an, ln in zip(a, lam)]
    return _line_quad(comps, k, u, quad)


# --------------------------------------------------------------------------- decay lemma


class DecayCheck(NamedTuple):
    value: float
    bound: float
    branch: str
    holds: bool
    error: float

    def to_dict(self) -> dict:
        return self._asdict()


def _integrand(u, eps, y):
    def f(t):
        return (poisson_eval(u, t - y) / np.abs(u + 1j * t)) ** (1 + eps)

    return f


def decay_inner_integral(u: float, eps: float, y: float, quad: QuadratureSpec = QuadratureSpec(tol=1e-10)) -> QuadResult:
    """``int (P_u(t - y) / |u + i t|)^{1+eps} dt``.

    For ``|t| >= T >= 2|y| + u`` one has ``P_u(t - y) <= 4u/(pi t^2)`` and ``|u + it| >= |t|``,
    giving the tail ``2 (4u/pi)^{1+eps} T^{1 - 3(1+eps)} / (3(1+eps) - 1)``.
    """
    _check_u(u)
    if not eps > 0:
        raise InvalidParameter("eps must be positive")
    a = 1 + eps
    tail_at = lambda T: 2 * (4 * u / math.pi) ** a * T ** (1 - 3 * a) / (3 * a - 1)
    T = quad.T_q or 2 * abs(y) + u
    T = max(T, 2 * abs(y) + u)
    while tail_at(T) > quad.tol / 4:
        T *= 2
    f = _integrand(u, eps, y)
    centres = [0.0, y]
    near = 4 * u
    return adaptive(f, lambda w: graded_edges(centres, w, T, near, ratio=1.08), u / 8, quad.tol, quad.order,
                    quad.max_refine, tail_at(T))


def lyapunov_bound(u: float, eps: float) -> float:
    return (1 / u) ** (1 + eps / (1 + eps))


def decay_pointwise_bound(y: float, eps: float) -> float:
    return 4 * abs(y) ** (-(1 + eps / (1 + eps)))


def decay_bound_check(u: float, eps: float, y: float, quad: QuadratureSpec = QuadratureSpec(tol=1e-10)) -> DecayCheck:
    """Compare ``(inner integral)^{1/(1+eps)}`` with the applicable bound.

    ``|y| > 4u`` uses ``4 |y|^{-(1 + eps/(1+eps))}``, otherwise the uniform
    Lyapunov bound ``(1/u)^{1 + eps/(1+eps)}``.  The comparison uses the
    upper end ``value + error`` of the quadrature interval.
    """
    res = decay_inner_integral(u, eps, y, quad)
    a = 1 + eps
    val = float(res.value) ** (1 / a)
    hi = (float(res.value) + res.error) ** (1 / a)
    if abs(y) > 4 * u:
        bound, branch = decay_pointwise_bound(y, eps), "far"
    else:
        bound, branch = lyapunov_bound(u, eps), "lyapunov"
    return DecayCheck(val, bound, branch, hi <= bound, hi - val)


def decay_outer_bounds(u: float, eps: float) -> tuple[float, float]:
    """The claimed bound on the outer integral and the sharper value from splitting at ``|y| = 4u``."""
    r = eps / (1 + eps)
    stated = 8 * (1 + eps) / eps * (1 / u) ** r
    split = 4 * (1 / u) ** r + 8 * (1 + eps) / eps * (1 / (4 * u)) ** r
    return stated, split


def decay_lower_bound(u: float, eps: float, y) -> np.ndarray | float:
    """Rigorous lower bound of ``(inner integral)^{1/(1+eps)}``.

    On ``|t - y| <= u``: ``P_u(t-y) >= 1/(2 pi u)`` and ``|u + it| <= |y| + 2u``, so the
    inner integral is at least ``2u (2 pi u (|y| + 2u))^{-(1+eps)}``.
    """
    y = np.abs(np.asarray(y, dtype=float))
    out = (2 * u) ** (1 / (1 + eps)) / (2 * math.pi * u * (y + 2 * u))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class OuterIntegral:
    """Outer integral over ``y`` with its divergence certificate.

    ``value`` is ``inf``: the lower bound ``c/(|y| + 2u)`` is not integrable.
    ``partial`` holds quadrature values on ``[-Y, Y]`` for growing ``Y`` and
    ``lower`` the matching closed-form lower bounds ``2c log((Y + 2u)/(2u))``;
    ``crossing`` is the ``Y`` beyond which the lower bound alone exceeds ``stated_bound``.
    """

    u: float
    eps: float
    value: float
    stated_bound: float
    split_bound: float
    partial: tuple[tuple[float, float], ...]
    lower: tuple[tuple[float, float], ...]
    crossing: float

    @property
    def holds(self) -> bool:
        return self.value <= self.stated_bound

    def to_dict(self) -> dict:
        return {
            "u": self.u,
            "eps": self.eps,
            "value": "inf" if math.isinf(self.value) else self.value,
            "stated_bound": self.stated_bound,
            "split_bound": self.split_bound,
            "partial": [list(p) for p in self.partial],
            "lower": [list(p) for p in self.lower],
            "crossing": self.crossing,
            "holds": self.holds,
        }


def decay_outer_integral(u: float, eps: float, Ys: Sequence[float] = (10.0, 100.0, 1000.0),
                         quad: QuadratureSpec = QuadratureSpec(tol=1e-8)) -> OuterIntegral:
    """Outer integral ``int_R (inner integral)^{1/(1+eps)} dy``: truncated values plus a divergence certificate."""
    _check_u(u)
    stated, split = decay_outer_bounds(u, eps)
    c = (2 * u) ** (1 / (1 + eps)) / (2 * math.pi * u)
    ys = np.sort(np.asarray(Ys, dtype=float) * u)
    edges = graded_edges([0.0], u / 2, float(ys[-1]), 4 * u, ratio=1.15)
    x, w = np.polynomial.legendre.leggauss(8)
    cum = [0.0]
    for a, b in zip(edges[:-1], edges[1:]):
        nodes = (a + b) / 2 + (b - a) / 2 * x
        vals = np.array([float(decay_inner_integral(u, eps, yy, quad).value) ** (1 / (1 + eps)) for yy in nodes])
        cum.append(cum[-1] + float(vals @ w) * (b - a) / 2)
    # the +-Y are panel edges of the graded grid only approximately; interpolate the running integral
    partial = tuple((float(Y), float(np.interp(Y, edges, cum) - np.interp(-Y, edges, cum))) for Y in ys)
    lower = tuple((float(Y), 2 * c * math.log((Y + 2 * u) / (2 * u))) for Y in ys)
    crossing = 2 * u * math.expm1(min(stated / (2 * c), 700.0))
    return OuterIntegral(u, eps, math.inf, stated, split, partial, lower, crossing)


# --------------------------------------------------------------------------- monotonicity claims


def proof_g(t, u: float, y: float):
    """``g(t) = u / (((tu)^2 + (2yt - 1)^2)(u + 1/t - y))`` from the substitution ``x = -y + 1/t`` (``y > 4u``)."""
    t = np.asarray(t, dtype=float)
    return u / (((t * u) ** 2 + (2 * y * t - 1) ** 2) * (u + 1 / t - y))


def proof_h(t, u: float, y: float):
    """``h(t) = u / (((tu)^2 + 1)(u + y + 1/t))`` from the substitution ``x = y + 1/t`` (``y < -4u``)."""
    t = np.asarray(t, dtype=float)
    return u / (((t * u) ** 2 + 1) * (u + y + 1 / t))
