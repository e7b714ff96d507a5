"""Monte Carlo vertical limits: partial sums of ``sum a_n chi(n) e^{-lambda_n sigma}`` along random characters."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _accel
from .errors import InvalidParameter
from .frequency import Frequency, primes_up_to, smallest_prime_factors

__all__ = ["parse_coefficients", "character_angles", "HelsonResult", "helson_simulate"]

_POWER = re.compile(r"^n\^\(?(-?\d+(?:\.\d*)?(?:[eE]-?\d+)?)\)?$")
_GAUSS = re.compile(r"^random-gaussian\(\s*(\d+(?:\.\d*)?(?:[eE]-?\d+)?)\s*\)$")


def parse_coefficients(rule: str, N: int, seed=0) -> np.ndarray:
    """Coefficients ``a_1..a_N`` from ``n^-a``, ``random-gaussian(scale)`` or ``file:<path>``.

    A file holds one value per line (``re`` or ``re im``); shorter files are zero-padded.
    """
    key = rule.replace(" ", "")
    m = _POWER.match(key)
    if m:
        return np.arange(1, N + 1, dtype=float) ** float(m.group(1)) + 0j
    m = _GAUSS.match(key)
    if m:
        rng = np.random.default_rng(seed)
        return float(m.group(1)) * (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / math.sqrt(2)
    if rule.startswith("file:"):
        path = Path(rule.split(":", 1)[1].strip())
        try:
            rows = [ln.split() for ln in path.read_text().splitlines() if ln.strip()]
            vals = [complex(float(r[0]), float(r[1]) if len(r) > 1 else 0.0) for r in rows]
        except (OSError, ValueError, IndexError) as exc:
            raise InvalidParameter(f"cannot read coefficients from {path}: {exc}") from exc
        out = np.zeros(N, dtype=complex)
        out[: min(N, len(vals))] = vals[:N]
        return out
    raise InvalidParameter(f"unknown coefficient rule {rule!r}")


def character_angles(freq: Frequency, N: int, count: int, seed) -> tuple[np.ndarray, str]:
    """Angles of ``h_{lambda_n}(omega)`` for ``count`` Haar-random ``omega``; shape ``(count, N)``.

    ``log(n)``: completely multiplicative characters, uniform at the primes.
    ``n``: a single uniform angle ``theta`` and ``h_n = e^{i (n-1) theta}``.
    Anything else: values declared Q-independent, so i.i.d. uniform phases.
    """
    rng = np.random.default_rng(seed)
    if freq.name == "log(n)":
        primes = primes_up_to(N)
        col = np.zeros(N + 1, dtype=np.int64)
        col[primes] = np.arange(len(primes))
        pa = rng.uniform(0.0, 2 * math.pi, size=(count, len(primes)))
        return _accel.multiplicative_angles(pa, smallest_prime_factors(N), col), "multiplicative"
    if freq.name == "n":
        th = rng.uniform(0.0, 2 * math.pi, size=(count, 1))
        return th * np.arange(N, dtype=float), "single-generator"
    return rng.uniform(0.0, 2 * math.pi, size=(count, N)), "declared-independent"


@dataclass
class HelsonResult:
    checkpoints: list[int]
    increments: np.ndarray  # (chars, checkpoints): |S_N - S_{N/2}|
    medians: list[float]
    l2_blocks: list[float]
    character_model: str

    def csv_rows(self):
        yield ("character", "N", "increment")
        for c, row in enumerate(self.increments):
            for N, v in zip(self.checkpoints, row):
                yield (c, N, repr(float(v)))


def helson_simulate(freq: Frequency, coeffs: np.ndarray, sigma: float, chars: int, nmax: int, seed) -> HelsonResult:
    """Dyadic increments ``|S_N - S_{N/2}|`` of ``D^omega`` at ``s = sigma`` for ``N = 2, 4, ..., nmax``."""
    if not sigma > 0:
        raise InvalidParameter("sigma must be positive")
    if chars < 1 or nmax < 2:
        raise InvalidParameter("need chars >= 1 and nmax >= 2")
    lam = freq.validated(nmax)
    a = np.asarray(coeffs, dtype=complex)[:nmax]
    angles, kind = character_angles(freq, nmax, chars, seed)
    terms = np.exp(1j * angles) * (a * np.exp(-sigma * lam))
    S = np.cumsum(terms, axis=1)
    cps = [2**j for j in range(1, int(math.log2(nmax)) + 1)]
    inc = np.stack([np.abs(S[:, N - 1] - S[:, N // 2 - 1]) for N in cps], axis=1)
    mags = np.abs(a) ** 2
    blocks = [float(mags[N // 2 : N].sum()) for N in cps]
    return HelsonResult(cps, inc, [float(np.median(inc[:, i])) for i in range(len(cps))], blocks, kind)
