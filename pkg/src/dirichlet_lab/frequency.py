"""Frequencies, their Bohr/Landau regularity conditions, and integer basis extraction.

A frequency is a strictly increasing sequence ``lambda_1 < lambda_2 < ...`` of
nonnegative reals.  Indices are 1-based throughout the package, so
``freq.values(N)[n - 1]`` is ``lambda_n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np

from .errors import InvalidFrequency, InvalidParameter, InvalidRelations, RelationInconclusive

__all__ = [
    "Frequency",
    "ConditionReport",
    "BasisDecomposition",
    "parse_frequency",
    "check_condition",
    "l_value",
    "decompose_basis",
    "ordinary_decomposition",
    "primes_up_to",
    "smallest_prime_factors",
]

# Number of trailing checkpoints the verdict rule looks at.
TREND_WINDOW = 4


@dataclass(frozen=True)
class Frequency:
    """A frequency given either by a vectorised closed-form rule or an explicit list."""

    name: str
    rule: Callable[[np.ndarray], np.ndarray] | None = None
    entries: np.ndarray | None = None

    def __post_init__(self):
        if (self.rule is None) == (self.entries is None):
            raise InvalidFrequency("give exactly one of rule / entries")
        if self.entries is not None:
            arr = np.asarray(self.entries, dtype=float)
            _validate(arr, self.name)
            object.__setattr__(self, "entries", arr)

    @property
    def length(self) -> int | None:
        return None if self.entries is None else len(self.entries)

    def values(self, N: int) -> np.ndarray:
        """Return ``lambda_1 .. lambda_N`` as a float array."""
        if N < 0:
            raise InvalidParameter("N must be nonnegative")
        if self.entries is not None:
            if N > len(self.entries):
                raise InvalidFrequency(f"frequency {self.name!r} has only {len(self.entries)} entries, asked for {N}")
            return self.entries[:N].copy()
        n = np.arange(1, N + 1, dtype=float)
        return np.asarray(self.rule(n), dtype=float)

    def value(self, n: int) -> float:
        return float(self.values(n)[n - 1])

    def validated(self, N: int) -> np.ndarray:
        lam = self.values(N)
        _validate(lam, self.name)
        return lam

    def default_decomposition(self, N: int) -> "BasisDecomposition":
        """Basis decomposition used when no explicit relation data is supplied.

        ``log(n)`` uses the primes, ``n`` the single basis element 1; anything else
        is *declared* Q-linearly independent (every positive value its own basis
        element), which is flagged in the returned notes.
        """
        if self.name == "log(n)":
            return ordinary_decomposition(N)
        if self.name == "n":
            rows = np.arange(N, dtype=np.int64).reshape(N, 1)
            return BasisDecomposition(
                basis=(1.0,),
                matrix=rows,
                values=tuple(self.values(N)),
                mode="symbolic-exact",
                exact_basis=({"1": Fraction(1)},),
                relations=tuple({"1": Fraction(n)} for n in range(N)),
            )
        lam = self.validated(N)
        names = {f"lam[{n}]": float(v) for n, v in enumerate(lam, start=1) if v > 0}
        relations = [{f"lam[{n}]": 1} if v > 0 else {} for n, v in enumerate(lam, start=1)]
        dec = decompose_basis(lam, relations=relations, irrationals=names)
        dec.notes.append("basis declared Q-linearly independent without verification")
        return dec


def _validate(arr: np.ndarray, name: str) -> None:
    if arr.ndim != 1:
        raise InvalidFrequency(f"{name}: frequency must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise InvalidFrequency(f"{name}: non-finite entries")
    if len(arr) and arr[0] < 0:
        raise InvalidFrequency(f"{name}: first entry {arr[0]} is negative")
    bad = np.nonzero(np.diff(arr) <= 0)[0]
    if len(bad):
        i = int(bad[0]) + 1
        raise InvalidFrequency(f"{name}: not strictly increasing at index {i} ({arr[i - 1]!r} >= {arr[i]!r})")


_RULES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "log(n)": np.log,
    # (n) = (0, 1, 2, ...): lambda_n = n - 1
    "n": lambda n: n - 1.0,
    "sqrt(log(n))": lambda n: np.sqrt(np.log(n)),
    # shifted by 2 so that lambda_1 = log log 3 > 0
    "log(log(n))": lambda n: np.log(np.log(n + 2.0)),
}


def parse_frequency(spec: str) -> Frequency:
    """Parse the CLI mini-language: ``log(n)``, ``n``, ``sqrt(log(n))``, ``log(log(n))``, ``file:<path>``."""
    key = spec.replace(" ", "")
    if key in _RULES:
        return Frequency(name=key, rule=_RULES[key])
    if key.startswith("file:"):
        path = Path(spec.split(":", 1)[1].strip())
        try:
            lines = path.read_text().split()
        except OSError as exc:
            raise InvalidFrequency(f"cannot read frequency file {path}: {exc}") from exc
        try:
            arr = np.array([float(x) for x in lines])
        except ValueError as exc:
            raise InvalidFrequency(f"{path}: {exc}") from exc
        return Frequency(name=f"file:{path}", entries=arr)
    raise InvalidFrequency(f"unknown frequency {spec!r}")


# --------------------------------------------------------------------------- conditions


@dataclass
class ConditionReport:
    condition: str
    N: int
    witness: float
    trend: list[tuple[int, float]]
    verdict: str
    log_witness: float | None = None
    argmin: int | None = None
    limit: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "N": self.N,
            "witness": _jsonable(self.witness),
            "log_witness": _jsonable(self.log_witness),
            "argmin": self.argmin,
            "limit": _jsonable(self.limit),
            "trend": [[n, _jsonable(v)] for n, v in self.trend],
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


def _jsonable(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _checkpoints(N: int, lo: int = 2) -> list[int]:
    pts = []
    m = N
    while m >= lo:
        pts.append(m)
        m //= 2
    return sorted(set(pts))


def _prefix_verdict(trend_vals: Sequence[float], argmins: Sequence[int], checkpoints: Sequence[int]) -> str:
    """Deterministic verdict on a trend of prefix infima.

    holds  -- the minimising index is identical at the last TREND_WINDOW checkpoints
              and lies inside the earliest of them (infimum frozen across doublings);
    fails  -- the infimum strictly decreased at every one of the last TREND_WINDOW-1 doublings;
    inconclusive otherwise or with fewer than TREND_WINDOW checkpoints.
    """
    if len(trend_vals) < TREND_WINDOW:
        return "inconclusive"
    tail_v = trend_vals[-TREND_WINDOW:]
    tail_a = argmins[-TREND_WINDOW:]
    if len(set(tail_a)) == 1 and tail_a[0] <= checkpoints[-TREND_WINDOW]:
        return "evidence-holds"
    if all(b < a for a, b in zip(tail_v, tail_v[1:])):
        return "evidence-fails"
    return "inconclusive"


def check_condition(freq: Frequency, cond: str, N: int, *, l: float | None = None, delta: float | None = None) -> ConditionReport:
    """Prefix statistic for Bohr's (``"bc"``), Landau's (``"lc"``) condition or the L-value (``"l"``).

    BC: ``inf_{n<N} (lambda_{n+1}-lambda_n) exp((l+delta) lambda_n)``.
    LC: ``inf_{n<N} (lambda_{n+1}-lambda_n) exp(exp(delta lambda_n))``.
    Both are computed in log space; the trend holds the running infimum at
    the dyadic checkpoints ``N, N/2, N/4, ...``.
    """
    cond = cond.lower()
    if cond in ("l", "l-value", "lvalue"):
        return l_value(freq, N)
    if N < 2:
        raise InvalidParameter("N must be at least 2")
    if cond == "bc":
        if l is None or delta is None or l <= 0 or delta <= 0:
            raise InvalidParameter("BC needs l > 0 and delta > 0")
        label = f"BC(l={l:g}, delta={delta:g})"
    elif cond == "lc":
        if delta is None or delta <= 0:
            raise InvalidParameter("LC needs delta > 0")
        label = f"LC(delta={delta:g})"
    else:
        raise InvalidParameter(f"unknown condition {cond!r}")

    lam = freq.validated(N)
    gaps = np.diff(lam)
    head = lam[:-1]
    with np.errstate(over="ignore"):
        if cond == "bc":
            logs = np.log(gaps) + (l + delta) * head
        else:
            logs = np.log(gaps) + np.exp(delta * head)
    run_min = np.minimum.accumulate(logs)
    # index (0-based into gaps) where the running minimum was attained
    is_new = np.concatenate(([True], logs[1:] < run_min[:-1]))
    where = np.maximum.accumulate(np.where(is_new, np.arange(len(logs)), 0))

    cps = _checkpoints(N)
    trend, argmins = [], []
    for c in cps:
        v = run_min[c - 2]
        trend.append((c, float(np.exp(v))))
        argmins.append(int(where[c - 2]) + 1)
    verdict = _prefix_verdict([v for _, v in trend], argmins, cps)
    return ConditionReport(
        condition=label,
        N=N,
        witness=float(np.exp(run_min[-1])),
        log_witness=float(run_min[-1]),
        trend=trend,
        argmin=argmins[-1],
        verdict=verdict,
        notes=["prefix evidence only; the condition quantifies over all n"],
    )


def l_value(freq: Frequency, N: int) -> ConditionReport:
    """Tail-supremum trend of ``(log n)/lambda_n``.

    For each checkpoint ``c`` the trend records ``sup_{c/2 <= n <= c} (log n)/lambda_n``.
    A trend strictly increasing over the last TREND_WINDOW checkpoints is read as
    ``L = +inf``; otherwise the last tail supremum is the estimate.
    """
    if N < 2:
        raise InvalidParameter("N must be at least 2")
    lam = freq.validated(N)
    n = np.arange(1, N + 1, dtype=float)
    notes = []
    zero = lam == 0
    if zero.any():
        notes.append(f"{int(zero.sum())} zero entries excluded from the supremum")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(zero, -np.inf, np.log(n) / np.where(zero, 1.0, lam))

    trend = []
    for c in _checkpoints(N):
        lo = max(1, (c + 1) // 2)
        trend.append((c, float(ratio[lo - 1 : c].max())))
    vals = [v for _, v in trend if np.isfinite(v)]
    if len(vals) >= TREND_WINDOW and all(b > a for a, b in zip(vals[-TREND_WINDOW:], vals[-TREND_WINDOW + 1 :])):
        limit, verdict = math.inf, "evidence-fails"
    elif vals:
        limit, verdict = vals[-1], "evidence-holds"
    else:
        limit, verdict = math.nan, "inconclusive"
    return ConditionReport(
        condition="L-value",
        N=N,
        witness=limit,
        trend=trend,
        verdict=verdict,
        limit=limit,
        notes=notes + ["evidence-holds means a finite L-value; evidence-fails means a diverging trend"],
    )


# --------------------------------------------------------------------------- basis


@dataclass
class BasisDecomposition:
    """Basis ``b_1..b_P`` and integer Bohr matrix with ``lambda_n = sum_j R[n, j] b_j``."""

    basis: tuple[float, ...]
    matrix: np.ndarray
    values: tuple[float, ...]
    mode: str
    tol: float | None = None
    exact_basis: tuple[dict[str, Fraction], ...] | None = None
    relations: tuple[dict[str, Fraction], ...] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def P(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def reconstruct(self) -> np.ndarray:
        return self.matrix @ np.asarray(self.basis, dtype=float) if self.P else np.zeros(self.size)

    def verify(self) -> bool:
        """Exact check in symbolic mode, ``|R.B - lambda| <= tol`` in numeric mode."""
        if not np.issubdtype(self.matrix.dtype, np.integer):
            return False
        if self.mode == "symbolic-exact":
            for row, rel in zip(self.matrix.tolist(), self.relations):
                acc: dict[str, Fraction] = {}
                for r, b in zip(row, self.exact_basis):
                    for name, c in b.items():
                        acc[name] = acc.get(name, Fraction(0)) + r * c
                acc = {k: v for k, v in acc.items() if v != 0}
                if acc != {k: Fraction(v) for k, v in rel.items() if v != 0}:
                    return False
            return True
        err = np.abs(self.reconstruct() - np.asarray(self.values))
        return bool(np.all(err <= self.tol * np.maximum(1.0, np.abs(self.values))))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "tol": self.tol,
            "basis": list(self.basis),
            "bohr_matrix": self.matrix.tolist(),
            "exact_basis": None
            if self.exact_basis is None
            else [{k: str(v) for k, v in b.items()} for b in self.exact_basis],
            "notes": list(self.notes),
        }


def _solve_rational(basis: list[dict[str, Fraction]], target: dict[str, Fraction]) -> list[Fraction] | None:
    """Solve ``target = sum q_j basis_j`` over Q, or return None if target is independent."""
    names = sorted(set().union(target, *basis))
    P = len(basis)
    rows = [[b.get(nm, Fraction(0)) for b in basis] + [target.get(nm, Fraction(0))] for nm in names]
    pivots = []
    r = 0
    for c in range(P):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    if len(pivots) < P:
        raise InvalidRelations("basis elements are not linearly independent over the declared irrationals")
    q = [Fraction(0)] * P
    for i, c in enumerate(pivots):
        q[c] = rows[i][-1]
    return q


def _lcm_denominators(q: Sequence[Fraction]) -> int:
    K = 1
    for x in q:
        K = K * x.denominator // math.gcd(K, x.denominator)
    return K


def decompose_basis(
    values: Sequence[float],
    *,
    relations: Sequence[Mapping[str, object]] | None = None,
    irrationals: Mapping[str, float] | None = None,
    tol: float | None = None,
    maxcoeff: int = 1000,
    consistency_tol: float = 1e-9,
) -> BasisDecomposition:
    """Integer basis extraction by the induction of the Q-independence lemma.

    Values are processed in order.  A value independent of the current basis is
    appended to it; a dependent value ``sum q_j b_j`` triggers the rescaling
    ``b_j -> b_j / K`` with ``K`` the lcm of the denominators of the ``q_j``, after
    which every coefficient is an integer.  Zero values get a zero row.

    Symbolic mode (``relations`` + ``irrationals``): value ``n`` is declared to be
    ``sum_k relations[n][k] * irrationals[k]`` with rational coefficients, the
    named irrationals being Q-linearly independent by declaration.  Numeric mode
    (``tol``) detects relations with PSLQ and is never rigorous.
    """
    vals = [float(v) for v in values]
    if any(v < 0 for v in vals):
        raise InvalidFrequency("values must be nonnegative")
    if relations is not None:
        return _decompose_symbolic(vals, relations, irrationals or {}, consistency_tol)
    if tol is None:
        raise InvalidParameter("give relation data or a numeric tolerance")
    return _decompose_numeric(vals, tol, maxcoeff)


def _decompose_symbolic(vals, relations, irrationals, consistency_tol) -> BasisDecomposition:
    if len(relations) != len(vals):
        raise InvalidRelations("one relation per value is required")
    rels = []
    for i, (v, rel) in enumerate(zip(vals, relations)):
        try:
            rel = {str(k): Fraction(c) for k, c in rel.items() if Fraction(c) != 0}
        except (TypeError, ValueError) as exc:
            raise InvalidRelations(f"value {i + 1}: bad coefficient ({exc})") from exc
        missing = set(rel) - set(irrationals)
        if missing:
            raise InvalidRelations(f"value {i + 1}: undeclared irrationals {sorted(missing)}")
        approx = sum(float(c) * irrationals[k] for k, c in rel.items())
        if abs(approx - v) > consistency_tol * max(1.0, abs(v)):
            raise InvalidRelations(f"value {i + 1}: declared relation gives {approx!r}, value is {v!r}")
        rels.append(rel)

    basis: list[dict[str, Fraction]] = []
    rows: list[list[int]] = []
    for rel in rels:
        if not rel:
            rows.append([0] * len(basis))
            continue
        q = _solve_rational(basis, rel) if basis else None
        if q is None:
            basis.append(dict(rel))
            for row in rows:
                row.append(0)
            rows.append([0] * (len(basis) - 1) + [1])
            continue
        K = _lcm_denominators(q)
        if K > 1:
            basis = [{k: c / K for k, c in b.items()} for b in basis]
            rows = [[K * r for r in row] for row in rows]
        rows.append([int(K * x) for x in q])

    numeric = tuple(float(sum(float(c) * irrationals[k] for k, c in b.items())) for b in basis)
    return BasisDecomposition(
        basis=numeric,
        matrix=np.array(rows, dtype=np.int64).reshape(len(vals), len(basis)),
        values=tuple(vals),
        mode="symbolic-exact",
        exact_basis=tuple(basis),
        relations=tuple(rels),
    )


def _decompose_numeric(vals, tol, maxcoeff) -> BasisDecomposition:
    basis: list[float] = []
    rows: list[list[int]] = []
    notes = [f"numeric relation detection (PSLQ, tol={tol:g}, maxcoeff={maxcoeff}); not rigorous"]
    with mpmath.workdps(30):
        for i, v in enumerate(vals):
            if v == 0:
                rows.append([0] * len(basis))
                continue
            q = None
            if basis:
                q = _pslq_relation(v, basis, tol, maxcoeff)
                if q is None and _pslq_relation(v, basis, tol * 1e3, maxcoeff) is not None:
                    raise RelationInconclusive(i + 1, f"value {i + 1}: relation found only at loosened tolerance {tol * 1e3:g}")
            if q is None:
                basis.append(v)
                for row in rows:
                    row.append(0)
                rows.append([0] * (len(basis) - 1) + [1])
                continue
            K = _lcm_denominators(q)
            if K > 1:
                basis = [b / K for b in basis]
                rows = [[K * r for r in row] for row in rows]
            rows.append([int(K * x) for x in q])
    return BasisDecomposition(
        basis=tuple(basis),
        matrix=np.array(rows, dtype=np.int64).reshape(len(vals), len(basis)),
        values=tuple(vals),
        mode="numeric",
        tol=tol,
        notes=notes,
    )


def _pslq_relation(v: float, basis: Sequence[float], tol: float, maxcoeff: int) -> list[Fraction] | None:
    vec = [mpmath.mpf(v)] + [mpmath.mpf(b) for b in basis]
    rel = mpmath.pslq(vec, tol=mpmath.mpf(tol) * max(1.0, abs(v)), maxcoeff=maxcoeff, maxsteps=10_000)
    if rel is None:
        return None
    if rel[0] == 0:
        raise RelationInconclusive(-1, "PSLQ found a relation among the current basis elements")
    q = [Fraction(-c, rel[0]) for c in rel[1:]]
    resid = abs(v - sum(float(c) * b for c, b in zip(q, basis)))
    return q if resid <= tol * max(1.0, abs(v)) else None


# --------------------------------------------------------------------------- ordinary frequency


def smallest_prime_factors(N: int) -> np.ndarray:
    """``spf[n]`` for ``0 <= n <= N`` (``spf[0] = spf[1] = 0``)."""
    spf = np.zeros(N + 1, dtype=np.int64)
    for p in range(2, N + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def primes_up_to(N: int) -> np.ndarray:
    if N < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(N + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(N**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0]


def ordinary_decomposition(N: int) -> BasisDecomposition:
    """Decomposition of ``(log n)_{n <= N}`` over the log-primes.

    This is exactly what the induction produces on ``log 1, ..., log N`` with
    the log-primes declared independent, built directly from factorisations.
    The matrix is dense (N x pi(N)); intended for modest N.
    """
    primes = primes_up_to(N)
    col = {int(p): j for j, p in enumerate(primes)}
    spf = smallest_prime_factors(N)
    rows = np.zeros((N, len(primes)), dtype=np.int64)
    for n in range(2, N + 1):
        p = int(spf[n])
        rows[n - 1] = rows[n // p - 1]
        rows[n - 1, col[p]] += 1
    exact = tuple({f"log({p})": Fraction(1)} for p in primes)
    relations = tuple({f"log({p})": Fraction(int(c)) for p, c in zip(primes, row) if c} for row in rows)
    return BasisDecomposition(
        basis=tuple(float(np.log(p)) for p in primes),
        matrix=rows,
        values=tuple(np.log(np.arange(1, N + 1, dtype=float))),
        mode="symbolic-exact",
        exact_basis=exact,
        relations=relations,
    )
