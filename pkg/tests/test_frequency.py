import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_lab.errors import (DirichletLabError, InvalidFrequency, InvalidParameter, InvalidRelations)
from dirichlet_lab.frequency import (Frequency, check_condition, decompose_basis, l_value, ordinary_decomposition,
                                     parse_frequency, primes_up_to, smallest_prime_factors)

# Gap infima frozen from an independent 30-digit mpmath scan over n < N;
# regenerate with tests/oracles/gap_infima.py.
MP_BC_LOG_1000 = 0.693147180559945309417232121458179
MP_LC_SQRTLOG_4000 = 2.14860623198392119079700866732042
MP_LC_LOGLOG_4000 = 0.120547850506424498952999493535981
MP_BC_SQRTLOG_4000 = 0.00103128662620012353025741622173088


def test_rules_and_indexing():
    assert parse_frequency("log(n)").values(3).tolist() == [0.0, math.log(2), math.log(3)]
    assert parse_frequency("n").values(4).tolist() == [0.0, 1.0, 2.0, 3.0]
    assert parse_frequency("log(n)").value(5) == pytest.approx(math.log(5))
    assert parse_frequency(" sqrt(log(n)) ").name == "sqrt(log(n))"


def test_file_frequency(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("0 0.5\n1.5\n")
    f = parse_frequency(f"file:{p}")
    assert f.values(3).tolist() == [0.0, 0.5, 1.5]


@pytest.mark.parametrize("bad", ["exp(n)", "", "file:/nonexistent/path"])
def test_unknown_frequency(bad):
    with pytest.raises(InvalidFrequency):
        parse_frequency(bad)


@pytest.mark.parametrize("entries", [[0.0, 0.0, 1.0], [1.0, 0.5], [-1.0, 2.0]])
def test_validation_rejects(entries):
    with pytest.raises(InvalidFrequency):
        Frequency("bad", entries=np.array(entries)).validated(len(entries))


def test_bc_log_n():
    r = check_condition(parse_frequency("log(n)"), "bc", 1000, l=1, delta=0.1)
    assert r.witness == pytest.approx(MP_BC_LOG_1000, rel=1e-12)
    assert r.argmin == 1
    assert r.verdict == "evidence-holds"


def test_bc_n_gaps_one():
    r = check_condition(parse_frequency("n"), "bc", 100, l=1, delta=0.1)
    assert r.witness == 1.0 and r.verdict == "evidence-holds"


def test_lc_oracles():
    r = check_condition(parse_frequency("sqrt(log(n))"), "lc", 4000, delta=1)
    assert r.witness == pytest.approx(MP_LC_SQRTLOG_4000, rel=1e-12)
    r = check_condition(parse_frequency("log(log(n))"), "lc", 4000, delta=1)
    assert r.witness == pytest.approx(MP_LC_LOGLOG_4000, rel=1e-9)
    r = check_condition(parse_frequency("sqrt(log(n))"), "bc", 4000, l=1, delta=0.1)
    assert r.witness == pytest.approx(MP_BC_SQRTLOG_4000, rel=1e-9)


def test_bc_fails_sqrt_log_trend_decreasing():
    r = check_condition(parse_frequency("sqrt(log(n))"), "bc", 10**6, l=1, delta=0.1)
    vals = [v for _, v in r.trend]
    assert r.verdict == "evidence-fails"
    assert all(b < a for a, b in zip(vals[-4:], vals[-3:]))


def test_condition_arguments():
    f = parse_frequency("n")
    with pytest.raises(InvalidParameter):
        check_condition(f, "bc", 100, l=1)
    with pytest.raises(InvalidParameter):
        check_condition(f, "xx", 100)
    with pytest.raises(DirichletLabError):
        check_condition(f, "lc", 1, delta=1)


def test_l_values():
    assert l_value(parse_frequency("log(n)"), 10**5).limit == 1.0
    r = l_value(parse_frequency("n"), 10**5)
    assert r.verdict == "evidence-holds" and r.limit < 1e-3
    tail = [v for _, v in r.trend][-5:]
    assert all(b < a for a, b in zip(tail, tail[1:]))
    r = l_value(parse_frequency("sqrt(log(n))"), 10**6)
    assert r.verdict == "evidence-fails" and r.limit == math.inf


def test_basis_examples():
    d = decompose_basis([1, 2**0.5, 1 + 2**0.5], relations=[{"1": 1}, {"r": 1}, {"1": 1, "r": 1}],
                        irrationals={"1": 1.0, "r": 2**0.5})
    assert d.basis == (1.0, 2**0.5)
    assert d.matrix.tolist() == [[1, 0], [0, 1], [1, 1]]
    d = decompose_basis([2**0.5], relations=[{"r": 1}], irrationals={"r": 2**0.5})
    assert d.matrix.tolist() == [[1]]
    d = decompose_basis([2**0.5, 2**0.5 / 2], relations=[{"r": 1}, {"r": "1/2"}], irrationals={"r": 2**0.5})
    assert d.basis == pytest.approx((2**0.5 / 2,)) and d.matrix.tolist() == [[2], [1]]


def test_basis_numeric_pslq():
    d = decompose_basis([2**0.5, 2**0.5 / 2, 3**0.5], tol=1e-12)
    assert d.matrix.tolist() == [[2, 0], [1, 0], [0, 1]]
    assert d.mode == "numeric"
    assert np.allclose(d.reconstruct(), d.values)


def test_basis_relation_errors():
    with pytest.raises(InvalidRelations):
        decompose_basis([1.0], relations=[{"r": 1}], irrationals={})
    with pytest.raises(InvalidRelations):
        decompose_basis([1.5], relations=[{"r": 1}], irrationals={"r": 2**0.5})
    with pytest.raises(InvalidParameter):
        decompose_basis([1.0])


def test_ordinary_decomposition_prime_exponents():
    d = ordinary_decomposition(12)
    assert d.basis == pytest.approx(tuple(np.log([2, 3, 5, 7, 11])))
    assert d.matrix[11].tolist() == [2, 1, 0, 0, 0]  # 12 = 2^2 3
    assert np.allclose(d.reconstruct(), np.log(np.arange(1, 13)))


def test_sieves():
    assert primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    spf = smallest_prime_factors(30)
    assert [int(spf[n]) for n in (2, 9, 15, 29, 30)] == [2, 3, 3, 29, 2]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)).filter(lambda r: r != (0, 0)),
                min_size=1, max_size=6))
def test_symbolic_decomposition_reconstructs(rows):
    # values a + b*sqrt2 with integer a, b >= 0, declared exactly
    rels = [{"1": abs(a), "r": abs(b)} for a, b in rows]
    vals = [abs(a) + abs(b) * 2**0.5 for a, b in rows]
    d = decompose_basis(vals, relations=rels, irrationals={"1": 1.0, "r": 2**0.5})
    assert d.matrix.dtype.kind == "i"
    assert np.allclose(d.matrix @ np.array(d.basis), vals, rtol=1e-12, atol=1e-12)
    assert d.P <= 2 and d.size == len(vals)
