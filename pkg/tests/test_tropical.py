import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from forest_spectra import forest_calculus as fc
from forest_spectra.errors import DegenerateSlopes, InputError, NegationAttempted, UnderflowWarning
from forest_spectra.tropical_asymptotics import (
    INF,
    AsymptoticScalar,
    ExponentialMarkovInput,
    eigenvalue_asymptotics,
    eigenvalues_at_epsilon,
    extreme_forests,
    newton_polygon,
    realize_at_epsilon,
    tropical_char_poly,
    tropical_spectrum,
    validate_asymptotics,
)

ORDERS = {(0, 1): 4, (0, 2): 4, (1, 0): 3, (1, 2): 2, (2, 1): 1, (2, 0): 3}
KILL = {0: 5, 1: 5, 2: 4}


def example_input(m=None, kill_m=None):
    m = m or {}
    kill_m = kill_m or {}
    arcs = {a: (v, m.get(a, 1)) for a, v in ORDERS.items()}
    killing = {i: (v, kill_m.get(i, 1)) for i, v in KILL.items()}
    return ExponentialMarkovInput(3, arcs, killing)


# distinct prefactors so each one is identifiable
M = {(0, 1): Fraction(2), (0, 2): Fraction(3), (1, 0): Fraction(5), (1, 2): Fraction(7),
     (2, 1): Fraction(11), (2, 0): Fraction(13)}
MK = {0: Fraction(17), 1: Fraction(19), 2: Fraction(23)}


asym = st.one_of(
    st.just(AsymptoticScalar.zero()),
    st.builds(AsymptoticScalar,
              st.fractions(min_value=0, max_value=10, max_denominator=6),
              st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=10)),
)


@given(asym, asym, asym)
def test_semiring_laws(a, b, c):
    zero, one = AsymptoticScalar.zero(), AsymptoticScalar.one()
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + zero == a and a * one == a
    assert a * zero == zero


def test_scalar_rules():
    a = AsymptoticScalar(2, Fraction(3))
    b = AsymptoticScalar(2, Fraction(4))
    assert a + b == AsymptoticScalar(2, 7)
    assert a + AsymptoticScalar(5, 100) == a
    assert a * b == AsymptoticScalar(4, 12)
    with pytest.raises(NegationAttempted):
        -a
    with pytest.raises(NegationAttempted):
        a - b
    with pytest.raises(ValueError):
        AsymptoticScalar(1, 0)


def test_char_poly_orders_of_example():
    c = tropical_char_poly(example_input(M, MK))
    assert [x.order for x in c] == [9, 4, 1, 0]
    assert c[2].prefactor == M[(2, 1)]
    assert c[1].prefactor == M[(2, 1)] * M[(1, 0)]
    assert c[0].prefactor == M[(2, 1)] * M[(1, 0)] * MK[0]
    assert c[3] == AsymptoticScalar.one()


def test_single_state():
    inp = ExponentialMarkovInput(1, {}, {0: (Fraction(7, 2), Fraction(3))})
    c = tropical_char_poly(inp)
    assert c == [AsymptoticScalar(Fraction(7, 2), 3), AsymptoticScalar.one()]
    spectrum = eigenvalue_asymptotics(c)
    assert spectrum.eigenvalues[0].exponent == Fraction(7, 2)
    assert spectrum.eigenvalues[0].Lambda == -3


def test_extreme_forests_witness():
    best = extreme_forests(example_input())
    assert [b[0] for b in best] == [9, 4, 1, 0]
    assert [f.arcs for f in best[1][2]] == [[(1, 0), (2, 1)]]
    assert [f.arcs for f in best[0][2]] == [[(0, 3), (1, 0), (2, 1)]]


@st.composite
def markov_inputs(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    arcs, killing = {}, {}
    orders = st.integers(0, 4)
    prefs = st.integers(1, 3)
    for i in range(n):
        for j in range(n):
            if i != j and draw(st.booleans()):
                arcs[(i, j)] = (draw(orders), draw(prefs))
        if draw(st.booleans()):
            killing[i] = (draw(orders), draw(prefs))
    return ExponentialMarkovInput(n, arcs, killing)


@settings(max_examples=80, deadline=None)
@given(markov_inputs())
def test_generic_path_matches_explicit_minimum(inp):
    generic = tropical_char_poly(inp)
    for k, (order, pref, _) in enumerate(extreme_forests(inp)):
        if order == INF:
            assert generic[k].is_zero()
        else:
            assert generic[k] == AsymptoticScalar(order, pref)
    assert generic[-1] == AsymptoticScalar.one()


@settings(max_examples=40, deadline=None)
@given(markov_inputs(max_n=4))
def test_hull_slopes_nonincreasing(inp):
    poly = newton_polygon([c.order for c in tropical_char_poly(inp)])
    finite = [e for e in poly.exponents if e != INF]
    assert all(a >= b for a, b in zip(finite, finite[1:]))


def test_newton_polygon_examples():
    p = newton_polygon([9, 4, 1, 0])
    assert p.exponents == (5, 3, 1) and p.convexity_ok
    p = newton_polygon([2, 1, 0])
    assert p.exponents == (1, 1) and p.convexity_ok
    assert p.segments == ((1, 2),)
    p = newton_polygon([1, 5, 0])
    assert [k for k, _ in p.vertices] == [0, 2]
    assert not p.convexity_ok
    assert p.exponents == (Fraction(1, 2), Fraction(1, 2))
    p = newton_polygon([INF, 2, 0])
    assert p.segments[0] == (INF, 1) and not p.convexity_ok
    with pytest.raises(InputError):
        newton_polygon([1, 2])


def test_eigenvalue_asymptotics_example():
    spectrum = tropical_spectrum(example_input(M, MK))
    assert [e.exponent for e in spectrum.eigenvalues] == [5, 3, 1]
    assert [e.Lambda for e in spectrum.eigenvalues] == [-17, -5, -11]


def test_chain_matrix_same_asymptotics():
    # lower-bidiagonal chain: 3 -> 2 -> 1 -> killed
    chain = ExponentialMarkovInput(
        3, {(1, 0): (3, M[(1, 0)]), (2, 1): (1, M[(2, 1)])}, {0: (5, MK[0])})
    full = tropical_spectrum(example_input(M, MK))
    assert tropical_spectrum(chain).eigenvalues == full.eigenvalues


def test_degenerate_slopes():
    tie = ExponentialMarkovInput(2, {}, {0: (1, 1), 1: (1, 1)})
    with pytest.raises(DegenerateSlopes) as err:
        eigenvalue_asymptotics(tropical_char_poly(tie))
    assert err.value.segments == [(1, 2)]
    spectrum = tropical_spectrum(tie)
    assert spectrum.eigenvalues == () and spectrum.convexity_ok
    closed = ExponentialMarkovInput(2, {(0, 1): (1, 1), (1, 0): (2, 1)}, {})
    spectrum = tropical_spectrum(closed)
    assert not spectrum.convexity_ok and spectrum.segments[0] == (INF, 1)


def test_realize_row_sums_and_limits():
    inp = example_input(M, MK)
    eps = 0.3
    g = realize_at_epsilon(inp, eps)
    a = np.array(g.entries)
    for i, (v, m) in inp.killing.items():
        assert a[i].sum() == pytest.approx(-float(m) * math.exp(-v / eps), rel=1e-9)
    big = np.array(realize_at_epsilon(inp, 1e12).entries)
    for (i, j), (_, m) in inp.arcs.items():
        assert big[i, j] == pytest.approx(float(m))


def test_realize_underflow_warning():
    with pytest.warns(UnderflowWarning):
        realize_at_epsilon(example_input(), 1e-3)
    with pytest.raises(InputError):
        realize_at_epsilon(example_input(), 0)


def test_float_char_poly_orders_converge():
    inp = example_input()
    eps_list = [0.1, 0.05]
    ys = []
    for eps in eps_list:
        coeffs = fc.char_poly(realize_at_epsilon(inp, eps)).coeffs
        ys.append([-eps * math.log(c) for c in coeffs[:-1]])
    for k, v in enumerate([9, 4, 1]):
        y1, y2 = ys[0][k], ys[1][k]
        extrapolated = (eps_list[0] * y2 - eps_list[1] * y1) / (eps_list[0] - eps_list[1])
        assert extrapolated == pytest.approx(v, rel=0.05)


def test_forest_route_matches_dense_where_dense_is_accurate():
    inp = example_input(M, MK)
    forest = eigenvalues_at_epsilon(inp, 0.2)
    dense = eigenvalues_at_epsilon(inp, 0.2, method="dense")
    np.testing.assert_allclose(np.array(forest), np.array(dense), rtol=1e-6)


def test_validate_example_exponents():
    rows = validate_asymptotics(example_input(), [0.1, 0.05])
    assert [r.k for r in rows] == [1, 2, 3]
    for r, e in zip(rows, [5, 3, 1]):
        assert r.estimated_exponent == pytest.approx(e, rel=0.05)
        assert r.estimated_Lambda == pytest.approx(-1, rel=0.1)


def test_validate_prefactors_distinct_m():
    rows = validate_asymptotics(example_input(M, MK), [0.1, 0.04])
    for r, lam in zip(rows, [-17, -5, -11]):
        assert r.prefactor_rel_error < 0.1
        assert r.estimated_Lambda == pytest.approx(lam, rel=0.1)


def test_validate_single_state_exact():
    inp = ExponentialMarkovInput(1, {}, {0: (2, Fraction(3))})
    (row,) = validate_asymptotics(inp, [0.5, 0.25])
    assert row.estimated_exponent == pytest.approx(2, rel=1e-12)
    assert row.estimated_Lambda == pytest.approx(-3, rel=1e-12)


def test_validate_rejects_bad_eps():
    with pytest.raises(InputError):
        validate_asymptotics(example_input(), [0.1])
    with pytest.raises(InputError):
        validate_asymptotics(example_input(), [0.05, 0.1])


def test_eigenvector_limits():
    # rows of C are limits of right eigenvectors, columns of C' of left ones
    c_rows = [(1, 1, 1), (0, 1, 1), (0, 0, 1)]
    c_prime_cols = [(1, 0, 0), (-1, 1, 0), (0, -1, 1)]
    inp = example_input()
    eps = 0.05
    h = inp.augmented_at_epsilon(eps)
    lams = eigenvalues_at_epsilon(inp, eps)
    for k in range(3):
        v = fc.eigenvector_components(h, lams[k].real, k).components
        np.testing.assert_allclose(v, c_rows[k], atol=1e-6)
        u = fc.eigenvector_components(h, lams[k].real, k, transpose=True).components
        np.testing.assert_allclose(u, c_prime_cols[k], atol=1e-6)
