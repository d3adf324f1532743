import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcgroups.limits import BudgetExceeded
from pcgroups.modpk import (
    ModPkMatrix,
    NonUnitError,
    RkElement,
    RMatrix,
    gl_congruence_layer,
    rank_mod_p,
    snf,
    torsion_proxy_check,
    valuation,
)


def check_snf(M):
    res = snf(M)
    D = res.U @ M @ res.V
    assert D == res.D
    off = D.a.copy()
    np.fill_diagonal(off, 0)
    assert not off.any()
    diag = [int(D.a[i, i]) for i in range(min(M.shape))]
    for e, x in zip(res.exponents, diag):
        assert x == (0 if e >= M.k else M.p**e)
    assert list(res.exponents) == sorted(res.exponents)
    assert res.U.is_invertible() and res.V.is_invertible()
    return res


def test_snf_examples():
    assert snf(ModPkMatrix.identity(3, 3, 4)).divisors == (1, 1, 1)
    assert snf(ModPkMatrix(np.diag([1, 3, 9]), 3, 4)).exponents == (0, 1, 2)
    ones = check_snf(ModPkMatrix(np.ones((3, 3)), 3, 4))
    assert ones.divisors == (1, 0, 0)


@pytest.mark.parametrize("p,k", [(3, 4), (5, 3)])
def test_snf_random(p, k):
    rng = np.random.default_rng(p * 100 + k)
    for t in range(500):
        rows, cols = rng.integers(1, 5, size=2)
        a = rng.integers(0, p**k, size=(rows, cols))
        # bias towards low valuations so that every exponent shows up
        a *= p ** rng.integers(0, k, size=(rows, cols)) if t % 2 else 1
        check_snf(ModPkMatrix(a, p, k))


@pytest.mark.parametrize("p,k", [(3, 4), (5, 3)])
def test_snf_invariance(p, k):
    rng = np.random.default_rng(7)
    for _ in range(100):
        M = ModPkMatrix(rng.integers(0, p**k, size=(3, 3)) * p ** rng.integers(0, 2, size=(3, 3)), p, k)
        P = ModPkMatrix.random_invertible(3, p, k, rng)
        Q = ModPkMatrix.random_invertible(3, p, k, rng)
        assert sorted(snf(P @ M @ Q).exponents) == sorted(snf(M).exponents)


def image_profile(M):
    """|p^j * image| for j = 0..k, by enumerating all input vectors."""
    p, k = M.p, M.k
    n = M.shape[1]
    img = {tuple(M.a @ np.array(v) % M.modulus) for v in itertools.product(range(M.modulus), repeat=n)}
    return [len({tuple(p**j * np.array(v) % M.modulus) for v in img}) for j in range(k + 1)]


def predicted_profile(exponents, p, k):
    # the image is a sum of cyclic groups of order p^(k - a)
    return [int(np.prod([p ** max(k - a - j, 0) for a in exponents])) for j in range(k + 1)]


def test_snf_against_image_enumeration():
    rng = np.random.default_rng(11)
    for p, k, n in [(3, 2, 3), (3, 4, 2), (5, 2, 2)]:
        for _ in range(25):
            M = ModPkMatrix(rng.integers(0, p**k, size=(n, n)) * p ** rng.integers(0, 2, size=(n, n)), p, k)
            assert image_profile(M) == predicted_profile(snf(M).exponents, p, k)


def test_inverse_and_rank():
    rng = np.random.default_rng(3)
    for _ in range(50):
        M = ModPkMatrix.random_invertible(4, 5, 3, rng)
        assert M @ M.inverse() == ModPkMatrix.identity(4, 5, 3)
    assert rank_mod_p(ModPkMatrix(np.ones((3, 3)), 3, 4)) == 1
    with pytest.raises(ZeroDivisionError):
        ModPkMatrix(np.diag([1, 3]), 3, 2).inverse()


# ---------------------------------------------------------------- R_k


def as_matrix(z):
    # a + b x acting on the basis (1, x) with x^2 = -1 - x
    m = 3**z.k
    return np.array([[z.a, -z.b], [z.b, z.a - z.b]], dtype=np.int64) % m


def test_pi_squared():
    pi = RkElement.pi(2)
    assert pi == RkElement(-1, 1, 2)
    assert pi * pi == RkElement(0, 6, 2)
    assert pi * pi == -3 * RkElement.x(2)


def test_valuations():
    k = 4
    assert RkElement.of(3, k).valuation() == 2
    assert RkElement.pi(k).valuation() == 1
    assert RkElement.x(k).valuation() == 0
    assert RkElement.of(0, k).valuation() == 2 * k
    assert RkElement.of(3, k).valuation() == 2 * RkElement.pi(k).valuation()


def test_inverse_of_x():
    x = RkElement.x(3)
    assert x.inverse() == RkElement(-1, -1, 3)
    with pytest.raises(NonUnitError):
        RkElement.pi(3).inverse()


elements = st.builds(RkElement, st.integers(0, 80), st.integers(0, 80), st.just(4))


@settings(max_examples=300, deadline=None)
@given(elements, elements)
def test_ring_ops_match_matrix_model(u, v):
    m = 81
    assert np.array_equal(as_matrix(u * v), as_matrix(u) @ as_matrix(v) % m)
    assert np.array_equal(as_matrix(u + v), (as_matrix(u) + as_matrix(v)) % m)
    if u.is_unit():
        assert u * u.inverse() == RkElement(1, 0, 4)


@settings(max_examples=300, deadline=None)
@given(elements)
def test_valuation_is_norm_valuation(u):
    # v_pi(u) = v_3(N(u)) while the norm is resolved at this precision
    norm = (u.a * u.a - u.a * u.b + u.b * u.b) % 81
    v = u.valuation()
    if v < 4:
        assert valuation(norm, 3, 4) == v


def test_rmatrix_inverse():
    k = 3
    X = RMatrix([[RkElement(1, 1, k), RkElement.pi(k)], [RkElement.of(3, k), RkElement(2, 0, k)]])
    assert X @ X.inverse() == RMatrix.identity(2, k)


# ---------------------------------------------------------------- congruence layers


def test_layer_examples():
    r = gl_congruence_layer(1, 2, 1, 2)
    assert (r.order, r.elementary_abelian) == (3, True)
    r = gl_congruence_layer(2, 2, 1, 2)
    assert (r.order, r.elementary_abelian) == (81, True)


def test_layer_two_four_is_additive():
    r = gl_congruence_layer(1, 3, 2, 4)
    # (1 + pi^2 a)(1 + pi^2 b) = 1 + pi^2 (a + b) mod pi^4, so the layer is (R / pi^2, +)
    assert r.order == 9 and r.abelian and r.exponent == 3 and r.closed


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("i", [1, 2, 3])
def test_layer_structure(m, i):
    r = gl_congruence_layer(m, 2, i, i + 1)
    assert r.elementary_abelian and r.order == 3 ** (m * m)


def test_layer_precision_validation():
    with pytest.raises(ValueError):
        gl_congruence_layer(1, 2, 1, 5)
    with pytest.raises(BudgetExceeded):
        gl_congruence_layer(3, 4, 1, 3)


def test_torsion_proxy():
    rep = torsion_proxy_check(1, 3)
    assert rep.ok and rep.checked == 3**4
    assert RMatrix.identity(1, 3).congruence_level() == 6
    x = RMatrix([[RkElement.x(3)]])
    assert x @ x @ x == RMatrix.identity(1, 3)
    assert x.congruence_level() == 1  # outside the tested domain
    with pytest.raises(ValueError):
        torsion_proxy_check(1, 2)
