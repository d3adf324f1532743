import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcgroups.limits import EnumerationCapExceeded, enumeration_cap
from pcgroups.pcp import (
    CollectionError,
    InconsistentPresentationError,
    PcGroup,
    PcPresentation,
    PcpSyntaxError,
    _Collector,
    check_consistency,
    format_pcp,
    parse_catalog,
    parse_pcp,
)

HEIS = """
group heisenberg3 p=3 n=3
comm 2 1: 3^1
"""

# exponent-9 extraspecial group with a spurious relation: not a group of order 27
CORRUPT = """
group corrupted p=3 n=3
comm 2 1: 3^1
comm 3 1: 2^1
"""


def unitriangular(e12, e23, e13):
    return np.array([[1, e12, e13], [0, 1, e23], [0, 0, 1]], dtype=np.int64)


def test_heisenberg_matches_unitriangular_matrices():
    G = PcGroup.from_text(HEIS)
    x = unitriangular(1, 0, 0)
    y = unitriangular(0, 1, 0)
    inv = lambda m: np.round(np.linalg.inv(m)).astype(np.int64) % 3  # noqa: E731
    z = inv(y) @ inv(x) @ y @ x % 3  # [g2, g1] in the matrix model

    def phi(v):
        m = np.eye(3, dtype=np.int64)
        for g, e in zip((x, y, z), v):
            m = m @ np.linalg.matrix_power(g, e) % 3
        return m % 3

    elems = list(G.enumerate_elements())
    images = {phi(v).tobytes() for v in elems}
    assert len(images) == 27
    for a, b in itertools.product(elems, repeat=2):
        assert np.array_equal(phi(G.multiply(a, b)), phi(a) @ phi(b) % 3)


def test_heisenberg_collect_g2_g1():
    # g2 g1 = g1 g2 [g2, g1] = g1 g2 g3
    G = PcGroup.from_text(HEIS)
    assert G.collect([(2, 1), (1, 1)]) == (1, 1, 1)


def test_cyclic_nine():
    G = PcGroup.from_text("group c9 p=3 n=2\npow 1: 2\n")
    assert G.collect([(1, 4)]) == (1, 1)
    assert G.collect([(1, 3)]) == (0, 1)
    assert G.element_order(G.gen(1)) == 9
    assert G.power(G.gen(1), -1) == (2, 2)


def test_corrupted_heisenberg_inconsistent():
    pres = parse_pcp(CORRUPT)
    report = check_consistency(pres)
    assert not report.consistent
    with pytest.raises(InconsistentPresentationError):
        PcGroup(pres)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(PcpSyntaxError) as exc:
        parse_pcp("group g p=3 n=3\ncomm 1 2: 3\n")
    assert exc.value.lineno == 2
    with pytest.raises(PcpSyntaxError):
        parse_pcp("group g p=3 n=3\npow 2: 1\n")
    with pytest.raises(PcpSyntaxError):
        parse_pcp("group g p=3 n=3\npow 1: 2^3\n")
    with pytest.raises(PcpSyntaxError):
        parse_pcp("group g p=4 n=3\n")
    with pytest.raises(PcpSyntaxError):
        parse_pcp("group g p=3 n=2\npow 1: 2\npow 1: 2\n")


def test_empty_catalog_text():
    assert parse_catalog("# nothing here\n") == []


def test_format_roundtrip():
    pres = parse_pcp(HEIS)
    assert parse_pcp(format_pcp(pres)) == pres


def test_inverse_and_identity():
    G = PcGroup.from_text(HEIS)
    for a in G.enumerate_elements():
        assert G.is_identity(G.multiply(a, G.inverse(a)))
        assert G.is_identity(G.multiply(G.inverse(a), a))


def test_enumeration_cap():
    G = PcGroup(PcPresentation(5, 11))
    with pytest.raises(EnumerationCapExceeded):
        list(G.enumerate_elements())
    with enumeration_cap(20):
        with pytest.raises(EnumerationCapExceeded):
            list(PcGroup.from_text(HEIS).enumerate_elements())


def test_pickle_roundtrip():
    import pickle

    G = PcGroup.from_text(HEIS)
    H = pickle.loads(pickle.dumps(G))
    assert H.multiply((0, 1, 0), (1, 0, 0)) == (1, 1, 1)


def _word(draw, gens, p):
    return tuple((g, draw(st.integers(0, p - 1))) for g in gens if draw(st.booleans()))


@st.composite
def presentations(draw):
    p = draw(st.sampled_from([2, 3]))
    n = draw(st.integers(1, 3))
    pows = {}
    comms = {}
    for i in range(1, n + 1):
        w = tuple(t for t in _word(draw, range(i + 1, n + 1), p) if t[1])
        if w:
            pows[i] = w
        for j in range(i + 1, n + 1):
            w = tuple(t for t in _word(draw, range(i + 1, n + 1), p) if t[1])
            if w:
                comms[(j, i)] = w
    return PcPresentation(p, n, pows, comms)


@settings(max_examples=60, deadline=None)
@given(presentations())
def test_consistency_iff_associative(pres):
    c = _Collector(pres)
    elems = list(itertools.product(range(pres.p), repeat=pres.n))
    try:
        assoc = all(
            c.mul(c.mul(a, b), d) == c.mul(a, c.mul(b, d))
            for a, b, d in itertools.product(elems, repeat=3)
        )
    except CollectionError:
        assoc = False
    assert assoc == check_consistency(pres).consistent
