import random

import pytest
from oracles import TableGroup

from pcgroups import subgroups as sg
from pcgroups import towers as tw
from pcgroups.catalog import invariant_signature
from pcgroups.towers import TowerSpec, TowerSpecError, build_tower

# ---------------------------------------------------------------- explicit models


def _zw_mul(u, v):
    a, b = u
    c, d = v
    return (a * c - b * d, a * d + b * c - b * d)


def maxclass_model(n):
    """(e, beta) = w^e beta in <w> x| Z[omega] / 3^n, with w^-1 beta w = omega beta."""
    m = 3**n

    def red(z):
        return (z[0] % m, z[1] % m)

    def omega_pow(f, z):
        for _ in range(f % 3):
            z = _zw_mul((0, 1), z)
        return red(z)

    def mul(x, y):
        (e, beta), (f, gamma) = x, y
        b = omega_pow(f, beta)
        return ((e + f) % 3, red((b[0] + gamma[0], b[1] + gamma[1])))

    gens = [(1, (0, 0))]
    pi_t = (1, 0)
    for _ in range(2 * n):
        gens.append((0, red(pi_t)))
        pi_t = _zw_mul(pi_t, (-1, 1))
    return mul, (0, (0, 0)), gens


def metabelian_model(p, top, mods, lam):
    """(t, u) = y^t u with y of order p^top acting on prod Z/mods[c] by lam."""

    def mul(x, y):
        (t, u), (s, w) = x, y
        return ((t + s) % p**top if top else 0,
                tuple((pow(lam, s, m) * a + b) % m for a, b, m in zip(u, w, mods)))

    return mul


def model_for(spec):
    p, n = spec.p, spec.n
    if spec.family == "maxclass3":
        return maxclass_model(n)
    lam = spec.sign * (1 if spec.s is None else 1 + p**spec.s)
    if spec.family == "abelian":
        top, lens = 0, [n] * spec.d
    elif spec.family == "scalar":
        top, lens = n, [n] * (spec.d - 1)
    else:
        top, lens = n, list(spec.exponents)
    mods = [p**e for e in lens]
    mul = metabelian_model(p, top, mods, lam)
    ident = (0, tuple(0 for _ in mods))
    chains = ([top] if top else []) + lens
    gens = []
    for level in range(max(chains)):
        for c, ln in enumerate(chains):
            if level < ln:
                if top and c == 0:
                    gens.append((p**level, ident[1]))
                else:
                    ci = c - (1 if top else 0)
                    u = [0] * len(mods)
                    u[ci] = p**level
                    gens.append((0, tuple(u)))
    return mul, ident, gens


def check_against_model(spec):
    q = build_tower(spec)
    G = q.group
    mul, ident, gens = model_for(spec)
    assert len(gens) == G.n

    def phi(v):
        r = ident
        for g, e in zip(gens, v):
            for _ in range(e):
                r = mul(r, g)
        return r

    elems = list(G.enumerate_elements())
    images = {phi(v) for v in elems}
    assert len(images) == G.order
    rng = random.Random(0)
    for _ in range(400):
        a, b = rng.choice(elems), rng.choice(elems)
        assert phi(G.multiply(a, b)) == mul(phi(a), phi(b))


@pytest.mark.parametrize("text", [
    "abelian:3:2:-:+:2", "abelian:5:1:-:+:3", "scalar:3:2:1:+:3", "scalar:3:3:1:+:2",
    "scalar:3:2:2:+:3", "scalar:5:2:1:+:2", "scalar:2:2:2:+:3", "scalar:2:3:-:-:2",
    "scalar:2:2:2:-:3", "maxclass3:3:-:-:+:1", "maxclass3:3:-:-:+:2", "maxclass3:3:-:-:+:3",
    "hered:3:2,1:1:+:1", "hered:3:3,1:2:+:1", "hered:5:2:1:+:2",
])
def test_presentations_match_models(text):
    check_against_model(TowerSpec.parse(text))


# ---------------------------------------------------------------- tower spec grammar


def test_spec_roundtrip():
    for text in ["tower abelian:3:2:-:+:2", "tower scalar:3:2:1:+:3", "tower maxclass3:3:-:-:+:2",
                 "tower hered:3:2,1:1:+:1", "tower scalar:2:3:-:-:2"]:
        assert TowerSpec.parse(text).format() == text


@pytest.mark.parametrize("bad", [
    "scalar:2:2:1:+:2", "maxclass3:5:-:-:+:1", "scalar:3:2:1:-:2", "hered:3:3:1:+:1",
    "abelian:3:2:-:+:0", "bogus:3:2:-:+:1", "scalar:3:2:1:+", "scalar:3:x:1:+:2", "scalar:3:2:1:*:2",
])
def test_spec_errors(bad):
    with pytest.raises(TowerSpecError):
        TowerSpec.parse(bad)


# ---------------------------------------------------------------- examples


def test_abelian_level_two():
    q = build_tower(TowerSpec.parse("abelian:3:2:-:+:2"))
    assert q.group.order == 81 and sg.is_abelian(q.group)
    assert sg.agemo(q.group).order == 9


def test_maxclass_level_one_is_heisenberg(bundled):
    q = build_tower(TowerSpec.parse("maxclass3:3:-:-:+:1"))
    # the five groups of order 27 have distinct signatures
    assert invariant_signature(q.group) == invariant_signature(bundled["heisenberg3"].group)
    assert sg.min_generators(q.group) == 2 and not sg.is_powerful(q.group)


def test_scalar_powerful_at_every_level():
    for n in (1, 2, 3):
        q = build_tower(TowerSpec.parse(f"scalar:3:2:1:+:{n}"))
        assert q.group.order == 3 ** (2 * n)
        assert sg.is_powerful(q.group)


def test_maxclass_never_powerful():
    for n in (1, 2, 3):
        q = build_tower(TowerSpec.parse(f"maxclass3:3:-:-:+:{n}"))
        assert q.group.order == 3 ** (2 * n + 1)
        assert not sg.is_powerful(q.group)
        assert sg.min_generators(q.group) == 2


def test_p2_minus_one_not_powerful():
    q = build_tower(TowerSpec.parse("scalar:2:3:-:-:3"))
    assert not sg.is_powerful(q.group) and sg.min_generators(q.group) == 3


@pytest.mark.parametrize("text", ["abelian:3:2:-:+:3", "scalar:3:2:1:+:3", "maxclass3:3:-:-:+:2",
                                  "hered:3:2,1:1:+:2", "scalar:5:3:1:+:2"])
def test_d_stability(text):
    spec = TowerSpec.parse(text)
    for n in range(1, spec.n + 1):
        assert tw.d_stability_check(build_tower(spec.at_level(n))).status == "pass"


@pytest.mark.parametrize("text", ["abelian:3:2:-:+:3", "scalar:3:2:1:+:3", "maxclass3:3:-:-:+:2",
                                  "scalar:5:2:1:+:2", "scalar:2:2:-:-:2"])
def test_coherence(text):
    r = tw.coherence_check(TowerSpec.parse(text))
    assert r.status == "pass"


def test_omega1_examples():
    rows = tw.omega1_tower_check(TowerSpec.parse("abelian:3:2:-:+:3"), 3)
    assert [r.status for r in rows] == ["pass", "pass"]
    rows = tw.omega1_tower_check(TowerSpec.parse("scalar:3:3:1:+:3"), 3)
    assert rows[-1].detail["omega1_log"] == 3 and rows[-1].status == "pass"
    rows = tw.omega1_tower_check(TowerSpec.parse("maxclass3:3:-:-:+:2"), 2)
    assert rows[0].status == "expected-negative" and rows[0].detail["omega1_log"] > 2


def test_omega1_brute_force():
    q = build_tower(TowerSpec.parse("scalar:3:2:1:+:2"))
    T = TableGroup(q.group)
    assert T.as_set(sg.omega1(q.group)) == T.omega1(T.all)
    assert T.as_set(q.power_layer) == T.omega1(T.all)


def test_coset_power():
    r = tw.coset_power_check(build_tower(TowerSpec.parse("abelian:3:2:-:+:2")))
    assert r.status == "pass" and r.detail["power_image"] == 9
    r = tw.coset_power_check(build_tower(TowerSpec.parse("scalar:3:2:1:+:3")))
    assert r.status == "pass" and r.detail["exhaustive"]
    r = tw.coset_power_check(build_tower(TowerSpec.parse("maxclass3:3:-:-:+:2")))
    assert r.status == "expected-negative"


def test_coset_power_brute_force():
    # every coset xN: {(xu)^3 : u in N} against x^3 N^3, from the Cayley table
    q = build_tower(TowerSpec.parse("scalar:3:2:1:+:2"))
    T = TableGroup(q.group)
    N = T.as_set(q.marked)
    Np = T.agemo(N)
    for x in T.all:
        got = {T.power(T.mul[x][u], 3) for u in N}
        assert got == {T.mul[T.power(x, 3)][v] for v in Np}


def test_lemma25():
    r = tw.lemma25_check(build_tower(TowerSpec.parse("scalar:3:2:1:+:3")))
    assert r.status == "pass" and r.detail["witness_exponent"] == 3
    r = tw.lemma25_check(build_tower(TowerSpec.parse("abelian:3:1:-:+:2")))
    assert r.status == "pass"
    r = tw.lemma25_check(build_tower(TowerSpec.parse("maxclass3:3:-:-:+:2")))
    assert r.status == "expected-negative" and r.detail["witness_exponent"] is None
    q = build_tower(TowerSpec.parse("abelian:3:2:-:+:2"))
    with pytest.raises(ValueError):
        tw.lemma25_check(q, q.group.gen(2))


@pytest.mark.parametrize("text", ["abelian:3:2:-:+:4", "scalar:3:2:1:+:4"])
def test_constant_d(text):
    r = tw.constant_d_check(build_tower(TowerSpec.parse(text)), 2)
    assert r.status == "pass" and r.detail["d_spectrum"] == {"2": r.detail["subgroups"]}


def test_constant_d_requires_margin():
    with pytest.raises(ValueError):
        tw.constant_d_check(build_tower(TowerSpec.parse("abelian:3:2:-:+:3")), 2)


def test_constant_d_subgroups_brute_force():
    # subgroups of index <= 9 containing the marker, counted from the Cayley table
    q = build_tower(TowerSpec.parse("scalar:3:2:1:+:2"))
    T = TableGroup(q.group)
    marker = T.as_set(q.kernel_to(1))
    want = {H for H in T.subgroups if marker <= H and len(H) * 9 >= len(T.all)}
    got = {T.as_set(H) for H in sg.all_subgroups(q.group, containing=q.kernel_to(1), max_index_exp=2)}
    assert got == want


def test_hereditary():
    assert tw.hereditary_check(build_tower(TowerSpec.parse("hered:3:2,1:1:+:1"))).status == "pass"
    assert tw.hereditary_check(build_tower(TowerSpec.parse("scalar:3:2:1:+:2"))).status == "pass"
    r = tw.hereditary_check(build_tower(TowerSpec.parse("maxclass3:3:-:-:+:1")))
    assert r.status == "expected-negative"


def test_profile_uniform_segment():
    for n in (2, 3):
        r = tw.profile_check(build_tower(TowerSpec.parse(f"scalar:3:2:1:+:{n}")))
        assert r.status == "pass" and r.detail["p_series_indices"] == [2] * n


def test_run_checks_all_known_outcomes():
    rows = tw.run_checks(TowerSpec.parse("scalar:3:2:1:+:3"))
    assert all(r.status in ("pass", "skipped") for r in rows)
    rows = tw.run_checks(TowerSpec.parse("maxclass3:3:-:-:+:2"))
    assert not any(r.status == "fail" for r in rows)
    assert any(r.status == "expected-negative" for r in rows)


def test_kernel_chain():
    q = build_tower(TowerSpec.parse("scalar:3:2:1:+:3"))
    orders = [q.kernel_to(j).log_order for j in range(4)]
    assert orders == [6, 4, 2, 0]
    for j in range(3):
        assert q.kernel_to(j).is_normal


def test_coherence_for_torsion_families_reports_kernel():
    r = tw.coherence_check(TowerSpec.parse("hered:3:2,1:1:+:2"))
    assert r.status == "pass" and r.detail["kernel_log"] == 1


def test_minus_one_action_at_p2_is_expected_negative():
    # (y a)^2 = y^2 for every a, so the coset y N squares to a single element
    r = tw.coset_power_check(build_tower(TowerSpec.parse("scalar:2:2:-:-:3")))
    assert r.status == "expected-negative" and r.detail["failing_cosets"] == 1


def test_torsion_family_holding_is_not_a_failure():
    r = tw.coset_power_check(build_tower(TowerSpec.parse("maxclass3:3:-:-:+:1")))
    assert r.status == "pass"
