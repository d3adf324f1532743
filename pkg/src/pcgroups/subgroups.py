"""Subgroups via induced generating sequences, and the series and predicates built on them."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from .limits import BudgetExceeded, check_cap
from .pcp import Element, PcGroup

SUBGROUP_ORDER_LIMIT_EXP = 6
DEFAULT_MAX_SUBGROUPS = 10**6


def depth(x: Element) -> int:
    """Index of the first non-zero exponent; len(x) for the identity."""
    for i, e in enumerate(x):
        if e:
            return i
    return len(x)


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup held as a canonical induced generating sequence.

    ``igs`` is sorted by depth, every leading exponent is 1 and every entry
    has exponent 0 at the leading depths of the others, which makes it
    unique for the subgroup.
    """

    group: PcGroup
    igs: tuple[Element, ...]

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and other.group is self.group
            and other.igs == self.igs
        )

    def __hash__(self):
        return hash(self.igs)

    def __repr__(self):
        return f"Subgroup(order={self.group.p}^{self.log_order}, igs={list(self.igs)})"

    @property
    def log_order(self) -> int:
        return len(self.igs)

    @property
    def order(self) -> int:
        return self.group.p ** len(self.igs)

    @cached_property
    def depths(self) -> tuple[int, ...]:
        return tuple(depth(y) for y in self.igs)

    @cached_property
    def _by_depth(self) -> dict[int, Element]:
        return dict(zip(self.depths, self.igs))

    def sift(self, x: Element) -> Element:
        return _sift(self.group, self._by_depth, x)

    def __contains__(self, x: Element) -> bool:
        return not any(self.sift(x))

    def __le__(self, other: "Subgroup") -> bool:
        return all(y in other for y in self.igs)

    def __lt__(self, other: "Subgroup") -> bool:
        return self <= other and self.log_order < other.log_order

    def elements(self) -> list[Element]:
        check_cap(self.order)
        G = self.group
        elems = [G.identity]
        for y in reversed(self.igs):
            powers = [G.identity]
            for _ in range(G.p - 1):
                powers.append(G.multiply(powers[-1], y))
            elems = [G.multiply(a, h) for a in powers for h in elems]
        return elems

    def transversal(self) -> Iterator[Element]:
        """One representative per right coset xH, taken from the whole group."""
        free = [i for i in range(self.group.n) if i not in set(self.depths)]
        n, p = self.group.n, self.group.p
        for exps in itertools.product(range(p), repeat=len(free)):
            v = [0] * n
            for i, e in zip(free, exps):
                v[i] = e
            yield tuple(v)

    @cached_property
    def is_normal(self) -> bool:
        G = self.group
        return all(G.conjugate(y, g) in self for y in self.igs for g in G.gens)

    def normalizes(self, x: Element) -> bool:
        return all(self.group.conjugate(y, x) in self for y in self.igs)


def _sift(G: PcGroup, by_depth: dict[int, Element], x: Element) -> Element:
    p = G.p
    while True:
        d = depth(x)
        y = by_depth.get(d)
        if y is None:
            return x
        x = G.multiply(x, G.power(y, p - x[d]))


def _canonical(G: PcGroup, by_depth: dict[int, Element]) -> tuple[Element, ...]:
    ds = sorted(by_depth)
    out = []
    for a, d in enumerate(ds):
        y = by_depth[d]
        for d2 in ds[a + 1 :]:
            if y[d2]:
                y = G.multiply(y, G.power(by_depth[d2], G.p - y[d2]))
        out.append(y)
    return tuple(out)


def _close(G: PcGroup, gens: Iterable[Element], normalizers: Iterable[Element] = (),
           start: dict[int, Element] | None = None) -> Subgroup:
    p = G.p
    normalizers = list(normalizers)
    by_depth = dict(start or {})
    queue = list(gens)
    # Elements of `start` are already closed among themselves but not under
    # the normalizers.
    if normalizers:
        queue.extend(G.commutator(y, g) for y in by_depth.values() for g in normalizers)
    while queue:
        x = _sift(G, by_depth, queue.pop())
        d = depth(x)
        if d == G.n:
            continue
        x = G.power(x, pow(x[d], -1, p))
        others = list(by_depth.values())
        by_depth[d] = x
        queue.append(G.power(x, p))
        queue.extend(G.commutator(x, y) for y in others)
        queue.extend(G.commutator(x, g) for g in normalizers)
    return Subgroup(G, _canonical(G, by_depth))


def trivial_subgroup(G: PcGroup) -> Subgroup:
    return Subgroup(G, ())


def whole_group(G: PcGroup) -> Subgroup:
    return Subgroup(G, tuple(G.gens))


def _as_sub(H) -> Subgroup:
    return whole_group(H) if isinstance(H, PcGroup) else H


def subgroup_closure(G: PcGroup, gens: Iterable[Element]) -> Subgroup:
    return _close(G, gens)


def normal_closure(G: PcGroup, gens: Iterable[Element], within: Subgroup | None = None) -> Subgroup:
    """Normal closure of ``gens`` in ``within`` (default: the whole group)."""
    conj_by = within.igs if within is not None else G.gens
    return _close(G, gens, conj_by)


def join(*subs: Subgroup) -> Subgroup:
    G = subs[0].group
    return _close(G, [y for H in subs for y in H.igs])


def extend(base: Subgroup, extra: Iterable[Element]) -> Subgroup:
    """Subgroup generated by a subgroup and extra elements."""
    return _close(base.group, extra, start=base._by_depth)


# ---------------------------------------------------------------- derived objects


def power_subgroup(H, k: int) -> Subgroup:
    """<x^k : x in H>, by enumerating H."""
    H = _as_sub(H)
    G = H.group
    powers = {G.power(x, k) for x in H.elements()}
    powers.discard(G.identity)
    by_depth: dict[int, Element] = {}
    result = Subgroup(G, ())
    for x in sorted(powers):
        if any(_sift(G, by_depth, x)):
            result = _close(G, [x], start=by_depth)
            by_depth = dict(result._by_depth)
    return result


def agemo(H) -> Subgroup:
    """H^p, the subgroup generated by all p-th powers of elements of H."""
    H = _as_sub(H)
    return power_subgroup(H, H.group.p)


def commutator_subgroup(H: Subgroup, K: Subgroup) -> Subgroup:
    """[H, K] for subgroups normalised by each other."""
    G = H.group
    comms = [G.commutator(h, k) for h in H.igs for k in K.igs]
    return normal_closure(G, comms, within=join(H, K))


def derived_subgroup(H) -> Subgroup:
    H = _as_sub(H)
    G = H.group
    comms = [G.commutator(a, b) for a, b in itertools.combinations(H.igs, 2)]
    return normal_closure(G, comms, within=H)


@dataclass(frozen=True)
class SeriesProfile:
    subgroups: tuple[Subgroup, ...]
    indices: tuple[int, ...]

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(S.log_order for S in self.subgroups)


def _profile(terms: list[Subgroup]) -> SeriesProfile:
    idx = tuple(a.log_order - b.log_order for a, b in zip(terms, terms[1:]))
    return SeriesProfile(tuple(terms), idx)


def lower_central_series(H) -> SeriesProfile:
    """gamma_1 = H, gamma_{i+1} = [gamma_i, H], down to the trivial group."""
    H = _as_sub(H)
    G = H.group
    terms = [H]
    while terms[-1].log_order:
        cur = terms[-1]
        comms = [G.commutator(a, g) for a in cur.igs for g in H.igs]
        nxt = normal_closure(G, comms, within=H)
        if nxt == cur:
            break
        terms.append(nxt)
    return _profile(terms)


def gamma(H, i: int) -> Subgroup:
    H = _as_sub(H)
    terms = lower_central_series(H).subgroups
    return terms[i - 1] if i <= len(terms) else trivial_subgroup(H.group)


def frattini(H) -> Subgroup:
    """Phi(H) = H^p [H, H].

    Modulo [H, H] the group is abelian, so the p-th powers of the igs
    already generate H^p [H, H] together with the derived subgroup.
    """
    H = _as_sub(H)
    G = H.group
    D = derived_subgroup(H)
    return extend(D, [G.power(y, G.p) for y in H.igs])


def min_generators(H) -> int:
    H = _as_sub(H)
    return H.log_order - frattini(H).log_order


def center(H) -> Subgroup:
    H = _as_sub(H)
    G = H.group
    gens = H.igs
    elems = [x for x in H.elements() if all(G.multiply(x, y) == G.multiply(y, x) for y in gens)]
    return subgroup_closure(G, elems)


def omega1(H) -> Subgroup:
    """<x in H : x^p = 1>."""
    H = _as_sub(H)
    G = H.group
    by_depth: dict[int, Element] = {}
    result = trivial_subgroup(G)
    for x in H.elements():
        if any(x) and not any(G.power(x, G.p)) and any(_sift(G, by_depth, x)):
            result = _close(G, [x], start=by_depth)
            by_depth = dict(result._by_depth)
    return result


def is_elementary_abelian(H: Subgroup) -> bool:
    G = H.group
    if any(any(G.power(y, G.p)) for y in H.igs):
        return False
    return all(G.multiply(a, b) == G.multiply(b, a) for a, b in itertools.combinations(H.igs, 2))


def is_abelian(H) -> bool:
    H = _as_sub(H)
    G = H.group
    return all(G.multiply(a, b) == G.multiply(b, a) for a, b in itertools.combinations(H.igs, 2))


def lower_central_p_series(H) -> SeriesProfile:
    """P_1 = H, P_{i+1} = P_i^p [P_i, H]."""
    H = _as_sub(H)
    G = H.group
    terms = [H]
    while terms[-1].log_order:
        cur = terms[-1]
        comms = [G.commutator(a, g) for a in cur.igs for g in H.igs]
        brk = normal_closure(G, comms, within=H)
        terms.append(join(agemo(cur), brk))
    return _profile(terms)


# ---------------------------------------------------------------- predicates


def _powerful_target(H: Subgroup) -> Subgroup:
    G = H.group
    return power_subgroup(H, 4) if G.p == 2 else agemo(H)


def is_powerful(H) -> bool:
    """[H, H] <= H^p (p odd) or [H, H] <= H^4 (p = 2)."""
    H = _as_sub(H)
    D = derived_subgroup(H)
    if not D.log_order:
        return True
    return D <= _powerful_target(H)


def is_potent(H) -> bool:
    """gamma_{p-1}(H) <= H^p."""
    H = _as_sub(H)
    return gamma(H, H.group.p - 1) <= agemo(H)


def is_p_central(H) -> bool:
    """Omega_1(H) <= Z(H)."""
    H = _as_sub(H)
    return omega1(H) <= center(H)


def is_powerfully_embedded(N: Subgroup, H=None) -> bool:
    """[N, H] <= N^p (N^4 for p = 2)."""
    G = N.group
    H = whole_group(G) if H is None else _as_sub(H)
    return commutator_subgroup(N, H) <= _powerful_target(N)


def uniform_segment(H) -> bool:
    """All non-trivial steps of the lower central p-series have equal index."""
    idx = [i for i in lower_central_p_series(H).indices if i]
    return len(set(idx)) <= 1


@dataclass(frozen=True)
class DProfile:
    d: tuple[int, ...]
    non_increasing: bool


def d_profile(H) -> DProfile:
    d = lower_central_p_series(H).indices
    return DProfile(d, all(a >= b for a, b in zip(d, d[1:])))


def pth_power_image_size(H) -> int:
    """|{x^p : x in H}|, the set of p-th powers."""
    H = _as_sub(H)
    G = H.group
    return len({G.power(x, G.p) for x in H.elements()})


# ---------------------------------------------------------------- subgroup lattice


def all_subgroups(G: PcGroup, max_count: int = DEFAULT_MAX_SUBGROUPS,
                  containing: Subgroup | None = None,
                  max_index_exp: int | None = None) -> Iterator[Subgroup]:
    """Every subgroup containing ``containing`` (default: all), by cyclic extension.

    A subgroup H > S with |H : S| = p and S normal in H is <S, x> for some
    x in N(S) with x^p in S, so layering by order reaches everything.
    ``max_index_exp`` keeps only subgroups of index at most p^j; the
    search still walks up from the base.  Raises BudgetExceeded after
    ``max_count`` subgroups.
    """
    base = containing if containing is not None else trivial_subgroup(G)
    if containing is None and G.n > SUBGROUP_ORDER_LIMIT_EXP:
        raise BudgetExceeded(
            f"subgroup enumeration limited to order p^{SUBGROUP_ORDER_LIMIT_EXP}"
        )
    if containing is not None and G.n - base.log_order > SUBGROUP_ORDER_LIMIT_EXP:
        raise BudgetExceeded("index of base subgroup too large for subgroup enumeration")
    keep = (lambda S: True) if max_index_exp is None else (
        lambda S: G.n - S.log_order <= max_index_exp)
    count = 0
    layer = {base.igs: base}
    while layer:
        nxt: dict[tuple, Subgroup] = {}
        for S in layer.values():
            count += 1
            if count > max_count:
                raise BudgetExceeded(f"more than {max_count} subgroups")
            if keep(S):
                yield S
            for x in S.transversal():
                if not any(x):
                    continue
                if G.power(x, G.p) not in S or not S.normalizes(x):
                    continue
                H = extend(S, [x])
                nxt.setdefault(H.igs, H)
        layer = nxt


def is_hereditarily_powerful(G: PcGroup, max_count: int = DEFAULT_MAX_SUBGROUPS) -> bool | None:
    """True iff every subgroup is powerful; None if the search budget ran out first."""
    try:
        for H in all_subgroups(G, max_count=max_count):
            if not is_powerful(H):
                return False
    except BudgetExceeded:
        return None
    return True


# ---------------------------------------------------------------- Hall congruence


@dataclass(frozen=True)
class HallReport:
    group: str
    pairs_checked: int
    exhaustive: bool
    violations: tuple[tuple[Element, Element], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def hall_congruence_check(G: PcGroup, trials: int | None = None, seed: int = 0) -> HallReport:
    """(xu)^p = x^p u^p modulo gamma_2(<x,u>)^p gamma_p(<x,u>).

    All pairs when ``trials`` is None, otherwise a seeded random sample.
    """
    p = G.p
    if trials is None:
        check_cap(G.order**2)
        elems = list(G.enumerate_elements())
        pairs: Iterable = itertools.product(elems, repeat=2)
    else:
        rng = random.Random(seed)
        pairs = [(G.random_element(rng), G.random_element(rng)) for _ in range(trials)]
    moduli: dict[tuple, Subgroup] = {}
    bad = []
    count = 0
    for x, u in pairs:
        count += 1
        lhs = G.power(G.multiply(x, u), p)
        rhs = G.multiply(G.power(x, p), G.power(u, p))
        if lhs == rhs:
            continue
        t = G.multiply(lhs, G.inverse(rhs))
        H = subgroup_closure(G, [x, u])
        M = moduli.get(H.igs)
        if M is None:
            M = join(agemo(derived_subgroup(H)), gamma(H, p))
            moduli[H.igs] = M
        if t not in M:
            bad.append((x, u))
    return HallReport(G.name, count, trials is None, tuple(bad))
