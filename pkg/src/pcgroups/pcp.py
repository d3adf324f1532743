"""Power-commutator presentations of finite p-groups.

Elements are exponent vectors ``(e_1, ..., e_n)`` standing for the normal
form ``g_1^e_1 ... g_n^e_n`` with every ``e_i`` in ``[0, p)``.  Relations
are read as

    g_i^p        = <word in g_{i+1}, ..., g_n>
    [g_j, g_i]   = <word in g_{i+1}, ..., g_n>      (j > i)

with the commutator convention ``[x, y] = x^-1 y^-1 x y``, so that
``g_j g_i = g_i g_j [g_j, g_i]``.  Generator indices are 1-based in words
and in the text format, 0-based inside exponent vectors.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .limits import EnumerationCapExceeded, current_cap

Element = tuple[int, ...]
Word = tuple[tuple[int, int], ...]

STEP_BUDGET = 10**6


class PcpSyntaxError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class CollectionError(RuntimeError):
    """Collection ran past its step budget."""


class InconsistentPresentationError(ValueError):
    def __init__(self, name: str, report: "ConsistencyReport"):
        self.report = report
        first = report.failures[0]
        super().__init__(
            f"presentation {name!r} is inconsistent: {len(report.failures)} "
            f"failed overlap(s), first {first.label}"
        )


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, int(p**0.5) + 1))


@dataclass(frozen=True)
class PcPresentation:
    """Structural description of a pc presentation; consistency is not implied."""

    p: int
    n: int
    power_relations: dict[int, Word] = field(default_factory=dict)
    commutator_relations: dict[tuple[int, int], Word] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        for i, word in self.power_relations.items():
            if not 1 <= i <= self.n:
                raise ValueError(f"pow {i}: generator index out of range")
            self._check_word(word, i, f"pow {i}")
        for (j, i), word in self.commutator_relations.items():
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"comm {j} {i}: generator index out of range")
            if j <= i:
                raise ValueError(f"comm {j} {i}: need j > i")
            self._check_word(word, i, f"comm {j} {i}")

    def _check_word(self, word: Word, floor: int, label: str) -> None:
        for g, e in word:
            if not 1 <= g <= self.n:
                raise ValueError(f"{label}: generator {g} out of range")
            if g <= floor:
                raise ValueError(
                    f"{label}: generator {g} must have index > {floor} (non-polycyclic)"
                )
            if not 0 <= e < self.p:
                raise ValueError(f"{label}: exponent {e} outside [0, {self.p})")

    @property
    def order(self) -> int:
        return self.p**self.n


# ---------------------------------------------------------------- text format

_HEADER = re.compile(r"^group\s+(\S+)\s+p=(\d+)\s+n=(\d+)$")
_POW = re.compile(r"^pow\s+(\d+)\s*:(.*)$")
_COMM = re.compile(r"^comm\s+(\d+)\s+(\d+)\s*:(.*)$")
_TOKEN = re.compile(r"^(\d+)(?:\^(-?\d+))?$")


def _parse_word(text: str, lineno: int) -> Word:
    out = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise PcpSyntaxError(f"bad word token {tok!r}", lineno)
        out.append((int(m.group(1)), int(m.group(2) or 1)))
    return tuple(out)


def parse_catalog(text: str) -> list[PcPresentation]:
    """Parse zero or more ``group`` blocks."""
    blocks: list[tuple[int, list[tuple[int, str]]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("group"):
            blocks.append((lineno, [(lineno, line)]))
        elif not blocks:
            raise PcpSyntaxError("relation before any 'group' header", lineno)
        else:
            blocks[-1][1].append((lineno, line))
    return [_parse_block(lines) for _, lines in blocks]


def parse_pcp(text: str) -> PcPresentation:
    groups = parse_catalog(text)
    if len(groups) != 1:
        raise PcpSyntaxError(f"expected exactly one group, found {len(groups)}")
    return groups[0]


def _parse_block(lines: list[tuple[int, str]]) -> PcPresentation:
    lineno, header = lines[0]
    m = _HEADER.match(header)
    if not m:
        raise PcpSyntaxError(f"malformed header {header!r}", lineno)
    name, p, n = m.group(1), int(m.group(2)), int(m.group(3))
    if not is_prime(p):
        raise PcpSyntaxError(f"p={p} is not prime", lineno)
    pows: dict[int, Word] = {}
    comms: dict[tuple[int, int], Word] = {}
    for lineno, line in lines[1:]:
        if mp := _POW.match(line):
            i = int(mp.group(1))
            key, word_text, floor, label = i, mp.group(2), i, f"pow {i}"
            target = pows
        elif mc := _COMM.match(line):
            j, i = int(mc.group(1)), int(mc.group(2))
            if not (1 <= i <= n and 1 <= j <= n):
                raise PcpSyntaxError(f"comm {j} {i}: generator index out of range", lineno)
            if j <= i:
                raise PcpSyntaxError(f"comm {j} {i}: index ordering violated (need j > i)", lineno)
            key, word_text, floor, label = (j, i), mc.group(3), i, f"comm {j} {i}"
            target = comms
        else:
            raise PcpSyntaxError(f"unrecognised line {line!r}", lineno)
        if isinstance(key, int) and not 1 <= key <= n:
            raise PcpSyntaxError(f"{label}: generator index out of range", lineno)
        if key in target:
            raise PcpSyntaxError(f"duplicate relation {label}", lineno)
        word = _parse_word(word_text, lineno)
        for g, e in word:
            if not 1 <= g <= n:
                raise PcpSyntaxError(f"{label}: generator {g} out of range", lineno)
            if not 0 <= e < p:
                raise PcpSyntaxError(f"{label}: exponent {e} out of range [0, {p})", lineno)
            if g <= floor:
                raise PcpSyntaxError(
                    f"{label}: generator {g} violates index ordering (need > {floor})", lineno
                )
        target[key] = tuple((g, e) for g, e in word if e)
    return PcPresentation(p, n, pows, comms, name)


def _format_word(word: Word) -> str:
    return " ".join(f"{g}^{e}" for g, e in word if e)


def format_pcp(pres: PcPresentation) -> str:
    lines = [f"group {pres.name or 'G'} p={pres.p} n={pres.n}"]
    for i in sorted(pres.power_relations):
        if pres.power_relations[i]:
            lines.append(f"pow {i}: {_format_word(pres.power_relations[i])}")
    for j, i in sorted(pres.commutator_relations, key=lambda t: (t[1], t[0])):
        if pres.commutator_relations[j, i]:
            lines.append(f"comm {j} {i}: {_format_word(pres.commutator_relations[j, i])}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- collection


class _Collector:
    """Collection from the left, one generator at a time.

    ``mul_gen(v, i)`` rewrites ``v * g_i`` as
    ``prefix * g_i^(v_i + 1) * tail^(g_i)`` and replaces ``g_i^p`` by its
    power relation.  Everything right of position ``i`` lives in the
    normal subgroup ``G_{i+1}``, so the recursion only ever moves to
    higher generator indices.  Single-generator steps are memoised.
    """

    def __init__(self, pres: PcPresentation):
        self.p = pres.p
        self.n = pres.n
        self.pres = pres
        self.identity: Element = (0,) * pres.n
        self._step_cache: dict[tuple[Element, int], Element] = {}
        self._conj_cache: dict[tuple[Element, int], Element] = {}
        self._pow: dict[int, Element] = {}
        self._conj_gen: dict[tuple[int, int], Element] = {}
        self.steps = 0

    def unit(self, i: int, e: int = 1) -> Element:
        v = [0] * self.n
        v[i] = e
        return tuple(v)

    def word_elem(self, word: Word) -> Element:
        """Collect a relation word (non-negative exponents, 1-based gens)."""
        r = self.identity
        for g, e in word:
            for _ in range(e):
                r = self.mul_gen(r, g - 1)
        return r

    def pow_elem(self, i: int) -> Element:
        r = self._pow.get(i)
        if r is None:
            r = self.word_elem(self.pres.power_relations.get(i + 1, ()))
            self._pow[i] = r
        return r

    def conj_gen(self, j: int, i: int) -> Element:
        """g_j^(g_i) = g_j [g_j, g_i] for j > i."""
        r = self._conj_gen.get((j, i))
        if r is None:
            comm = self.pres.commutator_relations.get((j + 1, i + 1), ())
            r = self.mul(self.unit(j), self.word_elem(comm))
            self._conj_gen[j, i] = r
        return r

    def conj_tail(self, t: Element, i: int) -> Element:
        key = (t, i)
        r = self._conj_cache.get(key)
        if r is None:
            r = self.identity
            for j in range(i + 1, self.n):
                if t[j]:
                    c = self.conj_gen(j, i)
                    for _ in range(t[j]):
                        r = self.mul(r, c)
            self._conj_cache[key] = r
        return r

    def mul_gen(self, v: Element, i: int) -> Element:
        key = (v, i)
        r = self._step_cache.get(key)
        if r is not None:
            return r
        self.steps += 1
        if self.steps > STEP_BUDGET:
            raise CollectionError(
                f"collection exceeded {STEP_BUDGET} steps in {self.pres.name!r}"
            )
        tail = v[i + 1 :]
        if any(tail):
            tail = self.conj_tail((0,) * (i + 1) + tail, i)[i + 1 :]
        e = v[i] + 1
        if e == self.p:
            rest = self.mul(self.pow_elem(i), (0,) * (i + 1) + tail)
            r = v[:i] + (0,) + rest[i + 1 :]
        else:
            r = v[:i] + (e,) + tail
        self._step_cache[key] = r
        return r

    def mul(self, a: Element, b: Element) -> Element:
        r = a
        for i, e in enumerate(b):
            for _ in range(e):
                r = self.mul_gen(r, i)
        return r

    def power(self, a: Element, e: int) -> Element:
        r = self.identity
        base = a
        while e:
            if e & 1:
                r = self.mul(r, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return r


# ---------------------------------------------------------------- consistency


@dataclass(frozen=True)
class OverlapFailure:
    label: str
    lhs: Element
    rhs: Element


@dataclass(frozen=True)
class ConsistencyReport:
    name: str
    failures: tuple[OverlapFailure, ...]

    @property
    def consistent(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return bool(self.failures)


def check_consistency(pres: PcPresentation) -> ConsistencyReport:
    """Evaluate the standard overlap test words both ways.

    The report is empty exactly when the presentation defines a group of
    order ``p^n``.
    """
    c = _Collector(pres)
    n, p = pres.n, pres.p
    e = c.unit
    fails: list[OverlapFailure] = []

    def compare(label, lhs_fn, rhs_fn):
        c.steps = 0
        try:
            lhs = lhs_fn()
            c.steps = 0
            rhs = rhs_fn()
        except CollectionError:
            fails.append(OverlapFailure(label + " (step budget)", c.identity, c.identity))
            return
        if lhs != rhs:
            fails.append(OverlapFailure(label, lhs, rhs))

    top = lambda i: c.unit(i, p - 1)  # noqa: E731
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                compare(
                    f"(g{k+1} g{j+1}) g{i+1} = g{k+1} (g{j+1} g{i+1})",
                    lambda: c.mul(c.mul(e(k), e(j)), e(i)),
                    lambda: c.mul(e(k), c.mul(e(j), e(i))),
                )
    for i in range(n):
        for j in range(i + 1, n):
            compare(
                f"(g{j+1}^p) g{i+1} = g{j+1}^(p-1) (g{j+1} g{i+1})",
                lambda: c.mul(c.pow_elem(j), e(i)),
                lambda: c.mul(top(j), c.mul(e(j), e(i))),
            )
            compare(
                f"g{j+1} (g{i+1}^p) = (g{j+1} g{i+1}) g{i+1}^(p-1)",
                lambda: c.mul(e(j), c.pow_elem(i)),
                lambda: c.mul(c.mul(e(j), e(i)), top(i)),
            )
    for i in range(n):
        compare(
            f"(g{i+1}^p) g{i+1} = g{i+1} (g{i+1}^p)",
            lambda: c.mul(c.pow_elem(i), e(i)),
            lambda: c.mul(e(i), c.pow_elem(i)),
        )
    return ConsistencyReport(pres.name, tuple(fails))


# ---------------------------------------------------------------- the group


class PcGroup:
    """A verified pc presentation with element arithmetic.

    Construction runs :func:`check_consistency` and refuses inconsistent
    input.  Instances are immutable apart from internal memo tables.
    """

    def __init__(self, pres: PcPresentation):
        report = check_consistency(pres)
        if report.failures:
            raise InconsistentPresentationError(pres.name, report)
        self.presentation = pres
        self._c = _Collector(pres)

    def __reduce__(self):
        return (PcGroup, (self.presentation,))

    def __repr__(self):
        return f"PcGroup({self.name!r}, p={self.p}, n={self.n})"

    @classmethod
    def from_text(cls, text: str) -> "PcGroup":
        return cls(parse_pcp(text))

    @property
    def name(self) -> str:
        return self.presentation.name

    @property
    def p(self) -> int:
        return self.presentation.p

    @property
    def n(self) -> int:
        return self.presentation.n

    @property
    def order(self) -> int:
        return self.p**self.n

    @property
    def identity(self) -> Element:
        return self._c.identity

    def gen(self, i: int) -> Element:
        """The generator g_i, 1-based."""
        return self._c.unit(i - 1)

    @property
    def gens(self) -> list[Element]:
        return [self._c.unit(i) for i in range(self.n)]

    def _guard(self):
        self._c.steps = 0

    def collect(self, word: Sequence[tuple[int, int]]) -> Element:
        """Normal form of a word of (1-based generator, integer exponent) pairs."""
        self._guard()
        r = self.identity
        for g, e in word:
            if not 1 <= g <= self.n:
                raise ValueError(f"generator {g} out of range")
            r = self._c.mul(r, self.power(self.gen(g), e))
        return r

    def multiply(self, a: Element, b: Element) -> Element:
        self._guard()
        return self._c.mul(a, b)

    def inverse(self, a: Element) -> Element:
        self._guard()
        c = self._c
        x, w = a, self.identity
        for i in range(self.n):
            if x[i]:
                for _ in range(self.p - x[i]):
                    x = c.mul_gen(x, i)
                    w = c.mul_gen(w, i)
        return w

    def power(self, a: Element, k: int) -> Element:
        if k < 0:
            a, k = self.inverse(a), -k
        self._guard()
        return self._c.power(a, k)

    def commutator(self, a: Element, b: Element) -> Element:
        """[a, b] = a^-1 b^-1 a b."""
        c = self._c
        return c.mul(c.mul(self.inverse(a), self.inverse(b)), c.mul(a, b))

    def conjugate(self, a: Element, b: Element) -> Element:
        """a^b = b^-1 a b."""
        c = self._c
        return c.mul(c.mul(self.inverse(b), a), b)

    def element_order(self, a: Element) -> int:
        order = 1
        while a != self.identity:
            a = self.power(a, self.p)
            order *= self.p
        return order

    def enumerate_elements(self, cap: int | None = None) -> Iterator[Element]:
        """Every element once, in lexicographic exponent order."""
        cap = current_cap() if cap is None else cap
        if self.order > cap:
            raise EnumerationCapExceeded(self.order, cap)
        return itertools.product(range(self.p), repeat=self.n)

    def random_element(self, rng) -> Element:
        return tuple(rng.randrange(self.p) for _ in range(self.n))

    def is_identity(self, a: Element) -> bool:
        return not any(a)
