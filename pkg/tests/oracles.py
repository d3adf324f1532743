"""Brute-force group computations on Cayley tables, independent of the pc machinery."""

import itertools
from functools import cached_property


class TableGroup:
    def __init__(self, G):
        self.G = G
        self.p = G.p
        self.elems = list(G.enumerate_elements())
        self.idx = {e: i for i, e in enumerate(self.elems)}
        n = len(self.elems)
        self.mul = [[self.idx[G.multiply(a, b)] for b in self.elems] for a in self.elems]
        self.e = self.idx[G.identity]
        self.inv = [next(b for b in range(n) if self.mul[a][b] == self.e) for a in range(n)]
        self.all = frozenset(range(n))

    def closure(self, gens):
        H = {self.e} | set(gens)
        frontier = list(H)
        while frontier:
            x = frontier.pop()
            for y in list(H):
                for z in (self.mul[x][y], self.mul[y][x]):
                    if z not in H:
                        H.add(z)
                        frontier.append(z)
        return frozenset(H)

    def order(self, a):
        k, x = 1, a
        while x != self.e:
            x = self.mul[x][a]
            k += 1
        return k

    def power(self, a, k):
        x = self.e
        for _ in range(k):
            x = self.mul[x][a]
        return x

    def comm(self, a, b):
        m = self.mul
        return m[m[self.inv[a]][self.inv[b]]][m[a][b]]

    def commutator_group(self, A, B):
        return self.closure(self.comm(a, b) for a in A for b in B)

    def agemo(self, H, k=None):
        return self.closure(self.power(x, k or self.p) for x in H)

    def omega1(self, H):
        return self.closure(x for x in H if self.order(x) <= self.p)

    def center(self, H):
        return frozenset(x for x in H if all(self.mul[x][y] == self.mul[y][x] for y in H))

    def frattini(self, H):
        return self.closure(set(self.agemo(H)) | set(self.commutator_group(H, H)))

    def d(self, H):
        return round_log(len(H) // len(self.frattini(H)), self.p)

    def powerful(self, H):
        target = self.agemo(H, 4) if self.p == 2 else self.agemo(H)
        return self.commutator_group(H, H) <= target

    def lower_central(self, H):
        terms = [H]
        while True:
            nxt = self.commutator_group(terms[-1], H)
            if nxt == terms[-1]:
                return terms
            terms.append(nxt)
            if len(nxt) == 1:
                return terms

    def p_series(self, H):
        terms = [H]
        while len(terms[-1]) > 1:
            cur = terms[-1]
            terms.append(self.closure(set(self.agemo(cur)) | set(self.commutator_group(cur, H))))
        return terms

    @cached_property
    def subgroups(self):
        """Every subgroup, by closing under adjoining single elements."""
        seen = {frozenset([self.e])}
        frontier = list(seen)
        while frontier:
            S = frontier.pop()
            for x in self.all - S:
                T = self.closure(set(S) | {x})
                if T not in seen:
                    seen.add(T)
                    frontier.append(T)
        return seen

    def as_set(self, sub):
        return frozenset(self.idx[x] for x in sub.elements())


def round_log(x, p):
    k = 0
    while x > 1:
        x //= p
        k += 1
    return k


def indices(terms, p):
    return tuple(round_log(len(a) // len(b), p) for a, b in zip(terms, terms[1:]))


def is_associative(T):
    n = len(T.elems)
    m = T.mul
    return all(m[m[a][b]][c] == m[a][m[b][c]] for a, b, c in itertools.product(range(n), repeat=3))
