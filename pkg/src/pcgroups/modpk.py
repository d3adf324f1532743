"""Exact linear algebra over Z/p^k and the ring R_k = (Z/3^k)[x]/(x^2 + x + 1).

R_k is the truncation of the valuation ring Z_3[xi] of Q_3(xi), xi a primitive
cube root of unity.  Its uniformiser is pi = x - 1 with pi^2 = -3x, so a
3-adic precision of k digits is a pi-adic precision of exactly 2k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .limits import BudgetExceeded

_INT_BOUND = 2**62


def valuation(a: int, p: int, cap: int) -> int:
    """p-adic valuation of a, capped at ``cap`` (the value of 0)."""
    if a == 0:
        return cap
    v = 0
    while a % p == 0 and v < cap:
        a //= p
        v += 1
    return v


class ModPkMatrix:
    """Matrix with entries in Z/p^k, stored as a reduced int64 array."""

    def __init__(self, entries, p: int, k: int):
        if k < 1:
            raise ValueError("precision k must be >= 1")
        self.p = p
        self.k = k
        self.modulus = p**k
        a = np.array(entries, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        if a.shape[1] * self.modulus**2 >= _INT_BOUND:
            raise ValueError("p^k too large for exact int64 products")
        self.a = a % self.modulus

    @classmethod
    def identity(cls, n: int, p: int, k: int) -> "ModPkMatrix":
        return cls(np.eye(n, dtype=np.int64), p, k)

    @classmethod
    def from_text(cls, text: str, p: int, k: int) -> "ModPkMatrix":
        rows = [[int(t) for t in line.split()] for line in text.splitlines() if line.strip()]
        return cls(rows, p, k)

    @classmethod
    def random_invertible(cls, n: int, p: int, k: int, rng: np.random.Generator) -> "ModPkMatrix":
        while True:
            m = cls(rng.integers(0, p**k, size=(n, n)), p, k)
            if m.is_invertible():
                return m

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def _wrap(self, a) -> "ModPkMatrix":
        return ModPkMatrix(a, self.p, self.k)

    def __matmul__(self, other: "ModPkMatrix") -> "ModPkMatrix":
        return self._wrap(self.a @ other.a)

    def __add__(self, other: "ModPkMatrix") -> "ModPkMatrix":
        return self._wrap(self.a + other.a)

    def __sub__(self, other: "ModPkMatrix") -> "ModPkMatrix":
        return self._wrap(self.a - other.a)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModPkMatrix)
            and (self.p, self.k) == (other.p, other.k)
            and np.array_equal(self.a, other.a)
        )

    def __repr__(self):
        return f"ModPkMatrix(p={self.p}, k={self.k}, {self.a.tolist()})"

    def __pow__(self, e: int) -> "ModPkMatrix":
        r = ModPkMatrix.identity(self.shape[0], self.p, self.k)
        base = self
        while e:
            if e & 1:
                r = r @ base
            base = base @ base
            e >>= 1
        return r

    def lift(self, k: int) -> "ModPkMatrix":
        """Same integer representatives at another precision."""
        return ModPkMatrix(self.a, self.p, k)

    def is_invertible(self) -> bool:
        return all(e == 0 for e in snf(self).exponents) and self.shape[0] == self.shape[1]

    def inverse(self) -> "ModPkMatrix":
        n = self.shape[0]
        if self.shape != (n, n):
            raise ValueError("inverse of a non-square matrix")
        m = self.modulus
        aug = np.concatenate([self.a.copy(), np.eye(n, dtype=np.int64)], axis=1)
        for c in range(n):
            piv = next((r for r in range(c, n) if aug[r, c] % self.p), None)
            if piv is None:
                raise ZeroDivisionError("matrix is not invertible mod p^k")
            aug[[c, piv]] = aug[[piv, c]]
            aug[c] = aug[c] * pow(int(aug[c, c]), -1, m) % m
            for r in range(n):
                if r != c and aug[r, c]:
                    aug[r] = (aug[r] - aug[r, c] * aug[c]) % m
        return self._wrap(aug[:, n:])


@dataclass(frozen=True)
class SNFResult:
    """``U @ M @ V == D`` with D diagonal, diagonal entries p^exponents[i].

    An exponent equal to k means the entry vanishes at this precision.
    """

    exponents: tuple[int, ...]
    U: ModPkMatrix
    V: ModPkMatrix
    D: ModPkMatrix
    k: int

    @property
    def divisors(self) -> tuple[int, ...]:
        p = self.D.p
        return tuple(0 if e >= self.k else p**e for e in self.exponents)

    def count(self, exponent: int) -> int:
        return sum(1 for e in self.exponents if e == exponent)

    @property
    def zeros(self) -> int:
        return self.count(self.k)


def snf(M: ModPkMatrix) -> SNFResult:
    """Smith normal form over the local ring Z/p^k.

    Pivot on an entry of minimal valuation, scale it to a power of p, and
    clear its row and column; every remaining entry is divisible by the
    pivot, so no gcd steps are needed.
    """
    p, k, mod = M.p, M.k, M.modulus
    rows, cols = M.shape
    A = M.a.copy()
    U = np.eye(rows, dtype=np.int64)
    V = np.eye(cols, dtype=np.int64)
    exps = []
    for t in range(min(rows, cols)):
        best = None
        for r in range(t, rows):
            for c in range(t, cols):
                v = valuation(int(A[r, c]), p, k)
                if best is None or v < best[0]:
                    best = (v, r, c)
                    if v == 0:
                        break
            if best and best[0] == 0:
                break
        v, r, c = best
        if v >= k:
            exps.extend([k] * (min(rows, cols) - t))
            break
        A[[t, r]] = A[[r, t]]
        U[[t, r]] = U[[r, t]]
        A[:, [t, c]] = A[:, [c, t]]
        V[:, [t, c]] = V[:, [c, t]]
        unit = int(A[t, t]) // p**v
        inv = pow(unit, -1, mod)
        A[t] = A[t] * inv % mod
        U[t] = U[t] * inv % mod
        pv = p**v
        for r2 in range(rows):
            if r2 != t and A[r2, t]:
                f = int(A[r2, t]) // pv
                A[r2] = (A[r2] - f * A[t]) % mod
                U[r2] = (U[r2] - f * U[t]) % mod
        for c2 in range(t + 1, cols):
            if A[t, c2]:
                f = int(A[t, c2]) // pv
                A[:, c2] = (A[:, c2] - f * A[:, t]) % mod
                V[:, c2] = (V[:, c2] - f * V[:, t]) % mod
        exps.append(v)
    wrap = lambda a: ModPkMatrix(a, p, k)  # noqa: E731
    return SNFResult(tuple(exps), wrap(U), wrap(V), wrap(A), k)


def rank_mod_p(M: ModPkMatrix) -> int:
    return sum(1 for e in snf(M.lift(1)).exponents if e == 0)


# ---------------------------------------------------------------- R_k


class NonUnitError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class RkElement:
    """a + b*x in (Z/3^k)[x]/(x^2 + x + 1)."""

    a: int
    b: int
    k: int

    def __post_init__(self):
        m = 3**self.k
        object.__setattr__(self, "a", self.a % m)
        object.__setattr__(self, "b", self.b % m)

    @classmethod
    def x(cls, k: int) -> "RkElement":
        return cls(0, 1, k)

    @classmethod
    def pi(cls, k: int) -> "RkElement":
        return cls(-1, 1, k)

    @classmethod
    def of(cls, n: int, k: int) -> "RkElement":
        return cls(n, 0, k)

    def __add__(self, o):
        o = self._coerce(o)
        return RkElement(self.a + o.a, self.b + o.b, self.k)

    __radd__ = __add__

    def __neg__(self):
        return RkElement(-self.a, -self.b, self.k)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        o = self._coerce(o)
        # x^2 = -1 - x
        bd = self.b * o.b
        return RkElement(self.a * o.a - bd, self.a * o.b + self.b * o.a - bd, self.k)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        r = RkElement(1, 0, self.k)
        for _ in range(e):
            r = r * self
        return r

    def _coerce(self, o) -> "RkElement":
        if isinstance(o, RkElement):
            if o.k != self.k:
                raise ValueError("precision mismatch")
            return o
        return RkElement(int(o), 0, self.k)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def pi_digits(self) -> tuple[int, int]:
        """(c0, c1) with self = c0 + c1*pi, since x = 1 + pi."""
        m = 3**self.k
        return ((self.a + self.b) % m, self.b)

    def valuation(self) -> int:
        """pi-adic valuation; 2k for zero."""
        c0, c1 = self.pi_digits()
        return min(2 * valuation(c0, 3, self.k), 2 * valuation(c1, 3, self.k) + 1, 2 * self.k)

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def inverse(self) -> "RkElement":
        if not self.is_unit():
            raise NonUnitError(f"{self} is not a unit")
        # conjugate a + b*x^2 = (a - b) - b*x ; norm a^2 - ab + b^2
        norm = self.a * self.a - self.a * self.b + self.b * self.b
        inv = pow(norm % 3**self.k, -1, 3**self.k)
        return RkElement((self.a - self.b) * inv, -self.b * inv, self.k)

    def reduce_pi(self, j: int) -> tuple[int, int]:
        """Canonical key of the class modulo pi^j (j <= 2k)."""
        if j > 2 * self.k:
            raise ValueError(f"pi-precision {j} exceeds 2k = {2 * self.k}")
        c0, c1 = self.pi_digits()
        return (c0 % 3 ** ((j + 1) // 2), c1 % 3 ** (j // 2))


def residues_mod_pi(t: int, k: int) -> list[RkElement]:
    """Representatives c0 + c1*pi of R/pi^t."""
    pi = RkElement.pi(k)
    return [
        RkElement(c0, 0, k) + pi * c1
        for c0 in range(3 ** ((t + 1) // 2))
        for c1 in range(3 ** (t // 2))
    ]


class RMatrix:
    """Square matrix over R_k."""

    def __init__(self, rows: Sequence[Sequence[RkElement]]):
        self.rows = tuple(tuple(r) for r in rows)
        self.m = len(self.rows)
        self.k = self.rows[0][0].k if self.m else 1

    @classmethod
    def identity(cls, m: int, k: int) -> "RMatrix":
        return cls([[RkElement(int(i == j), 0, k) for j in range(m)] for i in range(m)])

    def __matmul__(self, o: "RMatrix") -> "RMatrix":
        m = self.m
        zero = RkElement(0, 0, self.k)
        out = []
        for i in range(m):
            row = []
            for j in range(m):
                s = zero
                for t in range(m):
                    s = s + self.rows[i][t] * o.rows[t][j]
                row.append(s)
            out.append(row)
        return RMatrix(out)

    def __sub__(self, o: "RMatrix") -> "RMatrix":
        return RMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, o.rows)])

    def __add__(self, o: "RMatrix") -> "RMatrix":
        return RMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, o.rows)])

    def scale(self, c: RkElement) -> "RMatrix":
        return RMatrix([[c * a for a in r] for r in self.rows])

    def __eq__(self, o) -> bool:
        return isinstance(o, RMatrix) and self.rows == o.rows

    def __hash__(self):
        return hash(self.rows)

    def __pow__(self, e: int) -> "RMatrix":
        r = RMatrix.identity(self.m, self.k)
        for _ in range(e):
            r = r @ self
        return r

    def valuation(self) -> int:
        return min(a.valuation() for r in self.rows for a in r)

    def congruence_level(self) -> int:
        """Largest i with self = I mod pi^i (2k when self = I)."""
        return (self - RMatrix.identity(self.m, self.k)).valuation()

    def key(self, j: int) -> tuple:
        return tuple(a.reduce_pi(j) for r in self.rows for a in r)

    def inverse(self) -> "RMatrix":
        m = self.m
        k = self.k
        a = [list(r) + [RkElement(int(i == j), 0, k) for j in range(m)] for i, r in enumerate(self.rows)]
        for c in range(m):
            piv = next((r for r in range(c, m) if a[r][c].is_unit()), None)
            if piv is None:
                raise NonUnitError("matrix is not invertible over R_k")
            a[c], a[piv] = a[piv], a[c]
            inv = a[c][c].inverse()
            a[c] = [inv * e for e in a[c]]
            for r in range(m):
                if r != c and not a[r][c].is_zero():
                    f = a[r][c]
                    a[r] = [e - f * g for e, g in zip(a[r], a[c])]
        return RMatrix([row[m:] for row in a])


# ---------------------------------------------------------------- congruence layers


@dataclass(frozen=True)
class LayerReport:
    m: int
    k: int
    i: int
    j: int
    order: int
    exponent: int
    abelian: bool
    closed: bool

    @property
    def elementary_abelian(self) -> bool:
        return self.abelian and self.exponent <= 3

    @property
    def log_order(self) -> int:
        return round(np.log(self.order) / np.log(3)) if self.order > 1 else 0


LAYER_BUDGET = 10**8


def layer_elements(m: int, k: int, i: int, j: int) -> list[RMatrix]:
    """I + pi^i E for E over representatives of M_m(R / pi^(j-i))."""
    pi_i = RkElement.pi(k) ** i
    reps = residues_mod_pi(j - i, k)
    ident = RMatrix.identity(m, k)
    out = []
    for entries in itertools.product(reps, repeat=m * m):
        E = RMatrix([entries[r * m : (r + 1) * m] for r in range(m)])
        out.append(ident + E.scale(pi_i))
    return out


def gl_congruence_layer(m: int, k: int, i: int, j: int) -> LayerReport:
    """The finite group GL_m^i(R) / GL_m^j(R), by exhaustive multiplication."""
    if not 1 <= i < j <= 2 * k:
        raise ValueError(f"need 1 <= i < j <= 2k, got i={i}, j={j}, k={k}")
    size = 3 ** (m * m * (j - i))
    if size * size > LAYER_BUDGET:
        raise BudgetExceeded(f"layer of order {size} too large for exhaustive check")
    elems = layer_elements(m, k, i, j)
    keys = {X.key(j) for X in elems}
    closed = True
    abelian = True
    for X in elems:
        for Y in elems:
            XY = X @ Y
            if XY.key(j) not in keys or XY.congruence_level() < i:
                closed = False
            if XY.key(j) != (Y @ X).key(j):
                abelian = False
    ident = RMatrix.identity(m, k).key(j)
    exponent = 1
    for X in elems:
        e, Y = 1, X
        while Y.key(j) != ident:
            Y = Y @ X
            e += 1
        exponent = max(exponent, e)
    return LayerReport(m, k, i, j, len(keys), exponent, abelian, closed)


@dataclass(frozen=True)
class TorsionProxyReport:
    m: int
    k: int
    checked: int
    cube_roots: int
    violations: tuple[RMatrix, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def torsion_proxy_check(m: int, k: int) -> TorsionProxyReport:
    """Every X = I mod pi^2 with X^3 = I mod pi^2k has X = I mod pi^(2k-2).

    Finite-precision evidence that GL_m^2(R) has no elements of order 3.
    """
    if k < 3:
        raise ValueError("torsion proxy needs k >= 3")
    size = 3 ** (m * m * (2 * k - 2))
    if size > LAYER_BUDGET:
        raise BudgetExceeded(f"{size} matrices exceed the scan budget")
    ident = RMatrix.identity(m, k)
    bad = []
    roots = 0
    elems = layer_elements(m, k, 2, 2 * k)
    for X in elems:
        if (X @ X @ X) == ident:
            roots += 1
            if X.congruence_level() < 2 * k - 2:
                bad.append(X)
    return TorsionProxyReport(m, k, len(elems), roots, tuple(bad))
