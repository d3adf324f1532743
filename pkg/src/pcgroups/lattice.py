"""Decomposition of Z_p C_p-lattices into trivial, cyclotomic and free summands.

Every Z_p-lattice with an action of the cyclic group C_p is a direct sum of
copies of I (rank 1, trivial action), J (rank p-1, Z_p[x]/(Phi_p)) and
K (rank p, the group ring).  Only the Smith forms of A - I and of the norm
N = I + A + ... + A^(p-1) are needed to recover the multiplicities:

    summand   A - I exponents       N exponents
    I         (inf)                 (1)
    J         (0,...,0, 1)          (inf,...,inf)
    K         (0,...,0, inf)        (0, inf,...,inf)

where inf is an exponent that reaches the working precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modpk import ModPkMatrix, SNFResult, snf


class DecompositionError(ValueError):
    pass


class PrecisionError(DecompositionError):
    pass


@dataclass(frozen=True)
class CpLatticeAction:
    A: ModPkMatrix

    def __post_init__(self):
        A = self.A
        if A.shape[0] != A.shape[1]:
            raise DecompositionError("action matrix must be square")
        if A.k < 2:
            raise PrecisionError("precision k >= 2 is needed to tell p from 0")
        if A ** A.p != ModPkMatrix.identity(self.d, A.p, A.k):
            raise DecompositionError(f"A^{A.p} != I mod {A.p}^{A.k}")

    @classmethod
    def from_rows(cls, rows, p: int, k: int) -> "CpLatticeAction":
        return cls(ModPkMatrix(rows, p, k))

    @property
    def p(self) -> int:
        return self.A.p

    @property
    def k(self) -> int:
        return self.A.k

    @property
    def d(self) -> int:
        return self.A.shape[0]

    def minus_identity(self) -> ModPkMatrix:
        return self.A - ModPkMatrix.identity(self.d, self.p, self.k)

    def norm(self) -> ModPkMatrix:
        acc = ModPkMatrix.identity(self.d, self.p, self.k)
        power = acc
        for _ in range(self.p - 1):
            power = power @ self.A
            acc = acc + power
        return acc

    def conjugate(self, g: ModPkMatrix) -> "CpLatticeAction":
        return CpLatticeAction(g @ self.A @ g.inverse())


@dataclass(frozen=True)
class DecompositionResult:
    p: int
    d: int
    m1: int
    m2: int
    m3: int
    minus_identity_exponents: tuple[int, ...]
    norm_exponents: tuple[int, ...]
    k: int

    @property
    def multiplicities(self) -> tuple[int, int, int]:
        return (self.m1, self.m2, self.m3)

    def as_dict(self) -> dict:
        return {
            "m1": self.m1,
            "m2": self.m2,
            "m3": self.m3,
            "certificate": {
                "precision": self.k,
                # exponent k is reported as the zero divisor
                "minus_identity_divisors": _divisor_labels(self.minus_identity_exponents, self.p, self.k),
                "norm_divisors": _divisor_labels(self.norm_exponents, self.p, self.k),
            },
        }


def _divisor_labels(exps, p, k):
    return [0 if e >= k else p**e for e in sorted(exps)]


def _check_exponents(res: SNFResult, what: str) -> None:
    bad = [e for e in res.exponents if 1 < e < res.k]
    if bad:
        raise DecompositionError(
            f"{what} has divisors p^{bad}; not a C_p-lattice at precision {res.k}"
        )


def decompose(act: CpLatticeAction) -> DecompositionResult:
    """Multiplicities (m1, m2, m3) of I, J, K, cross-checked four ways."""
    p, k, d = act.p, act.k, act.d
    s1 = snf(act.minus_identity())
    sN = snf(act.norm())
    _check_exponents(s1, "A - I")
    _check_exponents(sN, "N")
    z1, e1 = s1.zeros, s1.count(1)
    zN, eN = sN.zeros, sN.count(1)
    m1 = eN
    m2 = e1
    m3 = z1 - m1
    problems = []
    if m3 < 0:
        problems.append(f"m3 = {m3} < 0")
    if zN != (p - 1) * (m2 + m3):
        problems.append(f"N has {zN} zero divisors, expected {(p - 1) * (m2 + m3)}")
    if m1 + (p - 1) * m2 + p * m3 != d:
        problems.append("dimension identity fails")
    if s1.count(0) != (p - 2) * m2 + (p - 1) * m3:
        problems.append("unit divisors of A - I do not match")
    if problems:
        raise DecompositionError("inconsistent system: " + "; ".join(problems))
    return DecompositionResult(p, d, m1, m2, m3, s1.exponents, sN.exponents, k)


def min_module_generators(res: DecompositionResult) -> int:
    """Each indecomposable is cyclic and contributes one dimension to M/(p, x-1)M."""
    return res.m1 + res.m2 + res.m3


def residue_generator_count(act: CpLatticeAction) -> int:
    """dim over F_p of M / (p, x - 1) M, computed directly."""
    return act.d - sum(1 for e in snf(act.minus_identity().lift(1)).exponents if e == 0)


def _subquotient_log(kernel_of: ModPkMatrix, image_of: ModPkMatrix) -> int:
    """log_p |ker(kernel_of) / im(image_of)| over Z_p, from finite precision data.

    The Z_p-kernel is spanned by the columns of V at zero divisors; image
    vectors are written in that basis through V^-1.  Components at non-zero
    divisors are at most p^(k-1)-perturbations and are discarded.
    """
    res = snf(kernel_of)
    p, k = kernel_of.p, kernel_of.k
    zero_pos = [i for i, e in enumerate(res.exponents) if e >= k]
    # columns beyond the diagonal length are also kernel directions
    zero_pos += list(range(len(res.exponents), kernel_of.shape[1]))
    if not zero_pos:
        return 0
    coords = (res.V.inverse() @ image_of).a[zero_pos, :]
    sub = snf(ModPkMatrix(coords, p, k))
    if any(1 < e for e in sub.exponents):
        raise PrecisionError(
            f"subquotient divisors {sub.exponents} unresolved at precision {k}"
        )
    return sum(sub.exponents)


def cohomology_orders(act: CpLatticeAction) -> tuple[int, int]:
    """(|H^0 hat|, |H^1|) = (|ker(A-I) / im N|, |ker N / im(A-I)|)."""
    if act.k < 3:
        raise PrecisionError("cohomology oracle needs precision k >= 3")
    h0 = _subquotient_log(act.minus_identity(), act.norm())
    h1 = _subquotient_log(act.norm(), act.minus_identity())
    return act.p**h0, act.p**h1


# ---------------------------------------------------------------- standard matrices


def companion_cyclotomic(p: int) -> np.ndarray:
    """Multiplication by a primitive p-th root of unity on Z_p[x]/(Phi_p)."""
    n = p - 1
    C = np.zeros((n, n), dtype=np.int64)
    for i in range(1, n):
        C[i, i - 1] = 1
    C[:, n - 1] = -1
    return C


def cyclic_permutation(p: int) -> np.ndarray:
    return np.roll(np.eye(p, dtype=np.int64), 1, axis=0)


def block_diag(*blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.int64)
    i = 0
    for b in blocks:
        s = b.shape[0]
        out[i : i + s, i : i + s] = b
        i += s
    return out


def random_unimodular(d: int, rng: np.random.Generator, steps: int = 3) -> np.ndarray:
    """Integer matrix of determinant +-1, so it is invertible at every precision."""
    g = np.eye(d, dtype=np.int64)
    for _ in range(steps * d):
        i, j = rng.choice(d, size=2, replace=False)
        g[i] += int(rng.integers(-2, 3)) * g[j]
    perm = rng.permutation(d)
    return g[perm]
