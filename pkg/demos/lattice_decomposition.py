"""Split a C_p-lattice into trivial (I), cyclotomic (J) and free (K) summands.

The lattice is given by an integer matrix A with A^p = I, read mod p^k. The
multiplicities come from Smith forms of A - I and of the norm 1 + A + ... + A^(p-1).
Conjugating by random unimodular matrices must not change them. The orders of the Tate group H^0 hat = ker(A - I) / im(N) and of
H^1 = ker(N) / im(A - I) give an independent cross-check.

    python demos/lattice_decomposition.py [p] [k]
"""

import sys

import numpy as np

from pcgroups.lattice import (
    CpLatticeAction,
    block_diag,
    cohomology_orders,
    companion_cyclotomic,
    cyclic_permutation,
    decompose,
    random_unimodular,
)
from pcgroups.modpk import ModPkMatrix


def main(p: int = 3, k: int = 4) -> None:
    one = np.eye(1, dtype=np.int64)
    J = companion_cyclotomic(p)
    K = cyclic_permutation(p)
    samples = {
        "I + I": block_diag(one, one),
        "J": J,
        "K": K,
        "I + J + K": block_diag(one, J, K),
        "J + J + K": block_diag(J, J, K),
    }
    rng = np.random.default_rng(0)
    print(f"p = {p}, working mod {p}^{k}")
    print(f"{'lattice':<12} {'rank':>4} {'(m1, m2, m3)':>14} {'|H^0 hat|, |H^1|':>17}  stable under 50 conjugations")
    for label, A in samples.items():
        action = CpLatticeAction.from_rows(A, p, k)
        res = decompose(action)
        coh = cohomology_orders(action) if k >= 3 else None
        stable = all(
            decompose(action.conjugate(ModPkMatrix(random_unimodular(action.d, rng), p, k))).multiplicities
            == res.multiplicities
            for _ in range(50)
        )
        print(f"{label:<12} {action.d:>4} {str(res.multiplicities):>14} {str(coh):>17}  {stable}")

    print("\ncertificate for J + J + K:")
    print(decompose(CpLatticeAction.from_rows(samples["J + J + K"], p, k)).as_dict())


if __name__ == "__main__":
    args = [int(a) for a in sys.argv[1:3]]
    main(*args)
