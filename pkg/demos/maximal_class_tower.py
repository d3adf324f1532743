"""Walk up the maximal-class 3-adic tower next to a uniform one.

Both families have dimension 2 and are 2-generated at every level. Only the
scalar one is powerful, and the torsion element w makes Omega_1 grow with n.

    python demos/maximal_class_tower.py [levels]
"""

import sys

from pcgroups import subgroups as sg
from pcgroups import towers as tw
from pcgroups.towers import TowerSpec, build_tower


def describe(text: str, levels: int) -> None:
    spec = TowerSpec.parse(text)
    print(spec.format())
    print(f"  {'n':>2} {'|G|':>8} {'d':>2} {'log|Omega_1|':>12} {'powerful':>9}  P-series indices")
    for n in range(1, levels + 1):
        G = build_tower(spec.at_level(n)).group
        om = sg.omega1(G).log_order
        idx = sg.lower_central_p_series(G).indices
        print(f"  {n:>2} {'3^' + str(G.n):>8} {sg.min_generators(G):>2} {om:>12} {str(sg.is_powerful(G)):>9}  {list(idx)}")


def main(levels: int = 3) -> None:
    describe("scalar:3:2:1:+:1", levels)
    print()
    describe("maxclass3:3:-:-:+:1", levels)
    print()

    # some power of the top generator should land in N minus N^p
    for text in ("scalar:3:2:1:+:3", "maxclass3:3:-:-:+:3"):
        r = tw.lemma25_check(build_tower(TowerSpec.parse(text)))
        print(f"{text:<22} lemma25 -> {r.status:<17} witness exponent {r.detail['witness_exponent']}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
