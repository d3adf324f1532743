"""The bundled group maxclass81_a has d(G) = log_3 |Omega_1(G)| = 2 but is not
powerful. This script recomputes that three ways: from the pc presentation,
from a Cayley table built by brute force, and via the harness verdict.

    python demos/order81_witness.py
"""

import itertools

from pcgroups import harness as hs
from pcgroups import subgroups as sg
from pcgroups.catalog import find_group
from pcgroups.pcp import format_pcp


def closure(table, gens, identity):
    seen = {identity}
    frontier = [identity]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = table[x, g]
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


def main() -> None:
    G = find_group("maxclass81_a")
    print("presentation:")
    print("  " + "\n  ".join(line for line in format_pcp(G.presentation).splitlines() if line))

    # engine view
    print("\nfrom the collector:")
    print(f"  d(G)           = {sg.min_generators(G)}")
    print(f"  |Omega_1(G)|   = 3^{sg.omega1(G).log_order}, elementary abelian: "
          f"{sg.is_elementary_abelian(sg.omega1(G))}")
    print(f"  |G'| = 3^{sg.derived_subgroup(G).log_order}, |G^3| = 3^{sg.agemo(G).log_order}")
    print(f"  powerful       = {sg.is_powerful(G)}")

    # brute force: Cayley table, associativity, then the same invariants
    elems = list(G.enumerate_elements())
    table = {(a, b): G.multiply(a, b) for a, b in itertools.product(elems, repeat=2)}
    assoc = all(table[table[a, b], c] == table[a, table[b, c]]
                for a, b, c in itertools.product(elems, repeat=3))
    e = G.identity
    cubes = {G.power(x, 3) for x in elems}
    comms = {G.commutator(x, y) for x, y in itertools.product(elems, repeat=2)}
    agemo = closure(table, cubes, e)
    derived = closure(table, comms, e)
    omega = closure(table, [x for x in elems if G.power(x, 3) == e], e)
    frattini = closure(table, agemo | derived, e)
    print("\nfrom the Cayley table:")
    print(f"  associative on all 81^3 triples: {assoc}")
    print(f"  |G : Phi(G)| = {len(elems) // len(frattini)}, |Omega_1| = {len(omega)}")
    print(f"  G' inside G^3: {derived <= agemo}")

    v = hs.question_verdict(G)
    print("\nharness verdict:", "CRITICAL" if v.critical else "ok")
    print(hs.render_critical(v) if v.critical else "")


if __name__ == "__main__":
    main()
