"""Enumerate weighted pc presentations of order p^n and bucket them by invariants.

Used once to assemble the bundled catalog files; prints one representative
presentation per signature class.

    python tools/search_presentations.py 3 4            # exhaustive
    python tools/search_presentations.py 3 5 20000 1    # seeded sample
"""

import itertools
import random
import sys

from pcgroups.catalog import invariant_signature
from pcgroups.pcp import PcPresentation, PcGroup, check_consistency, format_pcp


def words_over(gens, p):
    for exps in itertools.product(range(p), repeat=len(gens)):
        yield tuple((g, e) for g, e in zip(gens, exps) if e)


def presentations(p, n):
    pow_choices = [list(words_over(range(i + 1, n + 1), p)) for i in range(1, n + 1)]
    pairs = [(j, i) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    comm_choices = [list(words_over(range(j + 1, n + 1), p)) for j, i in pairs]
    for pows in itertools.product(*pow_choices):
        for comms in itertools.product(*comm_choices):
            yield PcPresentation(
                p, n,
                {i + 1: w for i, w in enumerate(pows) if w},
                {pr: w for pr, w in zip(pairs, comms) if w},
            )


def sampled(p, n, count, seed):
    rng = random.Random(seed)
    pow_choices = [list(words_over(range(i + 1, n + 1), p)) for i in range(1, n + 1)]
    pairs = [(j, i) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    comm_choices = [list(words_over(range(j + 1, n + 1), p)) for j, i in pairs]
    for _ in range(count):
        # bias towards sparse relations, which are consistent more often
        pows = [rng.choice(c) if rng.random() < 0.5 else () for c in pow_choices]
        comms = [rng.choice(c) if rng.random() < 0.4 else () for c in comm_choices]
        yield PcPresentation(
            p, n,
            {i + 1: w for i, w in enumerate(pows) if w},
            {pr: w for pr, w in zip(pairs, comms) if w},
        )


def main():
    p, n = int(sys.argv[1]), int(sys.argv[2])
    source = presentations(p, n)
    if len(sys.argv) > 3:
        source = sampled(p, n, int(sys.argv[3]), int(sys.argv[4]) if len(sys.argv) > 4 else 0)
    reps = {}
    seen = 0
    for pres in source:
        if check_consistency(pres).failures:
            continue
        seen += 1
        G = PcGroup(pres)
        sig = invariant_signature(G)
        if sig not in reps:
            reps[sig] = pres
    print(f"# consistent presentations: {seen}; signature classes: {len(reps)}")
    for k, (sig, pres) in enumerate(sorted(reps.items(), key=lambda kv: kv[0])):
        print(f"# {sig}")
        print(format_pcp(PcPresentation(p, n, pres.power_relations,
                                        pres.commutator_relations, f"cand{k}")))


if __name__ == "__main__":
    main()
