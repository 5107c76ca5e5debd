"""Reference implementations used only as independent test oracles."""

import itertools
from functools import lru_cache


def all_peelings(edges):
    """Decoded sets reachable by every possible peeling order.

    Explores every choice of singleton slot at every step, starting from a
    set of ``(user, slot)`` edges. Returns the set of terminal decoded sets.
    """

    @lru_cache(maxsize=None)
    def explore(remaining, decoded):
        occupancy = {}
        for u, s in remaining:
            occupancy.setdefault(s, []).append(u)
        singles = {occ[0] for occ in occupancy.values() if len(occ) == 1}
        if not singles:
            return frozenset([decoded])
        out = set()
        for u in singles:
            rest = frozenset(e for e in remaining if e[0] != u)
            out |= explore(rest, decoded | {u})
        return frozenset(out)

    return set(explore(frozenset(edges), frozenset()))


def random_peeling(edges, rng):
    """Peel by picking a uniformly random singleton slot at each step."""
    remaining = set(edges)
    decoded = []
    while True:
        occupancy = {}
        for u, s in remaining:
            occupancy.setdefault(s, []).append(u)
        singles = sorted(s for s, occ in occupancy.items() if len(occ) == 1)
        if not singles:
            return set(decoded)
        s = singles[rng.integers(len(singles))]
        u = occupancy[s][0]
        decoded.append(u)
        remaining = {e for e in remaining if e[0] != u}


def all_frames(U, K):
    """Every edge subset of the complete ``U x K`` bipartite graph."""
    cells = list(itertools.product(range(U), range(K)))
    for mask in range(1 << len(cells)):
        yield frozenset(c for i, c in enumerate(cells) if mask >> i & 1)


def two_user_pair_success(K):
    """Mean decoded users when two users each place 2 replicas in K slots.

    Enumerates every pair of slot pairs and peels each with the exhaustive
    oracle above.
    """
    pairs = list(itertools.combinations(range(K), 2))
    total = 0
    for p, q in itertools.product(pairs, pairs):
        edges = {(0, s) for s in p} | {(1, s) for s in q}
        (decoded,) = all_peelings(edges)
        total += len(decoded)
    return total / len(pairs) ** 2
