"""IRSA frame construction and successive interference cancellation.

A frame is a bipartite graph between users and ``K`` data slots. The base
station peels it: any slot holding a single replica yields that user's
packet, whose other replicas are then cancelled from their slots.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, InvalidRequestError, UndefinedStatisticError
from .harvest import level

__all__ = [
    "FrameAlloc",
    "DecodeResult",
    "ReplicaPmf",
    "select_slots",
    "sic_decode",
    "crdsa_policy",
    "empirical_pmf",
]


@dataclass(frozen=True)
class FrameAlloc:
    """User-to-slot edges of one frame.

    Build it with :meth:`from_slots` rather than listing edges by hand.
    """

    slots_per_frame: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        K = self.slots_per_frame
        if int(K) != K or K < 1:
            raise InvalidParameterError(f"slots_per_frame must be a positive integer, got {K!r}")
        edges = frozenset((int(u), int(s)) for u, s in self.edges)
        for u, s in edges:
            if not 0 <= s < K:
                raise InvalidParameterError(f"slot {s} out of range for K={K}")
            if u < 0:
                raise InvalidParameterError(f"negative user index {u}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_slots(cls, slots_per_frame, allocations):
        """Build from ``{user: slots}`` or a sequence indexed by user."""
        if not hasattr(allocations, "items"):
            allocations = dict(enumerate(allocations))
        edges = []
        for u, slots in allocations.items():
            slots = list(slots)
            if len(set(slots)) != len(slots):
                raise InvalidParameterError(f"user {u} lists a slot twice")
            edges.extend((u, s) for s in slots)
        return cls(slots_per_frame, frozenset(edges))

    @property
    def users(self):
        return frozenset(u for u, _ in self.edges)

    def slots_of(self, user):
        return sorted(s for u, s in self.edges if u == user)

    def slot_loads(self):
        """Number of replicas landing in each slot."""
        loads = np.zeros(self.slots_per_frame, dtype=int)
        for _, s in self.edges:
            loads[s] += 1
        return loads

    def without_user(self, user):
        return FrameAlloc(self.slots_per_frame, frozenset(e for e in self.edges if e[0] != user))


@dataclass(frozen=True)
class DecodeResult:
    decoded_users: frozenset
    iterations: int
    per_iteration_decodes: tuple = field(default=())

    @property
    def count(self):
        return len(self.decoded_users)


@dataclass(frozen=True)
class ReplicaPmf:
    """Empirical distribution of copies per frame, indexed by copy count."""

    probabilities: tuple

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < 0) or not np.isclose(p.sum(), 1.0):
            raise InvalidParameterError("probabilities must be non-negative and sum to 1")

    def __getitem__(self, copies):
        return self.probabilities[copies]

    def polynomial(self, x):
        """Evaluate ``sum_k p_k x**k``."""
        return float(np.polynomial.polynomial.polyval(x, self.probabilities))

    def mean(self):
        return float(np.dot(np.arange(len(self.probabilities)), self.probabilities))


def select_slots(copies, K, rng):
    """Pick ``copies`` distinct slots of ``0..K-1`` uniformly at random."""
    if copies < 0:
        raise InvalidRequestError(f"copies must be non-negative, got {copies}")
    if copies > K:
        raise InvalidRequestError(f"cannot place {copies} replicas in {K} slots")
    if copies == 0:
        return ()
    return tuple(sorted(int(s) for s in rng.choice(K, size=copies, replace=False)))


def sic_decode(frame):
    """Peel the frame to a fixpoint.

    Each iteration decodes the user sitting alone in the lowest-indexed
    singleton slot and cancels all of that user's replicas. The decoded
    set does not depend on this tie rule; only the recorded order does.
    """
    occupants = [set() for _ in range(frame.slots_per_frame)]
    slots_of = {}
    for u, s in frame.edges:
        occupants[s].add(u)
        slots_of.setdefault(u, []).append(s)

    order = []
    while True:
        for occ in occupants:
            if len(occ) == 1:
                (u,) = occ
                break
        else:
            break
        order.append(u)
        for s in slots_of[u]:
            occupants[s].discard(u)
    return DecodeResult(frozenset(order), len(order), tuple(order))


def crdsa_policy(b):
    """Total copies sent by the two-replica baseline: 2, or 1 if only one is affordable."""
    return min(level(b), 2)


def empirical_pmf(history, N):
    """Frequencies of per-frame copy counts ``0..N+1``."""
    history = list(history)
    if not history:
        raise UndefinedStatisticError("empirical PMF of an empty history")
    top = N + 1
    counts = Counter(history)
    bad = [c for c in counts if not 0 <= c <= top]
    if bad:
        raise InvalidParameterError(f"copy counts {sorted(bad)} outside 0..{top}")
    n = len(history)
    return ReplicaPmf(tuple(counts.get(k, 0) / n for k in range(top + 1)))
