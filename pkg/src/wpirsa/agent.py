"""Tabular Q-learning over (battery level, extra replicas).

An action ``a`` means "send ``1 + a`` copies"; at battery level 0 the only
available action is 0 and nothing is sent.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, InvalidParameterError
from .harvest import level

__all__ = [
    "QTable",
    "LearningParams",
    "feasible_actions",
    "copies_for",
    "select_action",
    "update",
    "epsilon_at",
]


class QTable:
    """Dense action-value table of shape ``(levels + 1, max_extra + 1)``.

    Parameters
    ----------
    levels : int
        Highest battery level (the capacity in packets).
    max_extra : int
        Highest action, i.e. the largest number of extra replicas.
    values : array_like, optional
        Initial values; zeros when omitted.
    """

    def __init__(self, levels, max_extra, values=None):
        shape = (int(levels) + 1, int(max_extra) + 1)
        if values is None:
            values = np.zeros(shape)
        values = np.array(values, dtype=float)
        if values.shape != shape:
            raise InvalidParameterError(f"Q-table must have shape {shape}, got {values.shape}")
        self.values = values

    @classmethod
    def random(cls, levels, max_extra, rng):
        """Uniform ``[0, 1)`` initial values."""
        return cls(levels, max_extra, rng.random((int(levels) + 1, int(max_extra) + 1)))

    @property
    def n_states(self):
        return self.values.shape[0]

    @property
    def n_actions(self):
        return self.values.shape[1]

    def copy(self):
        return QTable(self.n_states - 1, self.n_actions - 1, self.values.copy())

    def greedy(self, s, feasible=None):
        """Highest-valued action in state ``s``; ties go to the lowest index."""
        row = self.values[s]
        if feasible is None:
            return int(np.argmax(row))
        best = None
        for a in feasible:
            if best is None or row[a] > row[best]:
                best = a
        return best

    def rows(self):
        """Flat ``(state, action, value)`` triples in row-major order."""
        return [(s, a, float(self.values[s, a]))
                for s in range(self.n_states) for a in range(self.n_actions)]

    def export_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["state", "action", "value"])
            for s, a, v in self.rows():
                w.writerow([s, a, repr(v)])

    def __eq__(self, other):
        return isinstance(other, QTable) and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"QTable(levels={self.n_states - 1}, max_extra={self.n_actions - 1})"


@dataclass(frozen=True)
class LearningParams:
    """Q-learning hyper-parameters.

    ``decay_rate=None`` picks the geometric rate that takes epsilon from
    ``epsilon0`` to ``epsilon_min`` over ``horizon`` frames.
    """

    learning_rate: float = 0.1
    discount: float = 0.1
    epsilon0: float = 0.5
    decay_rate: float = None
    horizon: int = 5000
    epsilon_min: float = 0.01

    def __post_init__(self):
        if not 0 < self.learning_rate <= 1:
            raise InvalidParameterError("learning_rate must lie in (0, 1]")
        if not 0 <= self.discount < 1:
            raise InvalidParameterError("discount must lie in [0, 1)")
        if not 0 <= self.epsilon0 <= 1:
            raise InvalidParameterError("epsilon0 must lie in [0, 1]")
        if not 0 <= self.epsilon_min <= 1:
            raise InvalidParameterError("epsilon_min must lie in [0, 1]")
        if self.horizon < 1:
            raise InvalidParameterError("horizon must be >= 1")
        if self.decay_rate is not None and not 0 < self.decay_rate <= 1:
            raise InvalidParameterError("decay_rate must lie in (0, 1]")

    @property
    def effective_decay(self):
        if self.decay_rate is not None:
            return self.decay_rate
        if self.epsilon0 <= self.epsilon_min or self.epsilon_min <= 0:
            return 1.0
        return (self.epsilon_min / self.epsilon0) ** (1.0 / self.horizon)


def epsilon_at(p, t):
    """Exploration probability at frame ``t``."""
    if t < 0:
        raise InvalidParameterError("frame index must be non-negative")
    eps = p.epsilon0 * p.effective_decay**t
    return max(eps, min(p.epsilon_min, p.epsilon0))


def copies_for(b, a):
    """Total copies sent when action ``a`` is taken with battery ``b``."""
    return 0 if level(b) == 0 else 1 + a


def feasible_actions(b, N, max_total=None, copy_cost=None):
    """Actions whose ``1 + a`` copies fit the battery, ``N + 1`` and ``max_total``.

    ``copy_cost`` overrides the per-copy energy (the battery quantum by
    default). An empty battery allows only the silent action 0; so does a
    battery that cannot pay for one copy at ``copy_cost``, in which case
    the caller must send nothing.
    """
    if level(b) == 0:
        return (0,)
    cost = b.quantum if copy_cost is None else copy_cost
    budget = N + 1
    if max_total is not None:
        budget = min(budget, max_total)
    if cost > 0:
        budget = min(budget, int(math.floor(b.energy / cost * (1 + 1e-9))))
    if budget < 1:
        return (0,)
    return tuple(range(budget))


def select_action(q, s, eps, feasible, rng):
    """Epsilon-greedy choice restricted to ``feasible``."""
    if not feasible:
        raise ContractViolationError("no feasible action")
    if rng.random() < eps:
        return feasible[int(rng.integers(len(feasible)))]
    return q.greedy(s, feasible)


def update(q, s, a, r, s_next, mu, delta):
    """One Bellman backup of cell ``(s, a)``; mutates and returns ``q``."""
    v = q.values
    v[s, a] = (1.0 - mu) * v[s, a] + mu * (r + delta * v[s_next].max())
    return q
