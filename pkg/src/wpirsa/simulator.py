"""Frame-level simulation loop.

Every frame starts with a charging slot and then ``K`` data slots. Per user:

1. draw the beacon channel and charge the battery for ``t_C``;
2. observe the battery level, which closes the previous frame's
   transition for the learner;
3. pick a replica count (Q-learning or the CRDSA baseline), pay for it and
   scatter the replicas over random slots.

The base station then peels the assembled frame and every user learns
whether its own packet got through.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import agent as ql
from .channel import sample_data_gain, sample_eh_channel
from .errors import InvalidParameterError, UndefinedStatisticError
from .harvest import Battery, CostModel, harvest_rate, incident_power, level, spend, spend_cost
from .protocol import FrameAlloc, crdsa_policy, empirical_pmf, select_slots, sic_decode

__all__ = [
    "FrameMetrics",
    "RunSummary",
    "Aggregate",
    "World",
    "run_seeds",
    "step_frame",
    "run",
    "run_many",
    "aggregate",
]

log = logging.getLogger(__name__)


@dataclass
class FrameMetrics:
    """What happened in one frame; energies are in mJ."""

    frame: int
    levels: tuple
    actions: tuple
    copies: tuple
    slots: tuple
    decoded: frozenset
    rewards: tuple
    harvested: tuple
    discarded: tuple
    spent: tuple
    energy: tuple

    @property
    def decoded_count(self):
        return len(self.decoded)


@dataclass
class RunSummary:
    """Metrics of one simulated run.

    Attributes
    ----------
    mean_success : float
        Decoded packets per frame, averaged over the run.
    success_series : numpy.ndarray
        Decoded packets in each frame.
    pmfs : list of ReplicaPmf
        Per-user empirical distribution of copies sent per frame.
    energy_trace : numpy.ndarray
        Mean end-of-frame battery content across users, in packets.
    copies_total : numpy.ndarray
        Replicas sent by each user over the run.
    """

    run_index: int
    mean_success: float
    success_series: np.ndarray
    pmfs: list
    energy_trace: np.ndarray
    copies_total: np.ndarray
    q_tables: list = field(default_factory=list, repr=False)


@dataclass
class Aggregate:
    runs: int
    mean_success: float
    std_success: float
    series_mean: np.ndarray
    series_std: np.ndarray
    energy_mean: np.ndarray
    energy_std: np.ndarray

    @property
    def sem_success(self):
        return self.std_success / np.sqrt(self.runs)


def run_seeds(master_seed, run_index):
    """Independent channel, decision and slot streams for one run."""
    root = np.random.SeedSequence(entropy=master_seed, spawn_key=(run_index,))
    return [np.random.default_rng(s) for s in root.spawn(3)]


class World:
    """Mutable state of one run: batteries, Q-tables and random streams.

    Parameters
    ----------
    config : ScenarioConfig
    run_index : int
        Selects the run's seed stream under ``config.seed``.
    q_tables : list of QTable, optional
        Starting tables (copied); fresh tables otherwise.
    learn : bool
        When false, tables are frozen and only acted upon.
    epsilon : float, optional
        Fixed exploration rate overriding the decay schedule.
    """

    def __init__(self, config, run_index=0, q_tables=None, learn=True, epsilon=None):
        self.config = config
        self.run_index = run_index
        self.channel = config.channel_params()
        self.curve = config.eh_curve()
        self.learning = config.learning_params()
        self.learn = learn
        self.epsilon = epsilon
        self.rng_channel, self.rng_agent, self.rng_slots = run_seeds(config.seed, run_index)
        xi = config.quantum
        e0 = config.initial_energy * xi
        self.batteries = [Battery(e0, xi, config.battery_capacity) for _ in range(config.users)]
        n_actions = config.max_packets
        if q_tables is not None:
            if len(q_tables) != config.users:
                raise InvalidParameterError("need one Q-table per user")
            self.q = [t.copy() for t in q_tables]
        elif config.random_q_init:
            self.q = [ql.QTable.random(config.battery_capacity, n_actions, self.rng_agent)
                      for _ in range(config.users)]
        else:
            self.q = [ql.QTable(config.battery_capacity, n_actions) for _ in range(config.users)]
        # (state, action, reward) awaiting the next observed level
        self.pending = [None] * config.users
        self.t = 0

    @property
    def energies(self):
        return [b.energy for b in self.batteries]


def _charge_all(world):
    cfg = world.config
    ch = sample_eh_channel(world.channel, world.rng_channel, size=cfg.users)
    p_inc = incident_power(ch, cfg.pb_power_w, cfg.csi_mode)
    rates = cfg.charge_efficiency * harvest_rate(world.curve, p_inc)
    harvested, discarded = [], []
    for u, b in enumerate(world.batteries):
        gained = float(rates[u]) * cfg.charging_slot_s
        raw = b.energy + gained
        full = b.full
        world.batteries[u] = Battery(min(raw, full), b.quantum, b.capacity)
        harvested.append(gained)
        discarded.append(max(0.0, raw - full))
    return harvested, discarded


def step_frame(world, allocation=None):
    """Advance ``world`` by one frame.

    Parameters
    ----------
    allocation : mapping of user to slots, optional
        Forces the slots used by the listed users (their copy count follows
        from the list); everyone else decides as usual. Meant for replaying
        hand-built frames.

    Returns
    -------
    FrameMetrics
    """
    cfg = world.config
    t = world.t
    K = cfg.slots_per_frame
    harvested, discarded = _charge_all(world)
    eps = world.epsilon if world.epsilon is not None else ql.epsilon_at(world.learning, t)
    scaled = cfg.cost_model is CostModel.CHANNEL_SCALED

    levels, actions, copies, spent, picks = [], [], [], [], []
    for u in range(cfg.users):
        b = world.batteries[u]
        s = level(b)
        if world.learn and not cfg.baseline and world.pending[u] is not None:
            ps, pa, pr = world.pending[u]
            ql.update(world.q[u], ps, pa, pr, s, world.learning.learning_rate,
                      world.learning.discount)

        gain = sample_data_gain(world.channel, world.rng_channel) if scaled else None
        unit = spend_cost(b, 1, cfg.cost_model, gain, cfg.bs_user_distance_m,
                          cfg.pathloss_exponent)
        feasible = ql.feasible_actions(b, cfg.max_packets, max_total=K, copy_cost=unit or None)
        silent = s == 0 or unit > b.energy * (1 + 1e-9)

        if allocation is not None and u in allocation:
            n = len(allocation[u])
            a = max(n - 1, 0)
        elif cfg.baseline:
            n = 0 if silent else min(crdsa_policy(b), K)
            if scaled:
                n = min(n, len(feasible))
            a = max(n - 1, 0)
        else:
            a = ql.select_action(world.q[u], s, eps, feasible, world.rng_agent)
            n = 0 if silent else 1 + a

        before = b.energy
        world.batteries[u] = spend(b, n, cfg.cost_model, gain, cfg.bs_user_distance_m,
                                   cfg.pathloss_exponent)
        if allocation is not None and u in allocation:
            slots = tuple(sorted(allocation[u]))
        else:
            slots = select_slots(n, K, world.rng_slots)
        levels.append(s)
        actions.append(a)
        copies.append(n)
        spent.append(before - world.batteries[u].energy)
        picks.append(slots)

    frame = FrameAlloc.from_slots(K, picks)
    result = sic_decode(frame)
    if cfg.shared_reward:
        rewards = tuple(float(result.count) for _ in range(cfg.users))
    else:
        rewards = tuple(1.0 if u in result.decoded_users else 0.0 for u in range(cfg.users))
    for u in range(cfg.users):
        world.pending[u] = (levels[u], actions[u], rewards[u])
    world.t += 1
    return FrameMetrics(
        frame=t,
        levels=tuple(levels),
        actions=tuple(actions),
        copies=tuple(copies),
        slots=tuple(picks),
        decoded=result.decoded_users,
        rewards=rewards,
        harvested=tuple(harvested),
        discarded=tuple(discarded),
        spent=tuple(spent),
        energy=tuple(world.energies),
    )


def run(config, run_index=0, frame_log=None, **world_kw):
    """Simulate ``config.frames`` frames of one run.

    Deterministic in ``(config, run_index)``. ``frame_log``, if given, is
    called with every :class:`FrameMetrics`.
    """
    world = World(config, run_index, **world_kw)
    n = config.frames
    success = np.zeros(n)
    energy = np.zeros(n)
    history = [[] for _ in range(config.users)]
    xi = config.quantum
    for i in range(n):
        m = step_frame(world)
        success[i] = m.decoded_count
        energy[i] = np.mean(m.energy) / xi
        for u, c in enumerate(m.copies):
            history[u].append(c)
        if frame_log is not None:
            frame_log(m)
    top = config.max_packets
    return RunSummary(
        run_index=run_index,
        mean_success=float(success.mean()),
        success_series=success,
        pmfs=[empirical_pmf(h, top) for h in history],
        energy_trace=energy,
        copies_total=np.array([sum(h) for h in history]),
        q_tables=world.q,
    )


def _run_job(args):
    config, idx = args
    return run(config, idx)


def run_many(config, parallel=1):
    """All ``config.runs`` runs, in run-index order."""
    jobs = [(config, i) for i in range(config.runs)]
    if parallel > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(_run_job, jobs))
    return [_run_job(j) for j in jobs]


def aggregate(summaries):
    """Across-run mean and sample standard deviation (zero for one run)."""
    summaries = list(summaries)
    if not summaries:
        raise UndefinedStatisticError("cannot aggregate zero runs")
    lengths = {len(s.success_series) for s in summaries}
    if len(lengths) != 1:
        raise InvalidParameterError("runs have different frame counts")
    ddof = 1 if len(summaries) > 1 else 0
    means = np.array([s.mean_success for s in summaries])
    series = np.stack([s.success_series for s in summaries])
    energy = np.stack([s.energy_trace for s in summaries])
    return Aggregate(
        runs=len(summaries),
        mean_success=float(means.mean()),
        std_success=float(means.std(ddof=ddof)),
        series_mean=series.mean(axis=0),
        series_std=series.std(axis=0, ddof=ddof),
        energy_mean=energy.mean(axis=0),
        energy_std=energy.std(axis=0, ddof=ddof),
    )
