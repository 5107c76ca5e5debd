"""Beamformed incident power, the non-linear harvester and the battery.

Energy is carried in millijoules throughout: harvest rates are in mW and
slot times in seconds, so ``rate * t`` is mJ, and the per-replica quantum
``xi = P_u * t_T * L`` is mJ when ``P_u`` is given in mW.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError, InsufficientEnergyError, InvalidParameterError

__all__ = [
    "CsiMode",
    "CostModel",
    "EhCurve",
    "Battery",
    "incident_power",
    "harvest_rate",
    "charge",
    "spend",
    "spend_cost",
    "level",
    "max_copies",
    "max_extra_replicas",
    "packet_quantum",
]

# relative slack when flooring E / xi, so that 3 * xi / xi is level 3
_LEVEL_RTOL = 1e-9


class CsiMode(enum.Enum):
    FULL = "fcsi"
    AVERAGE = "acsi"

    @classmethod
    def parse(cls, text):
        key = str(text).strip().lower().replace("-", "").replace("_", "")
        for mode in cls:
            if mode.value == key:
                return mode
        raise InvalidParameterError(f"unknown CSI mode {text!r} (expected fcsi or acsi)")

    @property
    def label(self):
        return "F-CSI" if self is CsiMode.FULL else "A-CSI"


class CostModel(enum.Enum):
    FIXED = "fixed"
    CHANNEL_SCALED = "channel_scaled"

    @classmethod
    def parse(cls, text):
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise InvalidParameterError(
                f"unknown cost model {text!r} (expected fixed or channel_scaled)"
            ) from None


@dataclass(frozen=True)
class EhCurve:
    """Logistic-type harvester ``G(p) = W (1 - exp(-c0 p)) / (1 + exp(-c0 (p - c1)))``."""

    saturation_mw: float = 10.73
    c0: float = 0.2308
    c1: float = 5.365

    def __post_init__(self):
        if not self.saturation_mw > 0:
            raise InvalidParameterError("saturation_mw must be positive")
        if not self.c0 > 0:
            raise InvalidParameterError("c0 must be positive")


@dataclass(frozen=True)
class Battery:
    """Continuous store observed on a grid of ``quantum``-sized levels.

    Attributes
    ----------
    energy : float
        Stored energy, in the same unit as ``quantum``.
    quantum : float
        Energy of one packet replica.
    capacity : int
        Capacity in packets; the store is clipped at ``capacity * quantum``.
    """

    energy: float
    quantum: float
    capacity: int

    def __post_init__(self):
        if not self.quantum > 0:
            raise InvalidParameterError("battery quantum must be positive")
        if int(self.capacity) != self.capacity or self.capacity < 1:
            raise InvalidParameterError("battery capacity must be an integer >= 1")
        if not 0 <= self.energy <= self.full:
            raise InvalidParameterError(
                f"battery energy {self.energy!r} outside [0, {self.full!r}]"
            )

    @property
    def full(self):
        return self.capacity * self.quantum


def packet_quantum(tx_power_mw, data_slot_s, packet_size):
    """Energy ``P_u * t_T * L`` of one replica (mJ for mW inputs)."""
    if not (tx_power_mw > 0 and data_slot_s > 0 and packet_size > 0):
        raise InvalidParameterError("transmit power, slot length and packet size must be positive")
    return tx_power_mw * data_slot_s * packet_size


def incident_power(ch, pb_power_w, mode):
    """RF power reaching the harvester under MRT, in mW.

    F-CSI beams along the instantaneous channel and collects
    ``beta P_b ||los + scatter||**2``. A-CSI beams along the LOS mean and
    collects ``beta P_b | ||los|| + los^H scatter / ||los|| |**2``.

    Works along the last axis, so a batched ``scatter`` gives a batch of
    powers.
    """
    if not pb_power_w > 0:
        raise InvalidParameterError(f"PB power must be positive, got {pb_power_w!r}")
    mode = mode if isinstance(mode, CsiMode) else CsiMode.parse(mode)
    los = np.asarray(ch.los)
    scatter = np.asarray(ch.scatter)
    scale = ch.beta * pb_power_w * 1e3
    if mode is CsiMode.FULL:
        h = los + scatter
        gain = np.sum(h.real**2 + h.imag**2, axis=-1)
    else:
        norm = np.sqrt(np.sum(los.real**2 + los.imag**2))
        if norm == 0:
            raise DegenerateChannelError("A-CSI beamformer undefined for a zero LOS vector")
        proj = norm + (scatter @ los.conj()) / norm
        gain = proj.real**2 + proj.imag**2
    out = scale * gain
    return float(out) if np.ndim(out) == 0 else out


def harvest_rate(curve, p_inc_mw):
    """DC output power of the harvester for an incident power, in mW."""
    p = np.asarray(p_inc_mw, dtype=float)
    if np.any(p < 0) or np.any(np.isnan(p)):
        raise InvalidParameterError("incident power must be non-negative")
    # -expm1(-x) keeps full precision for tiny inputs
    num = -np.expm1(-curve.c0 * p)
    out = curve.saturation_mw * num / (1.0 + np.exp(-curve.c0 * (p - curve.c1)))
    return float(out) if out.ndim == 0 else out


def charge(b, rate_mw, t_c):
    """Add ``rate_mw * t_c`` to the store, clipping at capacity."""
    if rate_mw < 0 or t_c < 0:
        raise InvalidParameterError("charge rate and time must be non-negative")
    return Battery(min(b.full, b.energy + rate_mw * t_c), b.quantum, b.capacity)


def spend_cost(b, copies, model=CostModel.FIXED, g=None, d_bs=1.0, alpha=1.0):
    """Energy needed to send ``copies`` replicas under a cost model."""
    if copies < 0:
        raise InvalidParameterError("copies must be non-negative")
    if copies == 0:
        return 0.0
    cost = copies * b.quantum
    if model is CostModel.CHANNEL_SCALED:
        if g is None:
            raise InvalidParameterError("channel_scaled cost needs the data gain")
        cost *= g.power / d_bs**alpha
    return cost


def spend(b, copies, model=CostModel.FIXED, g=None, d_bs=1.0, alpha=1.0):
    """Withdraw the cost of ``copies`` replicas.

    Raises
    ------
    InsufficientEnergyError
        If the cost exceeds the stored energy beyond rounding.
    """
    cost = spend_cost(b, copies, model, g, d_bs, alpha)
    left = b.energy - cost
    if left < 0:
        if left < -_LEVEL_RTOL * b.full:
            raise InsufficientEnergyError(
                f"cannot spend {cost!r} from a battery holding {b.energy!r}"
            )
        left = 0.0
    return Battery(left, b.quantum, b.capacity)


def level(b):
    """Quantized state ``floor(E / xi)`` in ``0..capacity``."""
    q = b.energy / b.quantum
    return min(int(math.floor(q * (1 + _LEVEL_RTOL))), int(b.capacity))


def max_copies(b):
    """Total replicas the stored energy can pay for at the fixed cost."""
    return level(b)


def max_extra_replicas(b):
    """Replicas beyond the first copy, ``floor(E / xi) - 1``; ``None`` when empty."""
    n = level(b)
    return n - 1 if n >= 1 else None
