"""Monte Carlo simulator of an RF-powered IRSA uplink with Q-learning users."""

from .agent import LearningParams, QTable, epsilon_at, feasible_actions, select_action, update
from .channel import (ChannelParams, DataGain, EhChannel, los_steering, pathloss_gain,
                      sample_data_gain, sample_eh_channel)
from .config import ScenarioConfig, dump_config, load_config, parse_config
from .errors import (ConfigError, ContractViolationError, DegenerateChannelError,
                     InsufficientEnergyError, InvalidParameterError, InvalidRequestError,
                     UndefinedStatisticError, WpirsaError)
from .harvest import (Battery, CostModel, CsiMode, EhCurve, charge, harvest_rate,
                      incident_power, level, max_copies, spend)
from .protocol import (DecodeResult, FrameAlloc, ReplicaPmf, crdsa_policy, empirical_pmf,
                       select_slots, sic_decode)
from .simulator import Aggregate, FrameMetrics, RunSummary, World, aggregate, run, run_many, step_frame

__version__ = "0.1.0"
