"""Parameter sweeps and their CSV output.

A sweep file is a config file with extra ``sweep.*`` keys::

    sweep.param = pb_power_w
    sweep.values = 1, 2, 4, 6, 8
    sweep.schemes = qlearning, crdsa
    sweep.csi_modes = fcsi, acsi
    sweep.antennas = 4, 8
    charge_efficiency = 36000

Every other key sets the base scenario.
"""

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .config import SCHEMES, ScenarioConfig, format_value, iter_pairs, parse_config, parse_value
from .errors import ConfigError, WpirsaError
from .harvest import CsiMode
from .simulator import aggregate, run

__all__ = [
    "CSV_HEADER",
    "SWEEPABLE",
    "SweepSpec",
    "SweepRow",
    "SweepError",
    "parse_sweep",
    "load_sweep",
    "preset_names",
    "load_preset",
    "run_sweep",
    "emit_csv",
    "read_csv",
    "format_csv",
]

log = logging.getLogger(__name__)

CSV_HEADER = ("swept_param", "value", "scheme", "csi_mode", "antennas",
              "mean_success_per_frame", "std", "runs", "frames", "seed")

SWEEPABLE = ("pb_power_w", "users", "charging_slot_s", "kappa_db", "antennas")

_ALIASES = {"t_c": "charging_slot_s", "kappa": "kappa_db", "pb_power": "pb_power_w"}


class SweepError(WpirsaError):
    """A sweep point failed; ``rows`` holds the points that finished."""

    def __init__(self, message, rows):
        super().__init__(message)
        self.rows = rows


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple
    base: ScenarioConfig = field(default_factory=ScenarioConfig)
    schemes: tuple = ("qlearning",)
    csi_modes: tuple = (CsiMode.FULL,)
    antennas: tuple = None
    output: str = None

    def __post_init__(self):
        param = _ALIASES.get(self.param.lower(), self.param)
        if param not in SWEEPABLE:
            raise ConfigError(f"cannot sweep {self.param!r}; choose from {', '.join(SWEEPABLE)}",
                              "sweep.param")
        object.__setattr__(self, "param", param)
        if not self.values:
            raise ConfigError("value list is empty", "sweep.values")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}", "sweep.schemes")
        if not self.schemes or not self.csi_modes:
            raise ConfigError("need at least one scheme and one CSI mode")
        antennas = self.antennas or (self.base.antennas,)
        object.__setattr__(self, "antennas", tuple(antennas))
        # building the configs rejects invalid values before any work starts
        self.points()

    def points(self):
        """``(value, scheme, csi, M, config)`` in output order."""
        out = []
        sweep_m = self.param == "antennas"
        for v in self.values:
            for scheme in self.schemes:
                for csi in self.csi_modes:
                    for m in ((v,) if sweep_m else self.antennas):
                        changes = {"scheme": scheme, "csi_mode": csi, "antennas": m}
                        changes[self.param] = v
                        cfg = self.base.replace(**changes)
                        out.append((v, scheme, csi, m, cfg))
        return out


@dataclass(frozen=True)
class SweepRow:
    swept_param: str
    value: object
    scheme: str
    csi_mode: str
    antennas: int
    mean_success_per_frame: float
    std: float
    runs: int
    frames: int
    seed: int

    def cells(self):
        value = "" if self.value is None else format_value(self.value)
        return [self.swept_param, value, self.scheme, self.csi_mode,
                str(self.antennas), repr(float(self.mean_success_per_frame)),
                repr(float(self.std)), str(self.runs), str(self.frames), str(self.seed)]


def _split(text):
    return [p.strip() for p in text.split(",") if p.strip()]


def parse_sweep(text, source="<string>", overrides=None):
    """Parse sweep text; ``overrides`` are config fields applied last."""
    sweep, rest = {}, []
    for lineno, key, value in iter_pairs(text, source):
        if key.startswith("sweep."):
            sweep[key[len("sweep."):]] = value
        else:
            rest.append(f"{key} = {value}")
    base = parse_config("\n".join(rest), source=source)
    if overrides:
        base = base.replace(**overrides)
    unknown = set(sweep) - {"param", "values", "schemes", "csi_modes", "antennas", "output"}
    if unknown:
        raise ConfigError("unknown key", "sweep." + sorted(unknown)[0])
    if "param" not in sweep or "values" not in sweep:
        raise ConfigError("sweep files need sweep.param and sweep.values")
    param = _ALIASES.get(sweep["param"].lower(), sweep["param"])
    if param not in SWEEPABLE:
        raise ConfigError(f"cannot sweep {param!r}", "sweep.param")
    values = tuple(parse_value(param, v) for v in _split(sweep["values"]))
    schemes = tuple(s.lower() for s in _split(sweep.get("schemes", "qlearning")))
    try:
        csi = tuple(CsiMode.parse(c) for c in _split(sweep.get("csi_modes", "fcsi")))
    except WpirsaError as exc:
        raise ConfigError(str(exc), "sweep.csi_modes") from None
    antennas = None
    if "antennas" in sweep:
        antennas = tuple(parse_value("antennas", a) for a in _split(sweep["antennas"]))
    return SweepSpec(param, values, base, schemes, csi, antennas, sweep.get("output"))


def load_sweep(path, overrides=None):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_sweep(text, str(path), overrides)


def preset_names():
    files = resources.files("wpirsa.presets").iterdir()
    return sorted(f.name[:-4] for f in files if f.name.endswith(".cfg"))


def load_preset(name, overrides=None):
    if name not in preset_names():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    text = resources.files("wpirsa.presets").joinpath(name + ".cfg").read_text(encoding="utf-8")
    return parse_sweep(text, f"preset:{name}", overrides)


def _simulate_point(cfg):
    summaries = [run(cfg, i) for i in range(cfg.runs)]
    agg = aggregate(summaries)
    pmf = np.mean([[p.probabilities for p in s.pmfs] for s in summaries], axis=(0, 1))
    trace = {
        "series_mean": agg.series_mean.tolist(),
        "series_std": agg.series_std.tolist(),
        "energy_mean": agg.energy_mean.tolist(),
        "replica_pmf": pmf.tolist(),
    }
    return agg.mean_success, agg.std_success, trace


def run_sweep(spec, parallel=1, log_json=None):
    """Simulate every sweep point and return the rows in a fixed order.

    Parameters
    ----------
    spec : SweepSpec
    parallel : int
        Worker processes; the output does not depend on it.
    log_json : str or Path, optional
        Also write per-frame series of every point as JSON.

    Raises
    ------
    SweepError
        When a point fails. Finished rows are attached and, if
        ``spec.output`` is set, written there first.
    """
    points = spec.points()
    results = [None] * len(points)
    error = None
    configs = [p[-1] for p in points]
    if parallel > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            futures = [pool.submit(_simulate_point, c) for c in configs]
            for i, fut in enumerate(futures):
                try:
                    results[i] = fut.result()
                except Exception as exc:  # noqa: BLE001 - reported with partial rows
                    error = error or exc
    else:
        for i, cfg in enumerate(configs):
            try:
                results[i] = _simulate_point(cfg)
            except Exception as exc:  # noqa: BLE001
                error = exc
                break

    rows, traces = [], []
    for (v, scheme, csi, m, cfg), res in zip(points, results):
        if res is None:
            continue
        mean, std, trace = res
        rows.append(SweepRow(spec.param, v, scheme, csi.value, m, mean, std,
                             cfg.runs, cfg.frames, cfg.seed))
        traces.append({"value": v, "scheme": scheme, "csi_mode": csi.value,
                       "antennas": m, **trace})
    if error is not None:
        if spec.output and rows:
            emit_csv(rows, spec.output)
        raise SweepError(f"sweep aborted: {error}", rows) from error
    if log_json is not None:
        Path(log_json).write_text(json.dumps({"param": spec.param, "points": traces}),
                                  encoding="utf-8")
    return rows


def format_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def emit_csv(rows, path):
    """Write rows under the fixed header, UTF-8 with LF endings."""
    rows = list(rows)
    if not rows:
        raise WpirsaError("refusing to write an empty result table")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(rows))


def _cell_value(param, text):
    if text == "":
        return None
    return parse_value(param, text) if param in SWEEPABLE else text


def read_csv(path):
    """Parse a file written by :func:`emit_csv` back into rows."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise WpirsaError(f"unexpected header {header}")
        rows = []
        for rec in reader:
            param = rec[0]
            rows.append(SweepRow(param, _cell_value(param, rec[1]), rec[2], rec[3], int(rec[4]),
                                 float(rec[5]), float(rec[6]), int(rec[7]), int(rec[8]),
                                 int(rec[9])))
    return rows
