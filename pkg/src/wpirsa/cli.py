"""Command line entry point: ``wpirsa run|sweep|decode|presets``."""

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import load_config
from .errors import WpirsaError
from .protocol import FrameAlloc, sic_decode
from .simulator import aggregate, run_many
from .sweep import SweepRow, emit_csv, format_csv, load_preset, load_sweep, preset_names, run_sweep

log = logging.getLogger("wpirsa")


def _overrides(args):
    out = {}
    for key in ("seed", "runs", "frames"):
        v = getattr(args, key)
        if v is not None:
            out[key] = v
    return out


def _write(text_rows, args):
    if args.out:
        emit_csv(text_rows, args.out)
        log.info("wrote %d rows to %s", len(text_rows), args.out)
    else:
        sys.stdout.write(format_csv(text_rows))


def cmd_run(args):
    cfg = load_config(args.config)
    over = _overrides(args)
    if over:
        cfg = cfg.replace(**over)
    summaries = run_many(cfg, parallel=args.parallel)
    agg = aggregate(summaries)
    row = SweepRow("none", None, cfg.scheme, cfg.csi_mode.value, cfg.antennas,
                   agg.mean_success, agg.std_success, cfg.runs, cfg.frames, cfg.seed)
    if args.log_json:
        payload = {
            "mean_success": agg.mean_success,
            "std_success": agg.std_success,
            "series_mean": agg.series_mean.tolist(),
            "series_std": agg.series_std.tolist(),
            "energy_mean": agg.energy_mean.tolist(),
            "replica_pmf": [[list(p.probabilities) for p in s.pmfs] for s in summaries],
        }
        Path(args.log_json).write_text(json.dumps(payload), encoding="utf-8")
    _write([row], args)


def cmd_sweep(args):
    if (args.spec is None) == (args.preset is None):
        raise WpirsaError("give either a sweep file or --preset NAME")
    over = _overrides(args)
    spec = load_preset(args.preset, over) if args.preset else load_sweep(args.spec, over)
    if args.out:
        spec = type(spec)(spec.param, spec.values, spec.base, spec.schemes, spec.csi_modes,
                          spec.antennas, args.out)
    elif spec.output:
        args.out = spec.output
    rows = run_sweep(spec, parallel=args.parallel, log_json=args.log_json)
    _write(rows, args)


def read_frame(path):
    """Load ``{"slots_per_frame": K, "users": [[slots...], ...]}`` (or a dict of users)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        users = data["users"]
        if isinstance(users, dict):
            users = {int(k): v for k, v in users.items()}
        return FrameAlloc.from_slots(int(data["slots_per_frame"]), users)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise WpirsaError(f"cannot read frame file {path}: {exc}") from None


def cmd_decode(args):
    frame = read_frame(args.frame)
    res = sic_decode(frame)
    out = {
        "decoded": sorted(res.decoded_users),
        "iterations": res.iterations,
        "order": list(res.per_iteration_decodes),
        "undecoded": sorted(frame.users - res.decoded_users),
    }
    print(json.dumps(out))


def cmd_presets(args):
    for name in preset_names():
        print(name)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--out", help="CSV output path (stdout if omitted)")
    common.add_argument("--runs", type=int, help="runs per point")
    common.add_argument("--frames", type=int, help="frames per run")
    common.add_argument("--parallel", type=int, default=1, help="worker processes")
    common.add_argument("--log-json", help="also write per-frame series as JSON")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="wpirsa", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="simulate one configuration")
    r.add_argument("config", help="key = value config file")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", parents=[common], help="run a parameter sweep")
    s.add_argument("spec", nargs="?", help="sweep file")
    s.add_argument("--preset", help="bundled sweep, see 'wpirsa presets'")
    s.set_defaults(func=cmd_sweep)

    d = sub.add_parser("decode", parents=[common], help="peel a frame read from JSON")
    d.add_argument("frame")
    d.set_defaults(func=cmd_decode)

    ls = sub.add_parser("presets", help="list bundled sweeps")
    ls.set_defaults(func=cmd_presets, verbose=False)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except WpirsaError as exc:
        print(f"wpirsa: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
