"""``relaysec`` command line.

Exit codes: 0 success, 1 usage or config error, 2 validation failure,
3 infeasible under ``--require-feasible``.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import analytic as an
from .montecarlo import estimate
from .report import COLUMNS_V1, VALIDATION_COLUMNS, bound_cells, estimate_cells, fmt, param_row, render
from .scenario import ALL_KEYS, ScenarioError, load_config
from .validation import bounds_for, validate_point

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_INFEASIBLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="scenario file (key = value lines)")
    common.add_argument("--db", action="store_true", help="gamma_r/gamma_e in the config are in dB")
    common.add_argument("--exclusion-radius", type=_positive_float, default=an.DEFAULT_EXCLUSION_RADIUS,
                        metavar="DELTA", help="disc radius cut out of the singular integrals")
    common.add_argument("--csv", default=None, metavar="PATH", help="write CSV to PATH ('-' for stdout)")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--trials", type=int, default=None)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--workers", default=None, help="worker processes, an integer or 'auto' "
                     "(default: $RELAYSEC_WORKERS or 1)")
    sim.add_argument("--freeze-positions", action="store_true",
                     help="protocol 3: keep one node placement for every trial")

    window = argparse.ArgumentParser(add_help=False)
    window.add_argument("--exact-tau", action="store_true",
                        help="invert (1-e^-tau) tau exactly instead of the closed form")
    window.add_argument("--require-feasible", action="store_true",
                        help="exit with status 3 when the answer is 'infeasible'")

    sweep = argparse.ArgumentParser(add_help=False)
    sweep.add_argument("--param", required=True, choices=[k for k in ALL_KEYS if k != "protocol"])
    sweep.add_argument("--start", type=float, required=True)
    sweep.add_argument("--stop", type=float, required=True)
    sweep.add_argument("--steps", type=int, required=True)

    p = _Parser(prog="relaysec", description="Two-hop cooperative-jamming outage bounds and simulation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("bounds", parents=[common], help="transmission and secrecy outage bounds")
    sub.add_parser("tau-window", parents=[common, window], help="feasible noise-threshold window")
    sub.add_parser("m-max", parents=[common, window], help="eavesdropper tolerance")
    sub.add_parser("simulate", parents=[common, sim], help="Monte Carlo outage estimates")
    sub.add_parser("sweep", parents=[common, sim, sweep], help="bounds and estimates over a 1-D grid")
    v = sub.add_parser("validate", parents=[common, sim, sweep], help="check bounds against simulation")
    v.add_argument("--bound-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return p


def _emit(text: str, path, default_stdout=True):
    if path is None and not default_stdout:
        return
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _print_pairs(pairs):
    for k, v in pairs:
        print(f"{k} = {v if isinstance(v, str) else fmt(v)}")


def _require_reqs(cfg):
    if cfg.requirements is None:
        raise ScenarioError("config must set eps_t and eps_s for this command")
    return cfg.requirements


def cmd_bounds(args) -> int:
    cfg = load_config(args.config, db=args.db)
    tx, sec, consts = bounds_for(cfg, args.exclusion_radius)
    pairs = [("protocol", cfg.protocol), ("tx_bound_raw", tx.raw), ("tx_bound", tx.clamped),
             ("sec_bound_raw", sec.raw), ("sec_bound", sec.clamped)]
    if consts is not None:
        pairs += [("theta", consts.theta), ("varphi1", consts.varphi1), ("varphi2", consts.varphi2),
                  ("phi", consts.phi), ("psi", consts.psi), ("exclusion_radius", consts.exclusion_radius)]
    if args.csv:
        row = param_row(cfg)
        row.update(bound_cells(tx, sec))
        _emit(render([row]), args.csv)
    if args.csv != "-":
        _print_pairs(pairs)
    return EXIT_OK


def _tau_window(cfg, args):
    s, reqs = cfg.base, _require_reqs(cfg)
    if cfg.protocol == 3:
        c = an.constants_for(cfg.scenario, args.exclusion_radius)
        return an.lemma6_window(cfg.scenario, reqs, c, exact=args.exact_tau)
    return an.tau_window_protocol(cfg.protocol, s.n, s.gamma_r, s.gamma_e, reqs.eps_t, reqs.eps_s, s.m,
                                  exact=args.exact_tau)


def _infeasible_message(w: an.TauWindow) -> str:
    if w.cause == an.WINDOW:
        return f"infeasible: tau_max={fmt(w.tau_max)} < tau_min={fmt(w.tau_min)}"
    if w.cause == an.NEAR_EAVESDROPPER:
        return "infeasible: near-eavesdropper budget (m*pi*r0^2 >= 1-sqrt(1-eps_s))"
    if w.cause == an.RELIABILITY:
        return "infeasible: empty selection region probability exceeds eps_t"
    return "infeasible: no finite tau meets the secrecy requirement"


def cmd_tau_window(args) -> int:
    cfg = load_config(args.config, db=args.db)
    w = _tau_window(cfg, args)
    if w.feasible:
        binding = "reliability (upper)" + (", secrecy (lower)" if w.tau_min > 0 else "")
        _print_pairs([("tau_min", w.tau_min), ("tau_max", w.tau_max), ("feasible", "yes"),
                      ("binding", binding)])
        return EXIT_OK
    _print_pairs([("tau_min", w.tau_min), ("tau_max", w.tau_max), ("feasible", "no"), ("binding", w.cause)])
    print(_infeasible_message(w))
    return EXIT_INFEASIBLE if args.require_feasible else EXIT_OK


def cmd_m_max(args) -> int:
    cfg = load_config(args.config, db=args.db)
    s, reqs = cfg.base, _require_reqs(cfg)
    if cfg.protocol == 3:
        c = an.constants_for(cfg.scenario, args.exclusion_radius)
        f = an.theorem3_m_max_exact_tau if args.exact_tau else an.theorem3_m_max
        value = f(cfg.scenario, reqs, c)
        if value is None:
            print("infeasible: empty selection region probability exceeds eps_t")
            return EXIT_INFEASIBLE if args.require_feasible else EXIT_OK
    elif args.exact_tau:
        value = an.m_max_exact_tau(cfg.protocol, s.n, s.gamma_r, s.gamma_e, reqs.eps_t, reqs.eps_s)
    else:
        f = an.theorem1_m_max if cfg.protocol == 1 else an.theorem2_m_max
        value = f(s.n, s.gamma_r, s.gamma_e, reqs.eps_t, reqs.eps_s)
    floor = "inf" if math.isinf(value) else str(math.floor(value))
    _print_pairs([("m_max", value), ("m_max_floor", floor)])
    return EXIT_OK


def _sim_row(cfg, args):
    trials = cfg.trials if args.trials is None else args.trials
    seed = cfg.seed if args.seed is None else args.seed
    if trials < 1:
        raise UsageError("--trials must be ≥ 1")
    tx_b, sec_b, _ = bounds_for(cfg, args.exclusion_radius)
    tx, sec = estimate(cfg.protocol, cfg.scenario, trials, seed, args.workers, args.freeze_positions)
    row = param_row(cfg, trials, seed)
    row.update(bound_cells(tx_b, sec_b))
    row.update(estimate_cells(tx, sec))
    return row


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, db=args.db)
    _emit(render([_sim_row(cfg, args)]), args.csv)
    return EXIT_OK


def _grid(cfg, args):
    if args.steps < 2:
        raise UsageError("--steps must be ≥ 2")
    if not args.start < args.stop:
        raise UsageError("--start must be below --stop")
    return [cfg.with_value(args.param, v) for v in np.linspace(args.start, args.stop, args.steps)]


def cmd_sweep(args) -> int:
    cfg = load_config(args.config, db=args.db)
    rows = [_sim_row(point, args) for point in _grid(cfg, args)]
    _emit(render(rows), args.csv)
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.config, db=args.db)
    results = [
        validate_point(point, args.trials, args.seed, args.workers, args.exclusion_radius,
                       args.bound_scale, args.freeze_positions)
        for point in _grid(cfg, args)
    ]
    _emit(render([r.row() for r in results], VALIDATION_COLUMNS), args.csv)
    failed = sum(not r.passed for r in results)
    if failed:
        print(f"validation failed at {failed} of {len(results)} points", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


COMMANDS = {
    "bounds": cmd_bounds,
    "tau-window": cmd_tau_window,
    "m-max": cmd_m_max,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ScenarioError, UsageError, OSError, ValueError) as exc:
        print(f"relaysec {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
