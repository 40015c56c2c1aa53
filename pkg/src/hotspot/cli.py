"""Command-line front end.

Subcommands: generate, simulate, detect, gamma, bounds, sweep,
threshold-sweep, describe. Every run honors --seed (fallback: the
HOTSPOT_SEED environment variable) for bitwise reproducibility. detect
exits 0 for a uniform-reporting verdict, 2 for an epidemic verdict and 1
on any error, so shell pipelines can branch on the outcome.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import calibration, detector, harness
from .detector import VERDICT_CSV_HEADER, DetectorConfig, SmallRegimeParams
from .graph import load_edge_list, save_edge_list
from .scenario import (EPIDEMIC, UNIFORM, ReportSnapshot, ScenarioParams,
                       generate_uniform_null, make_epidemic_snapshot)

EXIT_UNIFORM = 0
EXIT_ERROR = 1
EXIT_EPIDEMIC = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; keep 2 reserved for epidemic verdicts."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _default_seed() -> int:
    return int(os.environ.get("HOTSPOT_SEED", "0"))


def _add_topology_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--topology", choices=["er", "grid", "tree", "powerlaw", "file"],
                   help="graph family")
    p.add_argument("--n", type=int, help="node count (er, powerlaw)")
    p.add_argument("--p", type=float, help="edge probability (er; default 2/n)")
    p.add_argument("--dim", type=int, default=2, help="grid dimension")
    p.add_argument("--side", type=int, help="grid side length")
    p.add_argument("--degree", type=int, help="tree branching factor")
    p.add_argument("--depth", type=int, help="tree depth")
    p.add_argument("--exponent", type=float, default=2.5, help="power-law exponent")
    p.add_argument("--compact", action="store_true",
                   help="remap file node ids to dense indices")
    p.add_argument("--giant", action="store_true",
                   help="restrict to the largest connected component")


def _build_topology(args) -> "harness.TopologySpec":
    return harness.TopologySpec(
        kind=args.topology, n=args.n, p=args.p, dim=args.dim, side=args.side,
        degree=args.degree, depth=args.depth, exponent=args.exponent,
        path=getattr(args, "graph", None), compact=args.compact, giant=args.giant)


def _load_graph(args):
    if getattr(args, "graph", None) and not args.topology:
        return load_edge_list(args.graph, compact=args.compact)
    if not args.topology:
        raise ValueError("need --graph FILE or --topology FAMILY")
    if args.topology == "file":
        return load_edge_list(args.graph, compact=args.compact)
    return _build_topology(args).build(args.seed)


def _write_text(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_generate(args) -> int:
    if args.topology in (None, "file"):
        raise ValueError("generate needs --topology er|grid|tree|powerlaw")
    g = _build_topology(args).build(args.seed)
    save_edge_list(g, args.out)
    print(f"wrote {g.n} nodes, {g.num_edges} edges to {args.out}", file=sys.stderr)
    return 0


def _cmd_simulate(args) -> int:
    g = _load_graph(args)
    if args.scenario == "epidemic":
        params = ScenarioParams(alpha=args.alpha, q=args.q, f=args.f,
                                num_seeds=args.seeds)
        snap, _ = make_epidemic_snapshot(g, params, args.seed)
    else:
        p = (args.null_p if args.null_p is not None else
             calibration.reporting_probabilities(args.q, args.alpha, args.f).p)
        snap = generate_uniform_null(g, p, args.seed)
    _write_text(snap.to_text(), args.out)
    return 0


def _auto_detect_config(args, g, reporting) -> DetectorConfig:
    """Pick K and T from calibration inputs, echoing the choices to stderr."""
    n_rep = len(reporting)
    regime = args.regime
    if regime == "auto":
        density = n_rep / g.n
        regime = "dense" if density > args.density_cutoff else "small"
        print(f"auto regime: density {density:.6g} vs cutoff "
              f"{args.density_cutoff:g} -> {regime}", file=sys.stderr)
    if regime == "small":
        if args.beta is None:
            raise ValueError("small regime needs --beta")
        params = SmallRegimeParams(beta=args.beta, rho=args.rho, mu=args.mu)
        cfg = detector.select_params_small(params)
        print(f"small regime: K={cfg.k_or_l} t={cfg.t} "
              f"feasible={params.feasible}", file=sys.stderr)
        return cfg
    probs = calibration.reporting_probabilities(args.q, args.alpha, args.f)
    if args.gamma_profile:
        profile = calibration.GammaProfile.from_csv(args.gamma_profile)
        k = calibration.solve_k(profile, args.f, log_base=args.log_base)
        gamma = profile.gamma(k)
        t = (n_rep / 2.0) * (gamma * probs.p_in ** k / (args.f + 1.0) + probs.p ** k)
        cfg = DetectorConfig.nn(k=k, t=t, note="dense, gamma profile")
    else:
        if args.gamma is not None:
            gamma = args.gamma
        elif args.gamma_fallback:
            gamma = calibration.gamma_lower_bound(math.ceil(args.alpha * g.n))
        else:
            raise ValueError("dense regime needs --gamma-profile, --gamma "
                             "or --gamma-fallback")
        cfg = detector.select_params_dense(
            gamma, args.f, probs.p_in, probs.p, n_rep,
            topology=args.family, log_base=args.log_base)
        k = cfg.k_or_l
    print(f"dense regime: K={cfg.k_or_l} T={cfg.t:.6g} gamma={gamma:.6g} "
          f"p={probs.p:.6g} p_in={probs.p_in:.6g}", file=sys.stderr)
    return cfg


def _cmd_detect(args) -> int:
    g = load_edge_list(args.graph, compact=args.compact)
    snap = ReportSnapshot.load(args.snapshot)
    if snap.n != g.n:
        print(f"warning: snapshot n={snap.n} vs graph n={g.n}", file=sys.stderr)
    if args.regime or args.gamma_profile or args.gamma is not None or args.gamma_fallback:
        args.regime = args.regime or "auto"
        cfg = _auto_detect_config(args, g, snap.reporting)
    else:
        if args.mode == "nn":
            k = args.k if args.k is not None else 1
            cfg = DetectorConfig.nn(k=k, t=args.t, s=args.s if args.s else k)
        else:
            cfg = DetectorConfig.ball_mode(l=args.l if args.l is not None else 2,
                                           s=args.s if args.s else 1, t=args.t)
    verdict = detector.classify(g, snap.reporting, cfg, keep_indicators=False)
    truth = snap.truth if snap.truth in (EPIDEMIC, UNIFORM) else None
    if args.header:
        print(VERDICT_CSV_HEADER)
    print(verdict.csv_row(truth))
    return EXIT_EPIDEMIC if verdict.label == EPIDEMIC else EXIT_UNIFORM


def _cmd_gamma(args) -> int:
    g = _load_graph(args)
    params = ScenarioParams(alpha=args.alpha, q=args.q, f=args.f, num_seeds=args.seeds)
    if args.k_list:
        k_values = [int(v) for v in args.k_list.split(",")]
    else:
        k_values = list(range(1, max(1, math.ceil(math.log(max(g.n, 2)))) + 1))
    profile = calibration.estimate_gamma(g, params, k_values, args.trials,
                                         args.seed, topology_tag=args.tag)
    if args.out:
        profile.to_csv(args.out)
    else:
        print(",".join(calibration.GAMMA_CSV_HEADER))
        for e in profile.entries:
            print(f"{e.k},{e.gamma:.10g},{e.stderr:.10g},{e.trials},{profile.topology}")
    return 0


def _cmd_bounds(args) -> int:
    bounds = calibration.error_bounds(args.gamma, args.q, args.alpha, args.f,
                                      args.k, args.n_reporting)
    print("e1_bound,e2_bound,P,P_in")
    print(f"{bounds.e1_bound:.10g},{bounds.e2_bound:.10g},"
          f"{bounds.p_big:.10g},{bounds.p_in_big:.10g}")
    if bounds.diagnostic:
        print(bounds.diagnostic, file=sys.stderr)
    return 0


def _spec_from_args(args) -> "harness.ExperimentSpec":
    if args.config:
        spec = harness.read_config(args.config)
        if args.seed_given:
            spec = harness.ExperimentSpec(
                topology=spec.topology, scenario=spec.scenario,
                detector=spec.detector, sweep_name=spec.sweep_name,
                sweep_values=spec.sweep_values,
                trials_per_point=spec.trials_per_point,
                master_seed=args.seed, noise=spec.noise)
        return spec
    raw: dict[str, str] = {}
    for key in ("topology", "n", "p", "dim", "side", "degree", "depth", "exponent",
                "alpha", "q", "f", "alpha_exp", "q_exp", "f_exp",
                "detector", "k", "l", "s", "t", "sweep", "values", "trials"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            raw[key] = str(val)
    if args.giant:
        raw["giant"] = "true"
    if args.graph:
        raw["topology"], raw["path"] = "file", args.graph
    if args.num_seeds is not None:
        raw["num_seeds"] = str(args.num_seeds)
    if args.noise_prob is not None:
        raw["noise_prob"] = str(args.noise_prob)
        raw["noise_d"] = str(args.noise_d)
    raw["seed"] = str(args.seed)
    return harness.spec_from_mapping(raw)


def _cmd_sweep(args) -> int:
    result = harness.run_sweep(_spec_from_args(args))
    _write_text(result.to_csv_text(), args.out)
    return 0


def _cmd_threshold_sweep(args) -> int:
    spec = _spec_from_args(args)
    t_values = [float(v) for v in args.t_values.split(",")]
    result = harness.threshold_sweep(spec, t_values)
    _write_text(result.to_csv_text(), args.out)
    return 0


def _cmd_describe(_args) -> int:
    print(harness.describe_defaults())
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="hotspot",
                     description="Contagion-vs-random-reporting snapshot classifier")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a generated graph as an edge list")
    _add_topology_flags(p_gen)
    p_gen.add_argument("--out", required=True)

    p_sim = sub.add_parser("simulate", help="write a labeled reporting snapshot")
    _add_topology_flags(p_sim)
    p_sim.add_argument("--graph", help="edge-list file (instead of --topology)")
    p_sim.add_argument("--scenario", choices=["epidemic", "null"], default="epidemic")
    p_sim.add_argument("--alpha", type=float, default=0.1)
    p_sim.add_argument("--q", type=float, default=1.0)
    p_sim.add_argument("--f", type=float, default=0.0)
    p_sim.add_argument("--seeds", type=int, default=1, help="number of contagion seeds")
    p_sim.add_argument("--null-p", type=float, default=None,
                       help="override the matched null reporting probability")
    p_sim.add_argument("--out")

    p_det = sub.add_parser("detect", help="classify a snapshot (exit 0 uniform, 2 epidemic)")
    p_det.add_argument("--graph", required=True)
    p_det.add_argument("--snapshot", required=True)
    p_det.add_argument("--compact", action="store_true")
    p_det.add_argument("--mode", choices=["nn", "ball"], default="nn")
    p_det.add_argument("--k", type=int)
    p_det.add_argument("--l", type=int)
    p_det.add_argument("--s", type=int)
    p_det.add_argument("--t", type=float, default=0.0)
    p_det.add_argument("--header", action="store_true", help="print the CSV header line")
    p_det.add_argument("--regime", choices=["dense", "small", "auto"],
                       help="derive K and T from calibration instead of --k/--t")
    p_det.add_argument("--q", type=float)
    p_det.add_argument("--alpha", type=float)
    p_det.add_argument("--f", type=float, default=0.0)
    p_det.add_argument("--beta", type=float)
    p_det.add_argument("--rho", type=float)
    p_det.add_argument("--mu", type=float)
    p_det.add_argument("--gamma", type=float, help="explicit interior fraction")
    p_det.add_argument("--gamma-profile", help="gamma profile CSV from the gamma command")
    p_det.add_argument("--gamma-fallback", action="store_true",
                       help="use the 1/|S| lower bound for gamma")
    p_det.add_argument("--family", choices=["general", "grid", "tree"], default="general")
    p_det.add_argument("--log-base", type=float, default=None)
    p_det.add_argument("--density-cutoff", type=float, default=harness.AUTO_DENSITY_CUTOFF)

    p_gam = sub.add_parser("gamma", help="estimate the interior fraction by simulation")
    _add_topology_flags(p_gam)
    p_gam.add_argument("--graph")
    p_gam.add_argument("--alpha", type=float, required=True)
    p_gam.add_argument("--q", type=float, default=1.0)
    p_gam.add_argument("--f", type=float, default=0.0)
    p_gam.add_argument("--seeds", type=int, default=1)
    p_gam.add_argument("--k-list", help="comma-separated K values (default 1..ceil(ln n))")
    p_gam.add_argument("--trials", type=int, default=200)
    p_gam.add_argument("--tag", default="")
    p_gam.add_argument("--out")

    p_bnd = sub.add_parser("bounds", help="explicit error bounds for given parameters")
    p_bnd.add_argument("--gamma", type=float, required=True)
    p_bnd.add_argument("--q", type=float, required=True)
    p_bnd.add_argument("--alpha", type=float, required=True)
    p_bnd.add_argument("--f", type=float, default=0.0)
    p_bnd.add_argument("--k", type=int, required=True)
    p_bnd.add_argument("--n-reporting", type=int, required=True)

    for name, helptext in (("sweep", "run a Monte-Carlo error-rate sweep"),
                           ("threshold-sweep", "error rates across decision thresholds")):
        p_sw = sub.add_parser(name, help=helptext)
        p_sw.add_argument("--config", help="flat key=value experiment file")
        _add_topology_flags(p_sw)
        p_sw.add_argument("--graph", help="edge-list file topology")
        p_sw.add_argument("--alpha", type=float)
        p_sw.add_argument("--q", type=float)
        p_sw.add_argument("--f", type=float)
        p_sw.add_argument("--num-seeds", type=int)
        p_sw.add_argument("--alpha-exp", type=float)
        p_sw.add_argument("--q-exp", type=float)
        p_sw.add_argument("--f-exp", type=float)
        p_sw.add_argument("--detector", choices=["nn", "ball", "auto"])
        p_sw.add_argument("--k", type=int)
        p_sw.add_argument("--l", type=int)
        p_sw.add_argument("--s", type=int)
        p_sw.add_argument("--t", type=float)
        p_sw.add_argument("--sweep", help="swept variable name")
        p_sw.add_argument("--values", help="comma-separated sweep values")
        p_sw.add_argument("--trials", type=int)
        p_sw.add_argument("--noise-prob", type=float)
        p_sw.add_argument("--noise-d", type=int, default=1)
        p_sw.add_argument("--out")
        if name == "threshold-sweep":
            p_sw.add_argument("--t-values", required=True,
                              help="comma-separated decision thresholds")

    sub.add_parser("describe", help="print every behavioral default")

    for p_sub in sub.choices.values():
        p_sub.add_argument("--seed", type=int, default=None,
                           help="master RNG seed (default: $HOTSPOT_SEED or 0)")
    return parser


_COMMANDS = {
    "generate": _cmd_generate,
    "simulate": _cmd_simulate,
    "detect": _cmd_detect,
    "gamma": _cmd_gamma,
    "bounds": _cmd_bounds,
    "sweep": _cmd_sweep,
    "threshold-sweep": _cmd_threshold_sweep,
    "describe": _cmd_describe,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = _default_seed()
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
