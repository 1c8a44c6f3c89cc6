"""Command-line entry point.

Subcommands: simulate | verify | oracle | stats | impossibility | render.
Flags are the single configuration surface; every run is deterministic
given its full flag set including --seed.  Exit codes: 0 success,
1 usage/validation error, 2 cap or limit exhaustion, 3 check failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import analysis, dynamics, oracle, render
from .core import (
    CHAIN,
    CYCLE,
    Configuration,
    LineParams,
    height_profile,
    is_christoffel,
    target_christoffel,
    thickness,
)
from .rule import RuleParams, standard_rule

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAP = 2
EXIT_CHECK = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; we use 1
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(text: str, out: str | None) -> None:
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _add_instance_flags(p: argparse.ArgumentParser, sight_required: bool = True) -> None:
    p.add_argument("--ta", type=int, required=True, help="horizontal component of the slope vector")
    p.add_argument("--tb", type=int, required=True, help="vertical component of the slope vector")
    p.add_argument("--n", type=int, required=True, help="number of periods")
    p.add_argument("--sight", type=int, required=sight_required, help="agent sight (>= 2)")
    p.add_argument("--topology", choices=[CHAIN, CYCLE], default=CHAIN)


def _params(args) -> LineParams:
    return LineParams(args.ta, args.tb, args.n)


def _start_config(args, params: LineParams) -> Configuration:
    if getattr(args, "start_word", None):
        return Configuration(args.start_word, params, args.topology)
    kind = getattr(args, "start", None) or "max_nonneg"
    seed = getattr(args, "seed", 0)
    return dynamics.canonical_start(params, kind.replace("-", "_"), seed, args.topology)


def build_parser() -> _Parser:
    parser = _Parser(prog="flipline", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one trajectory and write its trace")
    _add_instance_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", choices=["max-nonneg", "min-nonpos", "random", "random-nonnegative"])
    p.add_argument("--start-word", help="explicit start word of a's and b's")
    p.add_argument("--stop", choices=["stable", "christoffel", "strip", "target", "steps"], default="target")
    p.add_argument("--cap", type=int, default=10**6, help="step cap / step count for --stop steps")
    p.add_argument("--snapshot-every", type=int)
    p.add_argument("--out", help="trace file (JSON lines); stdout when omitted")
    p.add_argument("--svg-out", help="also render the recorded snapshots to this SVG file")

    p = sub.add_parser("verify", help="exhaustively check process properties on a small instance")
    _add_instance_flags(p)
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_STATE_CAP, help="state count cap")
    p.add_argument("--out", help="JSON report path; stdout when omitted")

    p = sub.add_parser("oracle", help="exact hitting time and recurrence structure")
    _add_instance_flags(p)
    p.add_argument("--start", choices=["max-nonneg", "min-nonpos"])
    p.add_argument("--start-word")
    p.add_argument("--target", choices=["target", "christoffel"], default="christoffel",
                   help="hit the band configuration or any minimal-thickness state")
    p.add_argument("--target-word", help="explicit target word")
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_STATE_CAP, help="state count cap")
    p.add_argument("--out")

    p = sub.add_parser("stats", help="Monte Carlo coalescence experiments")
    p.add_argument("--ta", type=int, required=True)
    p.add_argument("--tb", type=int, required=True)
    p.add_argument("--n", type=int, nargs="+", required=True, help="one or more instance sizes")
    p.add_argument("--sight", type=int, required=True)
    p.add_argument("--topology", choices=[CHAIN, CYCLE], default=CHAIN)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", choices=["max-nonneg", "min-nonpos", "random", "random-nonnegative"],
                   default="max-nonneg")
    p.add_argument("--stop", choices=["target", "christoffel", "strip", "stable"], default="target")
    p.add_argument("--cap", type=int, help="step cap; default 10x the proven bound")
    p.add_argument("--out-csv", help="per-trial CSV path (multi-size sweeps add _n<k>)")
    p.add_argument("--out", help="JSON summary path; stdout when omitted")

    p = sub.add_parser("impossibility", help="build and probe the low-sight family")
    p.add_argument("--sight", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("render", help="draw a configuration or trace snapshots")
    p.add_argument("--ta", type=int)
    p.add_argument("--tb", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--word", help="word to draw; default is the band configuration")
    p.add_argument("--trace", help="render snapshots from this trace file instead")
    p.add_argument("--steps", type=int, nargs="+", help="snapshot steps to render from --trace")
    p.add_argument("--format", choices=["ascii", "svg"], default="ascii")
    p.add_argument("--cell", type=int, default=16)
    p.add_argument("--out")

    return parser


def cmd_simulate(args) -> int:
    params = _params(args)
    rule = RuleParams(args.sight)
    config = _start_config(args, params)
    stop_kind = "step_limit" if args.stop == "steps" else args.stop
    stop = dynamics.StopCondition(stop_kind, args.cap)
    state = dynamics.new_process(config, rule, args.seed, track_active=stop_kind == "stable")
    trace = dynamics.run(state, stop, snapshot_every=args.snapshot_every)
    if args.out:
        dynamics.write_trace(trace, args.out)
    else:
        for line in dynamics.trace_lines(trace):
            sys.stdout.write(line + "\n")
    if args.svg_out:
        spec = render.RenderSpec(snapshot_steps=tuple(s for s, _ in trace.snapshots))
        _atomic_write(args.svg_out, render.svg_snapshots(trace, spec))
    return EXIT_OK if trace.reason == "stop" else EXIT_CAP


def cmd_verify(args) -> int:
    params = _params(args)
    n_states = oracle.state_count(params)
    print(f"enumerating {n_states} states of ({params.ta},{params.tb},{params.n})", file=sys.stderr)
    report = oracle.verify_corpus(params, RuleParams(args.sight), args.topology, args.cap)
    _emit(json.dumps(report.to_json(), indent=2) + "\n", args.out)
    return EXIT_OK if report.all_passed else EXIT_CHECK


def cmd_oracle(args) -> int:
    params = _params(args)
    rule = RuleParams(args.sight)
    n_states = oracle.state_count(params)
    print(f"enumerating {n_states} states of ({params.ta},{params.tb},{params.n})", file=sys.stderr)
    graph = oracle.build_graph(params, rule, args.topology, args.cap)
    per = params.per
    report: dict = {
        "instance": {"ta": params.ta, "tb": params.tb, "n": params.n},
        "sight": args.sight,
        "topology": args.topology,
        "states": len(graph.words),
    }
    bottoms = oracle.bottom_classes(graph)
    classes = []
    for comp in bottoms:
        words = [graph.words[x] for x in comp]
        configs = [Configuration(w, params, args.topology) for w in words]
        profiles = [height_profile(c) for c in configs]
        classes.append(
            {
                "size": len(comp),
                "example": words[0],
                "christoffel": all(is_christoffel(c) for c in configs),
                "in_strip": all(
                    min(hp) >= -per + 1 and max(hp) <= per - 1 for hp in profiles
                ),
            }
        )
    report["recurrent_classes"] = classes

    start_word = args.start_word
    if start_word is None and args.start:
        start_word = dynamics.canonical_start(params, args.start.replace("-", "_"), 0, args.topology).word
    if start_word is not None:
        if args.target_word:
            targets = [args.target_word]
        elif args.target == "target":
            targets = [target_christoffel(params).word]
        else:
            targets = [w for w in graph.words
                       if thickness(Configuration(w, params, args.topology)) == per - 1]
        ht = oracle.exact_hitting_time(graph, start_word, targets)
        report["start"] = start_word
        report["target"] = args.target_word or args.target
        report["expected_steps"] = "+inf" if ht.is_infinite else str(ht.value)
        report["expected_steps_float"] = None if ht.is_infinite else float(ht.value)
        report["method"] = ht.method
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_stats(args) -> int:
    if args.trials < 1:
        print("flipline stats: error: --trials must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    rule = RuleParams(args.sight)
    reports = []
    for n in args.n:
        params = LineParams(args.ta, args.tb, n)
        cap = args.cap if args.cap else 10 * analysis.coalescence_bound(params)
        reports.append(
            analysis.coalescence_experiment(
                params,
                rule,
                args.start.replace("-", "_"),
                args.trials,
                dynamics.derive_seed(args.seed, n),
                stop_kind=args.stop,
                cap=cap,
                topology=args.topology,
            )
        )
    summary: dict = {"instances": [r.summary() for r in reports]}
    if len(reports) >= 2:
        exponent = analysis.fit_scaling_exponent(reports)
        summary["exponent"] = exponent
    if args.out_csv:
        if len(reports) == 1:
            _atomic_write(args.out_csv, "\n".join(analysis.trials_csv_lines(reports[0])) + "\n")
        else:
            root, ext = os.path.splitext(args.out_csv)
            for r in reports:
                path = f"{root}_n{r.params.n}{ext or '.csv'}"
                _atomic_write(path, "\n".join(analysis.trials_csv_lines(r)) + "\n")
    _emit(json.dumps(summary, indent=2) + "\n", args.out)
    return EXIT_CAP if any(r.capped for r in reports) else EXIT_OK


def cmd_impossibility(args) -> int:
    try:
        c, c_prime = oracle.impossibility_family(args.sight, args.k)
    except ValueError as exc:
        print(f"flipline impossibility: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rule = standard_rule(args.sight)
    report = {
        "sight": args.sight,
        "k": args.k,
        "instance": {"ta": c.params.ta, "tb": c.params.tb, "n": c.params.n},
        "c_word": c.word,
        "c_prime_word": c_prime.word,
        "c_is_christoffel": is_christoffel(c),
        "thickness_c": thickness(c),
        "thickness_c_prime": thickness(c_prime),
        "stable_c_under_standard_rule": oracle.rule_stability_probe(rule, c),
        "stable_c_prime_under_standard_rule": oracle.rule_stability_probe(rule, c_prime),
        "note": (
            "any sight-s rule that leaves the Christoffel word's junction views "
            "inactive also leaves c_prime stable; the packaged rule fires on those "
            "views, so it stabilizes neither"
        ),
    }
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    if args.trace:
        header, snaps = dynamics.read_trace_words(args.trace)
        steps = tuple(args.steps) if args.steps else tuple(sorted(snaps))
        trace = dynamics.Trace(header, [], sorted(snaps.items()), "", "stop", 0, 0)
        spec = render.RenderSpec(cell=args.cell, snapshot_steps=steps)
        _emit(render.svg_snapshots(trace, spec), args.out)
        return EXIT_OK
    if args.ta is None or args.tb is None or args.n is None:
        print("flipline render: error: need --ta --tb --n (or --trace)", file=sys.stderr)
        return EXIT_USAGE
    params = LineParams(args.ta, args.tb, args.n)
    word = args.word or target_christoffel(params).word
    config = Configuration(word, params)
    if args.format == "ascii":
        _emit(render.ascii_grid(config) + "\n", args.out)
    else:
        _emit(render.render_svg_word(config, render.RenderSpec(cell=args.cell)), args.out)
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "stats": cmd_stats,
    "impossibility": cmd_impossibility,
    "render": cmd_render,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"flipline {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
