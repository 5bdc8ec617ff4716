"""Command-line entry point: ``treedisc <subcommand> ...``.

Exit status is 0 on success, 2 on invalid input (bad flags, malformed files,
size limits) and 1 on anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from treedisc.evaluator import (
    eval_bruteforce,
    eval_certified,
    eval_local_ascent,
    eval_star_circle_exact,
)
from treedisc.experiments import SCENARIOS, ExperimentConfig, mean_ratios, run_experiment, to_csv
from treedisc.labeling import DEFAULT_L0, Labeling, label_tree
from treedisc.oriented import (
    Orientation,
    orient_tree,
    oriented_discrepancy_bruteforce,
    oriented_eval,
    oriented_eval_bruteforce,
)
from treedisc.sphere import EpsNet, build_eps_net, certified_net, verify_covering
from treedisc.tree_core import InputError, Tree, generate


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _load_tree(path: str) -> Tree:
    try:
        return Tree.from_dict(_load(path))
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: not a tree file ({exc})") from exc


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(obj)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# ------------------------------------------------------------- subcommands


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "star":
        sizes = (args.l,)
    elif kind in ("path", "random"):
        sizes = (args.n,)
    elif kind == "caterpillar":
        sizes = (args.spine, args.legs)
    elif kind == "spider":
        sizes = (args.legs, args.length)
    else:
        sizes = (args.handle, args.bristles)
    if any(s is None for s in sizes):
        raise InputError(f"gen --kind {kind} is missing a size flag")
    _emit(generate(kind, *sizes, seed=args.seed).to_dict(), args.out)
    return 0


def cmd_label(args) -> int:
    tree = _load_tree(args.tree)
    f, trace = label_tree(tree, args.d, args.seed, l0=args.l0)
    _emit(f.to_dict(), args.out)
    if args.trace:
        _emit(trace.to_dict(), args.trace)
    return 0


def cmd_orient(args) -> int:
    tree = _load_tree(args.tree)
    sigma, trace = orient_tree(tree)
    _emit(sigma.to_dict(), args.out)
    if args.trace:
        _emit(trace.to_dict(), args.trace)
    return 0


def _net_for(d: int, eps: float, seed, net_path: str | None) -> EpsNet:
    if net_path:
        return EpsNet.from_dict(_load(net_path))
    return certified_net(d, eps, seed)


def cmd_eval(args) -> int:
    tree = _load_tree(args.tree)
    f = Labeling.from_dict(_load(args.labeling))
    method = args.method
    if method == "auto":
        if tree.m <= 16:
            method = "bruteforce"
        elif f.d == 1 and tree.is_star():
            method = "circle"
        else:
            method = "certified"
    if method == "bruteforce":
        res = eval_bruteforce(tree, f)
    elif method == "circle":
        res = eval_star_circle_exact(tree, f)
    elif method == "local":
        res = eval_local_ascent(tree, f, starts=args.starts, rng=args.seed)
    else:
        res = eval_certified(tree, f, _net_for(f.d, args.eps, args.seed, args.net), slack=args.slack)
    _emit(res.to_dict(), args.out)
    return 0


def cmd_oeval(args) -> int:
    tree = _load_tree(args.tree)
    sigma = Orientation.from_dict(_load(args.orientation))
    value, wit = oriented_eval(tree, sigma, method=args.method)
    _emit({"value": value, "root": wit.root, "witness": list(wit.edges)}, args.out)
    return 0


def cmd_oracle(args) -> int:
    tree = _load_tree(args.tree)
    if args.what == "oriented":
        print(oriented_discrepancy_bruteforce(tree))
    elif args.what == "orientation":
        if not args.orientation:
            raise InputError("oracle orientation needs --orientation")
        print(oriented_eval_bruteforce(tree, Orientation.from_dict(_load(args.orientation))))
    else:
        if not args.labeling:
            raise InputError("oracle subtree needs --labeling")
        res = eval_bruteforce(tree, Labeling.from_dict(_load(args.labeling)))
        print(repr(res.lower))
    return 0


def cmd_net(args) -> int:
    if args.certified:
        net = certified_net(args.d, args.eps, args.seed)
    else:
        net = build_eps_net(args.d, args.eps, args.seed)
    if args.trials:
        verify_covering(net, args.trials, np.random.default_rng([args.seed or 0, 1]))
    _emit(net.to_dict(), args.out)
    return 0


def cmd_experiment(args) -> int:
    data = _load(args.config) if args.config else {}
    if args.scenario:
        data["scenario"] = args.scenario
    for key in ("d", "grid", "seeds", "family", "eps", "l0", "csv", "threads"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if args.seed is not None and args.seeds is None:
        data["seeds"] = [args.seed + i for i in range(args.reps)]
    if args.timing:
        data["timing"] = True
    if data.get("scenario") is None:
        raise InputError("experiment needs a scenario")
    cfg = ExperimentConfig.from_dict(data)
    records = run_experiment(cfg)
    text = to_csv(records)
    if cfg.csv:
        Path(cfg.csv).write_text(text)
    else:
        sys.stdout.write(text)
    ratios = ", ".join(f"{t}:{r:.4f}" for t, r in mean_ratios(records))
    print(f"# mean ratio by grid point: {ratios}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treedisc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a tree")
    g.add_argument("--kind", required=True, choices=["star", "path", "caterpillar", "spider", "broom", "random"])
    g.add_argument("--l", type=int, help="star leaves")
    g.add_argument("--n", type=int, help="vertices (path, random)")
    g.add_argument("--spine", type=int)
    g.add_argument("--legs", type=int)
    g.add_argument("--length", type=int)
    g.add_argument("--handle", type=int)
    g.add_argument("--bristles", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    lab = sub.add_parser("label", help="build the recursive unit-vector labeling")
    lab.add_argument("--tree", required=True)
    lab.add_argument("--d", type=int, default=1)
    lab.add_argument("--seed", type=int, default=0)
    lab.add_argument("--l0", type=int, default=DEFAULT_L0)
    lab.add_argument("--out")
    lab.add_argument("--trace", help="write the construction trace JSON here")
    lab.set_defaults(func=cmd_label)

    o = sub.add_parser("orient", help="build the recursive orientation")
    o.add_argument("--tree", required=True)
    o.add_argument("--out")
    o.add_argument("--trace")
    o.set_defaults(func=cmd_orient)

    e = sub.add_parser("eval", help="evaluate a labeling")
    e.add_argument("--tree", required=True)
    e.add_argument("--labeling", required=True)
    e.add_argument("--method", default="auto", choices=["auto", "bruteforce", "certified", "local", "circle"])
    e.add_argument("--eps", type=float, default=0.05)
    e.add_argument("--slack", default="lipschitz", choices=["lipschitz", "angular", "best"])
    e.add_argument("--net", help="EpsNet JSON to use instead of building one")
    e.add_argument("--starts", type=int, default=8)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    oe = sub.add_parser("oeval", help="evaluate an orientation exactly")
    oe.add_argument("--tree", required=True)
    oe.add_argument("--orientation", required=True)
    oe.add_argument("--method", default="reroot", choices=["reroot", "quadratic"])
    oe.add_argument("--out")
    oe.set_defaults(func=cmd_oeval)

    orc = sub.add_parser("oracle", help="brute-force oracles for small trees")
    orc.add_argument("what", choices=["oriented", "orientation", "subtree"])
    orc.add_argument("--tree", required=True)
    orc.add_argument("--orientation")
    orc.add_argument("--labeling")
    orc.set_defaults(func=cmd_oracle)

    nt = sub.add_parser("net", help="build an eps-net on S^d")
    nt.add_argument("--d", type=int, required=True)
    nt.add_argument("--eps", type=float, required=True)
    nt.add_argument("--seed", type=int, default=0)
    nt.add_argument("--trials", type=int, default=0, help="attach a sampled covering certificate")
    nt.add_argument("--certified", action="store_true",
                    help="densify the greedy net and widen eps to the observed covering gap")
    nt.add_argument("--out")
    nt.set_defaults(func=cmd_net)

    x = sub.add_parser("experiment", help="run a seeded scenario and write CSV")
    x.add_argument("scenario", nargs="?", choices=SCENARIOS)
    x.add_argument("--config", help="JSON config; flags override its fields")
    x.add_argument("--d", type=int)
    x.add_argument("--grid", type=_ints)
    x.add_argument("--seed", type=int)
    x.add_argument("--reps", type=int, default=1, help="with --seed, use seeds seed..seed+reps-1")
    x.add_argument("--seeds", type=_ints)
    x.add_argument("--family", choices=["random", "caterpillar", "spider", "star"])
    x.add_argument("--eps", type=float)
    x.add_argument("--l0", type=int)
    x.add_argument("--csv")
    x.add_argument("--threads", type=int)
    x.add_argument("--timing", action="store_true", help="fill the wall_ms column")
    x.set_defaults(func=cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"treedisc: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"treedisc: internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
