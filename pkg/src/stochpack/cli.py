"""Command-line entry point: ``stochpack <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import ceil_bins, format_size, read_instance, verify_packing
from .distributions import derive_seed, load_distribution, parse_distribution, sample_sizes
from .exact import ExactError, opt_exact
from .experiments import TrialStats, estimate_arr, estimate_ecr, resolve_algorithm, triplet_expectation_check
from .heuristics import make_online_packer
from .iid_meta import ImpAlg, MetaConfig
from .vector import opt_vector_exact, pack_vector, sample_vectors, verify_vector_packing, MAX_EXACT_VECTORS


class UsageError(Exception):
    pass


def _meta_config(args) -> MetaConfig:
    keys = {}
    if getattr(args, "config", None):
        keys = json.loads(Path(args.config).read_text())
    epsilon = args.epsilon if args.epsilon is not None else keys.get("epsilon", 0.5)
    delta = args.delta if args.delta is not None else keys.get("delta")
    offline = args.offline or keys.get("offline", "FFD")
    if delta is not None:
        return MetaConfig.from_delta(float(delta), offline)
    return MetaConfig(epsilon=float(epsilon), offline=offline)


def _add_meta_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=None, help="target slack for the meta-algorithm (default 0.5)")
    p.add_argument("--delta", type=float, default=None, help="override the large-item threshold (rounded down to 2^-i)")
    p.add_argument("--offline", default=None, help="offline algorithm used inside the meta-algorithm (default FFD)")
    p.add_argument("--config", default=None, help="JSON file with epsilon/delta/offline keys")


def _report(stats: TrialStats, csv_path: str | None, out) -> None:
    print(stats.summary(), file=out)
    census = ", ".join(f"{k}-bins={v}" for k, v in sorted(stats.k_bin_census.items())[:6])
    if census:
        print(f"census: {census}", file=out)
    if stats.triplet_count:
        print(f"mean triplets={sum(stats.triplet_count) / stats.trials:.3f}", file=out)
    if csv_path:
        stats.write_csv(csv_path)


def cmd_pack(args, out) -> int:
    inst = read_instance(args.input)
    packing = resolve_algorithm(args.algo, _meta_config(args))(list(inst.sizes))
    problems = verify_packing(inst.sizes, packing)
    if problems:
        raise UsageError("invalid packing: " + "; ".join(problems[:5]))
    if args.out:
        Path(args.out).write_text(packing.to_json())
    print(f"{args.algo}: {len(packing)} bins for {inst.n} items", file=out)
    return 0


def cmd_opt(args, out) -> int:
    inst = read_instance(args.input)
    res = opt_exact(inst.sizes)
    print(f"opt={res.bins} method={res.method}", file=out)
    for b in res.packing.bins:
        print(" ".join(format_size(inst.sizes[i]) for i in b), file=out)
    return 0


def cmd_simulate_iid(args, out) -> int:
    spec = load_distribution(args.dist)
    algo = resolve_algorithm(args.algo, _meta_config(args))
    stats = estimate_ecr(spec, algo, args.n, args.trials, args.seed)
    _report(stats, args.csv, out)
    return 0


def cmd_simulate_random_order(args, out) -> int:
    if bool(args.input) == bool(args.gen):
        raise UsageError("give exactly one of --input or --gen")
    if args.input:
        sizes = list(read_instance(args.input).sizes)
    else:
        if args.n is None:
            raise UsageError("--gen needs --n")
        gen = Path(args.gen)
        spec = load_distribution(gen) if gen.exists() else parse_distribution(args.gen)
        sizes = sample_sizes(spec, args.n, args.seed)
    algo = resolve_algorithm(args.algo, _meta_config(args))
    stats = estimate_arr(sizes, algo, args.trials, args.seed)
    _report(stats, args.csv, out)
    return 0


def cmd_triplets(args, out) -> int:
    if not 0 <= args.m <= args.n:
        raise UsageError("need 0 <= m <= n")
    res = triplet_expectation_check(args.n, args.m, args.trials, args.seed)
    print(f"mean={res.mean:.6f} se={res.se:.6f} formula={res.formula:.6f} "
          f"{'ok' if res.ok else 'BELOW'}", file=out)
    return 0 if res.ok else 1


def cmd_vector(args, out) -> int:
    paths = args.dists
    if len(paths) == 1:
        paths = paths * args.dim
    if len(paths) != args.dim:
        raise UsageError(f"--dists needs 1 or {args.dim} files, got {len(paths)}")
    specs = [load_distribution(p) for p in paths]
    config = _meta_config(args)
    algo = args.algo.upper()
    make = (lambda: ImpAlg(config)) if algo in ("META", "IMP_ALG") else (lambda: make_online_packer(args.algo))
    stats = TrialStats()
    for t in range(args.trials):
        items = sample_vectors(specs, args.n, derive_seed(args.seed, t))
        packing = pack_vector(items, args.dim, make)
        problems = verify_vector_packing(items, packing)
        if problems:
            raise UsageError("invalid vector packing: " + "; ".join(problems[:5]))
        if args.n <= MAX_EXACT_VECTORS:
            denom, kind = opt_vector_exact(items), "opt"
        else:
            denom = max(ceil_bins(sum(v[j] for v in items)) for j in range(args.dim))
            kind = "lower_bound"
        stats.add(len(packing), denom, kind)
    _report(stats, args.csv, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stochpack", description="Online bin packing under stochastic arrivals.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pack", help="pack an instance file")
    p.add_argument("--algo", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    _add_meta_flags(p)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("simulate-iid", help="estimate the expected competitive ratio")
    p.add_argument("--dist", required=True, help="distribution JSON file")
    p.add_argument("--algo", required=True, help="heuristic id, MBF, meta or alg_known_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--csv")
    _add_meta_flags(p)
    p.set_defaults(func=cmd_simulate_iid)

    p = sub.add_parser("simulate-random-order", help="estimate the random-order ratio of one instance")
    p.add_argument("--input")
    p.add_argument("--gen", help="distribution JSON file or inline JSON")
    p.add_argument("--n", type=int, help="instance size for --gen")
    p.add_argument("--algo", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--csv")
    _add_meta_flags(p)
    p.set_defaults(func=cmd_simulate_random_order)

    p = sub.add_parser("triplets", help="mean disjoint S-triplet count over random orders")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_triplets)

    p = sub.add_parser("vector", help="vector packing through max-coordinate rounding")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--dists", nargs="+", required=True, help="one distribution file per dimension (or one shared)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--algo", default="meta")
    p.add_argument("--csv")
    _add_meta_flags(p)
    p.set_defaults(func=cmd_vector)

    p = sub.add_parser("opt", help="exact optimum of an instance file")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_opt)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, ValueError, ExactError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
