"""Command-line front end: build, count, estimate, verify, singular.

Exit codes: 0 success, 2 usage or parameter error, 3 the request needs more of
the staircase layout than was materialized.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .coding import (
    GrowthSeries,
    SamplingPlan,
    SetFamily,
    count_exact,
    count_plateau,
    count_sample,
    count_upper_bound,
    linear_family,
    sample_starts,
    standard_family,
    _coded_system,
)
from .entropy import fit_exponent
from .errors import BrouwerEntropyError, LayoutBoundError
from .glued_plane import GluedSystem, GluingSpec, build_gluing, build_linear_example, build_translation
from .oracles import DiscreteSystem
from .singularity import check_mutual_singularity
from .suites import run_lemma_suite, run_sandwich_suite

EXIT_OK, EXIT_USAGE, EXIT_BOUND = 0, 2, 3
SUITES = {"lemmas": run_lemma_suite, "sandwich": run_sandwich_suite}


class UsageError(Exception):
    pass


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _n_list(text: str) -> list[int]:
    try:
        ns = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad n list {text!r}") from exc
    if not ns or ns[0] < 1 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise UsageError("n list must be positive and strictly increasing")
    return ns


def load_system(ref: str):
    """``translation``, ``linear``, or a path to a gluing spec or discrete oracle JSON."""
    if ref == "translation":
        return build_translation()
    if ref == "linear":
        return build_linear_example()
    try:
        data = json.loads(Path(ref).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read system {ref!r}: {exc}") from exc
    if "orbits" in data:
        return DiscreteSystem.from_dict(data)
    return GluedSystem(GluingSpec.from_dict(data))


def load_family(ref: str | None, system) -> SetFamily | None:
    if isinstance(system, DiscreteSystem):
        if ref in (None, "all", "standard"):
            return None
        return [nm.strip() for nm in ref.split(",") if nm.strip()]
    if ref in (None, "standard"):
        if isinstance(system, GluedSystem):
            return standard_family(system.spec.L)
        if system.name == "linear":
            return linear_family()
        return standard_family(1)
    try:
        return SetFamily.from_json(Path(ref).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read family {ref!r}: {exc}") from exc


# ---------------------------------------------------------------------------


def cmd_build(args) -> int:
    spec = build_gluing(args.L, args.alpha, args.k_max)
    _write(args.out, spec.to_json())
    return EXIT_OK


def _count_one(system, family, n, strategy, plan, seed) -> int:
    if strategy == "exact":
        if isinstance(system, DiscreteSystem):
            return count_exact(system, family, n)
        if isinstance(system, GluedSystem):
            raise UsageError("exact counts need a discrete oracle or the translation/linear systems")
        return count_exact(_coded_system(system, sample_starts(system, n, plan, seed), family), None, n)
    if strategy == "sample":
        return count_sample(system, family, n, plan, seed)
    if not isinstance(system, GluedSystem):
        raise UsageError(f"strategy {strategy!r} needs a glued system")
    if strategy in ("plateau", "bound-lower"):
        value = count_plateau(system.spec, n, family)
        if value < 1:
            raise UsageError(f"n = {n} is below 2L; no full templates fit")
        return value
    return count_upper_bound(system.spec, n)


def cmd_count(args) -> int:
    system = load_system(args.system)
    family = load_family(args.family, system)
    ns = _n_list(args.n)
    plan = SamplingPlan(random_fill=args.random_fill)
    rows = tuple((n, _count_one(system, family, n, args.strategy, plan, args.seed), args.strategy) for n in ns)
    _write(args.out, GrowthSeries(rows).to_csv())
    return EXIT_OK


def cmd_estimate(args) -> int:
    try:
        series = GrowthSeries.from_csv(Path(args.counts).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read counts {args.counts!r}: {exc}") from exc
    window = None
    if args.n_min is not None or args.n_max is not None:
        window = (args.n_min or 1, args.n_max or max(series.ns))
    _write(args.out, fit_exponent(series, args.method, window).to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}")
    kwargs = {"seed": args.seed}
    if args.systems is not None:
        kwargs["systems"] = args.systems
    violations = SUITES[args.suite](**kwargs)
    if not violations:
        print(f"{args.suite}: all inequalities hold")
        return EXIT_OK
    first = violations[0]
    print(f"{args.suite}: {len(violations)} violations; first {first.check} at n={first.n}: {first.lhs} > {first.rhs}")
    print(first.system.to_json())
    return 1


def cmd_singular(args) -> int:
    system = load_system(args.system)
    family = load_family(args.family, system)
    verdict = check_mutual_singularity(system, family, args.gap, args.horizon)
    _write(args.out, verdict.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brouwer-entropy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="write a gluing spec")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--k-max", type=int, default=4096)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("count", help="word counts on an n grid, as CSV")
    p.add_argument("--system", required=True, help="spec/oracle JSON, 'translation' or 'linear'")
    p.add_argument("--family", default="standard")
    p.add_argument("--n", required=True, help="comma separated, increasing")
    p.add_argument("--strategy", choices=["exact", "plateau", "sample", "bound-lower", "bound-upper"], default="sample")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-fill", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("estimate", help="fit the growth exponent of a counts CSV")
    p.add_argument("--counts", required=True)
    p.add_argument("--method", choices=["regress", "ratio"], default="regress")
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="run an oracle inequality suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--systems", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("singular", help="mutual singularity verdict as JSON")
    p.add_argument("--system", required=True)
    p.add_argument("--family", default="standard")
    p.add_argument("--gap", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_singular)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except LayoutBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (UsageError, BrouwerEntropyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
