"""Command-line entry point.

Every command prints one JSON document.  Exit status: 0 for success or a
satisfied predicate, 1 for a violated predicate or a tripped bound guard,
2 for usage and input errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import constructions, search
from .metric import Configuration, DimensionError, FormatError, MetricKind, Point, embed_l1_to_linf, parse_scalar, render_scalar

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_config(path: str) -> Configuration:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path) as fh:
                text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return Configuration.from_json(text)


def _metric_override(config: Configuration, metric: str | None) -> Configuration:
    return config.with_metric(metric) if metric else config


# -- commands -------------------------------------------------------------


def cmd_generate(args):
    gen = constructions.GENERATORS[args.name]
    if args.name == "grid-mod-k":
        if args.k is None:
            raise UsageError("grid-mod-k needs --k")
        config = gen(args.n, args.k)
    else:
        if args.k is not None:
            raise UsageError(f"--k does not apply to {args.name}")
        config = gen(args.n)
    return EXIT_OK, config.to_dict()


def cmd_verify(args):
    from . import verifiers

    config = _metric_override(_read_config(args.input), args.metric)
    if args.predicate == "spectrum":
        spec = verifiers.distance_spectrum(config)
        return EXIT_OK, {"predicate": "spectrum", "spectrum": [render_scalar(s) for s in spec]}
    if args.predicate == "not-divisible":
        if args.k is None:
            raise UsageError("not-divisible needs --k")
        verdict = verifiers.check_not_divisible(config, args.k)
    else:
        if args.k is not None:
            raise UsageError(f"--k does not apply to {args.predicate}")
        verdict = verifiers.PREDICATES[args.predicate](config)
    doc = {"predicate": args.predicate, "points": len(config)}
    doc.update(verdict.to_dict())
    return (EXIT_OK if verdict.ok else EXIT_VIOLATION), doc


def cmd_poset(args):
    from . import poset

    config = _read_config(args.input).with_metric(MetricKind.LINF)
    rel = poset.ComparabilityRelation(config)
    length, chain = poset.longest_chain(rel)
    cover, antichain = poset.dilworth_decompose(rel)
    return EXIT_OK, {
        "points": len(config),
        "edges": [list(e) for e in rel.edges],
        "longest_chain": {"length": length, "witness": chain},
        "dilworth": {"chains": cover.chains, "antichain": antichain, "width": len(antichain)},
    }


def cmd_certify(args):
    from . import poset, verifiers

    config = _metric_override(_read_config(args.input), args.metric)
    if config.metric is not MetricKind.LINF:
        raise UsageError("certify needs an l-infinity configuration (use --metric linf)")
    if len(config) >= 2:
        pre = verifiers.check_odd_distances(config)
        if not pre.ok:
            return EXIT_VIOLATION, {"ok": False, "reason": "precondition: odd distances",
                                    "witness": pre.witness.to_dict()}
    try:
        cert = poset.certify_odd_bound(config)
    except poset.CertificateError as exc:
        return EXIT_VIOLATION, {"ok": False, "reason": str(exc), "triple": list(exc.triple)}
    check = poset.verify_certificate(config, cert)
    doc = {
        "ok": check.ok,
        "bound": 2 ** config.dim,
        "implied_bound": cert.implied_bound(),
        "level_sizes": [lv.set_size for lv in cert.levels()],
        "verifier_problems": check.problems,
        "certificate": cert.to_dict(),
    }
    return (EXIT_OK if check.ok else EXIT_VIOLATION), doc


def cmd_search(args):
    threads = 1 if args.deterministic else (args.threads or search.default_threads())
    if args.input is None and args.dim is None and args.grid is None and args.kind != "odd-l1-seven":
        args.input = "-"
    if args.input:
        if args.grid is not None:
            raise UsageError("--grid and --input are mutually exclusive")
        config = _read_config(args.input)
        candidates = config
        metric = args.metric or config.metric.value
        if args.dim is not None and args.dim != config.dim:
            raise UsageError(f"--dim {args.dim} disagrees with the input dimension {config.dim}")
    else:
        if args.kind == "odd-l1-seven":
            candidates = search.parse_grid(args.grid or "half", args.dim or 3)
        else:
            if args.dim is None:
                raise UsageError("--dim is required without --input")
            candidates = search.parse_grid(args.grid or "dyadic", args.dim)
        metric = args.metric
    try:
        if args.kind == "odd-clique":
            res = search.max_odd_distance_clique(candidates, metric or "linf", threads=threads)
        elif args.kind == "right-equidistant":
            res = search.max_right_equidistant(candidates, metric or "linf", hard_cap=args.hard_cap,
                                               threads=threads)
        else:
            if metric not in (None, "l1"):
                raise UsageError("odd-l1-seven always uses the l1 metric")
            if isinstance(candidates, Configuration):
                candidates = candidates.with_metric(MetricKind.L1)
                res = search.max_odd_distance_clique(candidates, "l1", threads=threads)
            else:
                res = search.search_odd_l1_seven(candidates, artifact=args.artifact, threads=threads)
    except search.BoundViolation as exc:
        doc = {"guard": str(exc)}
        doc.update(exc.result.to_dict(timing=not args.deterministic))
        return EXIT_VIOLATION, doc
    doc = {"search": args.kind}
    doc.update(res.to_dict(timing=not args.deterministic))
    return EXIT_OK, doc


def cmd_color(args):
    from . import coloring

    if args.action == "build":
        if args.dim is None:
            raise UsageError("color build needs --dim")
        cov = coloring.build_covering(args.dim, args.strategy, args.seed, parse_scalar(args.resolution),
                                      full=not args.grid_only)
        return EXIT_OK, cov.to_dict()
    if not args.covering:
        raise UsageError(f"color {args.action} needs --covering")
    try:
        with open(args.covering) as fh:
            cov = coloring.Covering.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FormatError(f"bad covering file: {exc}") from None
    if args.action == "check":
        verdict = coloring.verify_coloring(cov, args.samples, args.seed)
        return (EXIT_OK if verdict.ok else EXIT_VIOLATION), verdict.to_dict()
    if args.point is None:
        raise UsageError("color of needs --point")
    try:
        raw = json.loads(args.point)
    except json.JSONDecodeError:
        raw = [s.strip() for s in args.point.strip("[] ").split(",")]
    if not isinstance(raw, list):
        raise FormatError("--point must be a list of scalars")
    p = Point(parse_scalar(v) for v in raw)
    return EXIT_OK, {"point": p.to_json(), "color": coloring.color_of(cov, p)}


def cmd_embed(args):
    config = _read_config(args.input)
    if config.metric is not MetricKind.L1:
        raise UsageError("embed expects an l1 configuration")
    pts = [embed_l1_to_linf(p) for p in config.points]
    return EXIT_OK, Configuration(pts, MetricKind.LINF, 2 ** (config.dim - 1)).to_dict()


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="print nothing; report through the exit code")

    p = _Parser(prog="extremal", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="emit an extremal configuration")
    g.add_argument("name", choices=sorted(constructions.GENERATORS))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", parents=[common], help="check a predicate")
    v.add_argument("predicate", choices=["right-equidistant", "odd-distances", "not-divisible",
                                         "equilateral", "spectrum"])
    v.add_argument("--input", default="-")
    v.add_argument("--k", type=int)
    v.add_argument("--metric", choices=[m.value for m in MetricKind])
    v.set_defaults(func=cmd_verify)

    po = sub.add_parser("poset", parents=[common], help="relation, longest chain, Dilworth decomposition")
    po.add_argument("--input", default="-")
    po.set_defaults(func=cmd_poset)

    c = sub.add_parser("certify", parents=[common], help="certificate that an odd-distance set has at most 2^n points")
    c.add_argument("--input", default="-")
    c.add_argument("--metric", choices=[m.value for m in MetricKind])
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("search", parents=[common], help="exhaustive grid searches")
    s.add_argument("kind", choices=["odd-clique", "right-equidistant", "odd-l1-seven"])
    s.add_argument("--dim", type=int)
    s.add_argument("--metric", choices=[m.value for m in MetricKind])
    s.add_argument("--grid", help=f"preset ({', '.join(search.PRESETS)}) or JSON values")
    s.add_argument("--input", help="explicit candidate configuration instead of a grid; read from stdin when neither --grid nor --dim is given")
    s.add_argument("--threads", type=int)
    s.add_argument("--deterministic", action="store_true", help="single thread, no timing in the output")
    s.add_argument("--hard-cap", type=int)
    s.add_argument("--artifact", default="odd_l1_seven_witness.json",
                   help="where odd-l1-seven stores cliques of size >= 7")
    s.set_defaults(func=cmd_search)

    co = sub.add_parser("color", parents=[common], help="odd-distance-free colourings of l1^n")
    co.add_argument("action", choices=["build", "check", "of"])
    co.add_argument("--dim", type=int)
    co.add_argument("--strategy", choices=["greedy", "greedy_grid", "random", "randomized"], default="greedy")
    co.add_argument("--seed", type=int, default=0)
    co.add_argument("--resolution", default="1/16")
    co.add_argument("--grid-only", action="store_true", help="certify grid points only")
    co.add_argument("--covering")
    co.add_argument("--samples", type=int, default=100_000)
    co.add_argument("--point")
    co.set_defaults(func=cmd_color)

    e = sub.add_parser("embed", parents=[common], help="map an l1 configuration isometrically into l-infinity")
    e.add_argument("--input", default="-")
    e.set_defaults(func=cmd_embed)
    return p


def _emit(doc, quiet: bool) -> None:
    if not quiet:
        sys.stdout.write(json.dumps(doc) + "\n")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    quiet = "--quiet" in argv
    try:
        args = build_parser().parse_args(argv)
        code, doc = args.func(args)
    except UsageError as exc:
        code, doc = EXIT_USAGE, {"error": {"type": "usage", "message": str(exc)}}
    except (FormatError, DimensionError) as exc:
        code, doc = EXIT_USAGE, {"error": {"type": "format", "message": str(exc)}}
    except search.GridCapError as exc:
        code, doc = EXIT_USAGE, {"error": {"type": "grid-cap", "message": str(exc)}}
    except ValueError as exc:
        code, doc = EXIT_USAGE, {"error": {"type": "invalid", "message": str(exc)}}
    _emit(doc, quiet)
    return code


if __name__ == "__main__":
    sys.exit(main())
