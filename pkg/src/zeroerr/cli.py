"""Command-line front end.

Every CSV starts with ``#`` comment lines holding the package version and the
fully resolved configuration, so a file can be regenerated from its header.

Exit codes: 0 success, 2 domain or hypothesis violation, 3 construction or
verification failure, 4 budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, bounds
from .bpis import (bpis_bound_trial, bpis_floor_from_rate, bpis_size_threshold,
                   build_conflict_graph, max_bpis, max_bpis_blocklength, max_bpis_direct)
from .channel import Channel, dumps, read_channel, sample_erasure_identity
from .codegen import (PackedCode, build_zero_error_code, sample_conditioned_channel,
                      verify_zero_error_against)
from .coding import CodebookPair, all_words, exact_zero_error_sum_rate, is_zero_error
from .errors import BudgetExceeded, ConstructionError, DomainError
from .families import format_word
from .uniform import is_gamma_uniform_sets, uniform_pair

EXIT_OK, EXIT_REGIME, EXIT_VERIFY, EXIT_BUDGET = 0, 2, 3, 4


class Failure(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        return f"{value:.10g}"
    return str(value)


def _config_lines(args) -> list[str]:
    skip = {"func", "command", "bounds_command"}
    items = sorted((k, v) for k, v in vars(args).items() if k not in skip)
    lines = [f"# zeroerr {__version__} {args.command}"]
    lines += [f"# {k}={v}" for k, v in items]
    return lines


def _write_csv(args, header, rows, footer=()) -> str:
    buf = io.StringIO()
    for line in _config_lines(args):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    for line in footer:
        buf.write(f"# {line}\n")
    text = buf.getvalue()
    _emit(args, text)
    return text


def _emit(args, text):
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _q_size(args) -> int:
    if getattr(args, "alphabet", None):
        return args.alphabet
    if args.q < 1:
        raise DomainError("q must be at least 1")
    return 2 ** args.q


# -- subcommands ------------------------------------------------------------

def cmd_sample(args):
    channel = sample_erasure_identity(_q_size(args), args.eps, args.seed)
    _emit(args, dumps(channel))


def _all_erasure_channels(q_size):
    cells = q_size * q_size
    for mask in range(1 << cells):
        erased = [(i // q_size, i % q_size) for i in range(cells) if mask >> i & 1]
        yield mask, Channel.from_erasures(q_size, erased)


def cmd_exact(args):
    q_size = args.alphabet or 2
    if q_size ** args.n > args.budget:
        raise BudgetExceeded(f"Q^n = {q_size ** args.n} exceeds budget {args.budget}")
    if args.channel:
        channels = [(0, read_channel(args.channel))]
    else:
        if q_size ** 2 > 16:
            raise BudgetExceeded("enumerating all channels needs Q <= 4")
        channels = _all_erasure_channels(q_size)
    rows = []
    failures = 0
    for ident, channel in channels:
        best = exact_zero_error_sum_rate(channel, args.n, word_budget=args.budget)
        direct = max_bpis_direct(channel, args.n, budget=args.budget)
        floor = bpis_floor_from_rate(best.rate.sum, args.n, channel.q_bits)
        floor_ok = floor <= 0 or direct.size >= floor
        code_ok = True
        if direct.size:
            words = all_words(channel.q_size, args.n)
            pair = CodebookPair(tuple(words[i] for i in direct.A), tuple(words[j] for j in direct.B))
            code_ok = is_zero_error(channel, pair)
        consistent = floor_ok and code_ok
        failures += not consistent
        erased = " ".join(f"{x}{y}" for x, y in channel.erased_pairs())
        rows.append([ident, erased, args.n, best.rate.sum, best.rate.r1, best.rate.r2,
                     direct.size, floor, consistent])
    header = ["channel_id", "erased", "n", "exact_sum_rate", "r1", "r2", "max_bpis",
              "bpis_floor", "consistent"]
    _write_csv(args, header, rows, [f"channels={len(rows)} inconsistent={failures}"])
    if failures:
        raise Failure(EXIT_VERIFY, f"{failures} inconsistent channel(s)")


def cmd_bpis(args):
    if args.channel:
        channel = read_channel(args.channel)
    else:
        channel = sample_erasure_identity(_q_size(args), args.eps, args.seed)
    best = max_bpis_blocklength(build_conflict_graph(channel), args.n, budget=args.budget)
    base = best.base
    rows = [[channel.q_size, channel.erased_count, base.size, args.n, best.size,
             " ".join(map(str, sorted(base.A))), " ".join(map(str, sorted(base.B)))]]
    _write_csv(args, ["Q", "erased_count", "bpis_size", "n", "bpis_size_n", "A", "B"], rows)


def run_bpis_sweep(q_size, eps, trials, seed, budget=24):
    return [bpis_bound_trial(q_size, eps, seed + i, budget) for i in range(trials)]


def cmd_bpis_sweep(args):
    if args.trials < 1:
        raise DomainError("trials must be at least 1")
    q_size = _q_size(args)
    trials = run_bpis_sweep(q_size, args.eps, args.trials, args.seed, args.budget)
    rows = [[t.seed, t.q, t.eps, t.erased_count, t.bpis_size, t.log_rate, t.bound, t.satisfied]
            for t in trials]
    hits = sum(t.satisfied for t in trials)
    footer = [f"summary trials={len(trials)} satisfied={hits} rate={hits / len(trials):.6f}",
              f"threshold (2Q+2)/eps={bpis_size_threshold(q_size, args.eps):.6g}"]
    header = ["seed", "q", "eps", "erased_count", "bpis_size", "log_rate", "bound", "satisfied"]
    _write_csv(args, header, rows, footer)


def cmd_blocklength_sweep(args):
    qs = range(args.q_min, args.q_max + 1)
    ns = range(2, args.n + 1)
    gammas = args.gammas or [args.gamma]
    rows = []
    for q in qs:
        for n in ns:
            for g in gammas:
                rep = bounds.blocklength_rate_upper_bound(q, n, g, args.eps)
                rows.append([q, n, g, args.eps, rep.value, 2 * q, rep.hypotheses_ok,
                             "; ".join(rep.violations)])
    header = ["q", "n", "gamma", "eps", "upper_bound", "trivial_bound", "hypotheses_ok",
              "violations"]
    _write_csv(args, header, rows)


def cmd_uniform_construct(args):
    q_size = _q_size(args)
    A, B = uniform_pair(q_size, args.n, args.gamma)
    verdict = is_gamma_uniform_sets(A, B, args.gamma, args.audit, args.seed)
    log_size = math.log2(A.cardinality) + math.log2(B.cardinality)
    if q_size == 2:
        lower = bounds.binary_pair_lower_bound_log2(args.n, args.gamma)
    else:
        lower = bounds.staircase_pair_lower_bound_log2(q_size, args.n, args.gamma)
    upper = math.nan
    if q_size & (q_size - 1) == 0 and args.gamma <= 2:
        upper = math.log2(bounds.uniform_pair_upper_bound(args.n, int(math.log2(q_size)),
                                                         args.gamma)[1])
    if args.families:
        Path(args.families).write_text(A.descriptor() + "\n" + B.descriptor() + "\n")
    rows = [[q_size, args.n, args.gamma, A.cardinality, B.cardinality, log_size, lower, upper,
             verdict.kind, verdict.samples]]
    header = ["Q", "n", "gamma", "size_a", "size_b", "log2_product", "lower_bound_log2",
              "upper_bound_log2", "verdict", "checked_pairs"]
    _write_csv(args, header, rows)
    if verdict.kind == "refuted":
        raise Failure(EXIT_VERIFY, f"non-uniform cross pair {verdict.witness}")


def run_pipeline(q_size, n, eps, gamma, slack, trials, seed, sample_cap=256, raw_d=None):
    """One record per seed: conditioned channel, packed code, verdict."""
    A, B = uniform_pair(q_size, n, gamma)
    results = []
    for i in range(trials):
        s = seed + i
        channel, rejections = sample_conditioned_channel(q_size, eps, s)
        code = build_zero_error_code(A, B, gamma, eps, slack, sample_cap, s, raw_d=raw_d)
        verdict = verify_zero_error_against(code, channel)
        results.append((s, channel, rejections, code, verdict))
    return results


def cmd_pipeline(args):
    q_size = _q_size(args)
    results = run_pipeline(q_size, args.n, args.eps, args.gamma, args.slack, args.trials,
                           args.seed, args.sample_cap, args.raw_d)
    rows = []
    for s, channel, rejections, code, verdict in results:
        da, db = code.min_distances()
        witness = ""
        if verdict.collision is not None:
            c = verdict.collision
            witness = (f"t{c.terminal} " + " ".join(format_word(w, q_size)
                                                    for w in (c.x, c.y, c.x2, c.y2)))
        rows.append([s, q_size, args.n, args.eps, args.gamma, args.slack, float(code.d),
                     code.threshold, rejections, channel.erased_count,
                     float(channel.erased_fraction()), len(code.A_prime), len(code.B_prime),
                     code.rates[0], code.rates[1], code.sum_rate, code.stats["guaranteed_rate"],
                     "" if da is None else da, "" if db is None else db,
                     "ok" if verdict.ok else "collision", witness])
        if args.code_out:
            path = Path(args.code_out)
            if args.trials > 1:
                path = path.with_name(f"{path.stem}.{s}{path.suffix}")
            path.write_text(code.dumps())
    header = ["seed", "Q", "n", "eps", "gamma", "slack", "d", "threshold", "rejections",
              "erased_count", "erased_fraction", "size_a", "size_b", "rate_a", "rate_b",
              "achieved_sum_rate", "guaranteed_rate", "min_dist_a", "min_dist_b", "verdict",
              "witness"]
    bad = sum(not verdict.ok for *_, verdict in results)
    _write_csv(args, header, rows, [f"summary trials={len(rows)} ok={len(rows) - bad}"])
    if bad:
        raise Failure(EXIT_VERIFY, f"{bad} collision(s)")


def cmd_verify(args):
    channel = read_channel(args.channel)
    code = PackedCode.loads(Path(args.code).read_text())
    verdict = verify_zero_error_against(code, channel)
    if verdict.ok:
        print("ok")
        return
    c = verdict.collision
    q = code.q_size
    print(f"collision terminal={c.terminal} x={format_word(c.x, q)} y={format_word(c.y, q)} "
          f"x2={format_word(c.x2, q)} y2={format_word(c.y2, q)}")
    raise Failure(EXIT_VERIFY, "code is not zero-error on this channel")


def cmd_bounds_eval(args):
    params = {}
    for item in args.params or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise DomainError(f"parameter {item!r} is not key=value")
        params[key] = value
    try:
        report = bounds.evaluate(args.name, params)
    except KeyError as exc:
        raise DomainError(exc.args[0]) from None
    except TypeError as exc:
        raise DomainError(str(exc)) from None
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    keys = list(report.params)
    writer.writerow(["name", *keys, "value", "hypotheses_ok", "violations", *report.extra])
    writer.writerow([report.name, *(_fmt(report.params[k]) for k in keys), _fmt(report.value),
                     _fmt(report.hypotheses_ok), "; ".join(report.violations),
                     *(_fmt(v) for v in report.extra.values())])
    _emit(args, buf.getvalue())
    if not report.hypotheses_ok:
        raise Failure(EXIT_REGIME, "hypotheses violated: " + "; ".join(report.violations))


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zeroerr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"zeroerr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *flags):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        common = {
            "q": dict(type=int, default=3, help="alphabet bits; Q = 2^q"),
            "alphabet": dict(type=int, default=None, help="alphabet size Q (overrides --q)"),
            "n": dict(type=int, default=1, help="blocklength"),
            "eps": dict(type=float, default=0.25, help="erasure probability"),
            "gamma": dict(type=float, default=1.0, help="uniformity slack"),
            "slack": dict(type=float, default=0.01, help="extra packing radius"),
            "trials": dict(type=int, default=1, help="number of seeds"),
            "seed": dict(type=int, default=0, help="first seed"),
            "budget": dict(type=int, default=24, help="exhaustive-search budget"),
            "out": dict(default=None, help="output path (default stdout)"),
        }
        for flag in flags:
            p.add_argument(f"--{flag.replace('_', '-')}", dest=flag, **common[flag])
        return p

    add("sample", cmd_sample, "sample a random erasure/identity channel",
        "q", "alphabet", "eps", "seed", "out")

    p = add("exact", cmd_exact, "exhaustive rate / BPIS campaign over all small channels",
            "alphabet", "n", "out")
    p.add_argument("--budget", type=int, default=16, help="largest Q^n searched")
    p.add_argument("--channel", default=None, help="single channel file instead of all channels")

    p = add("bpis", cmd_bpis, "maximum BPIS of a channel's conflict graph",
            "q", "alphabet", "n", "eps", "seed", "budget", "out")
    p.add_argument("--channel", default=None, help="channel file (default: sample one)")

    add("bpis-sweep", cmd_bpis_sweep, "Monte Carlo check of the BPIS size bound",
        "q", "alphabet", "eps", "trials", "seed", "budget", "out")

    p = add("blocklength-sweep", cmd_blocklength_sweep,
            "evaluate the finite-blocklength upper bound on a grid", "gamma", "out")
    p.add_argument("--q-min", type=int, default=1)
    p.add_argument("--q-max", type=int, default=20)
    p.add_argument("--n", type=int, default=4, help="largest blocklength")
    p.add_argument("--eps", type=float, default=None, help="check the eps hypothesis too")
    p.add_argument("--gammas", type=float, nargs="*", default=None)

    p = add("uniform-construct", cmd_uniform_construct,
            "build and audit an explicit gamma-uniform pair",
            "q", "alphabet", "gamma", "seed", "out")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--audit", type=int, default=100_000, help="cross pairs to check")
    p.add_argument("--families", default=None, help="write family descriptors here")

    p = add("pipeline", cmd_pipeline, "build and verify packed zero-error codes",
            "q", "alphabet", "eps", "gamma", "slack", "trials", "seed", "out")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--sample-cap", type=int, default=256)
    p.add_argument("--raw-d", type=float, default=None,
                   help="override the packing radius (drops the zero-error guarantee)")
    p.add_argument("--code-out", default=None, help="write packed code(s) here")
    p.set_defaults(q=2, eps=0.05)

    p = sub.add_parser("verify", help="check a packed code against a channel")
    p.set_defaults(func=cmd_verify)
    p.add_argument("--channel", required=True)
    p.add_argument("--code", required=True)

    p = sub.add_parser("bounds", help="closed-form bound evaluators")
    bsub = p.add_subparsers(dest="bounds_command", required=True)
    e = bsub.add_parser("eval", help="evaluate one bound as a CSV row")
    e.set_defaults(func=cmd_bounds_eval)
    e.add_argument("name", choices=sorted(bounds.EVALUATORS))
    e.add_argument("--params", nargs="*", metavar="KEY=VALUE")
    e.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except Failure as exc:
        print(f"zeroerr: {exc}", file=sys.stderr)
        return exc.code
    except BudgetExceeded as exc:
        print(f"zeroerr: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ConstructionError as exc:
        print(f"zeroerr: construction failed: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_VERIFY
    except (DomainError, ValueError, OSError) as exc:
        print(f"zeroerr: {exc}", file=sys.stderr)
        return EXIT_REGIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
