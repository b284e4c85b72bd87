"""Command-line front end.

    gcdcode rate     --config run.cfg
    gcdcode build    --config run.cfg --out book.gcdc
    gcdcode encode   --codebook book.gcdc --input blocks.gcdm --out words.gcdw
    gcdcode decode   --codebook book.gcdc --input words.gcdw --side blocks.gcdm --decoder 0 --out out.gcdm
    gcdcode analyze  --config run.cfg --n 4,8,12 --rate-grid 0.6,0.8,1 --out report.csv
    gcdcode simulate --config run.cfg --trials 100000 --seed 7 --out sim.csv

Exit status is 0 on success, 1 for a configuration or usage error and 2 for
a runtime error (bad files, version mismatch, enumeration cap).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from fractions import Fraction

from . import __version__
from .analysis import BOUND_NAMES, full_report
from .codec import FF, FV, Codebook, decode_ff, decode_fv, encode_ff, encode_fv
from .config import RunConfig, load_config, parse_fraction
from .errors import ConfigError, GCDError
from .formats import (
    read_codebook,
    read_codewords,
    read_messages,
    write_codebook,
    write_codewords,
    write_messages,
)
from .network import rf_rate, rv_rate
from .simulate import simulate, wilson_interval
from .typekit import merge, project, type_count

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _int_list(text: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _rate_list(text: str):
    try:
        return sorted(parse_fraction(t) for t in text.split(",") if t.strip())
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _write_csv(rows, header, out) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)


def _config(args) -> RunConfig:
    if args.config is None:
        raise ConfigError("--config is required")
    cfg = load_config(args.config)
    return cfg.with_overrides(
        n_grid=getattr(args, "n", None),
        rate_grid=getattr(args, "rate_grid", None),
        mode=getattr(args, "mode", None),
        coloring=getattr(args, "coloring", None),
        seed=getattr(args, "seed", None),
        trials=getattr(args, "trials", None),
    )


def _check_cap(cfg: RunConfig) -> None:
    k = cfg.alphabet.joint_size
    for n in cfg.n_grid:
        count = type_count(n, k)
        if count > cfg.cap:
            raise ConfigError(
                f"n={n} has {count} joint types, over the enumeration cap {cfg.cap}; "
                "lower n or raise 'cap' in the config",
                field="n",
            )


def _codebook_for(cfg: RunConfig, n: int, R) -> Codebook:
    return Codebook(n, cfg.net, cfg.alphabet, cfg.mode, cfg.coloring_mode(), R if cfg.mode == FF else None, cfg.cap)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_rate(args) -> int:
    cfg = _config(args)
    P = cfg.require_distribution()
    print(f"R_f = {rf_rate(P, cfg.net):.6f}")
    print(f"R_v = {rv_rate(P, cfg.net):.6f}")
    return EXIT_OK


def cmd_build(args) -> int:
    cfg = _config(args)
    n = cfg.n
    R = cfg.rate if cfg.mode == FF else None
    _check_cap(cfg)
    if args.out is None:
        raise ConfigError("--out is required for build")
    cb = _codebook_for(cfg, n, R)
    with open(args.out, "wb") as f:
        write_codebook(cb, f)
    summary = f"built {cfg.mode} codebook: n={n}, {len(cb.types)} types"
    if cfg.mode == FF:
        summary += f", M={cb.M}, rate={cb.rate:.6f}"
    print(summary, file=sys.stderr)
    return EXIT_OK


def _load_codebook(path) -> Codebook:
    with open(path, "rb") as f:
        return read_codebook(f)


def cmd_encode(args) -> int:
    if args.codebook is None or args.input is None or args.out is None:
        raise ConfigError("encode needs --codebook, --input and --out")
    cb = _load_codebook(args.codebook)
    with open(args.input, "rb") as f:
        n, ns, blocks = read_messages(f)
    if n != cb.n or ns != cb.alphabet.n_sources:
        raise GCDError(f"message blocks are n={n} with {ns} sources, codebook expects n={cb.n} with {cb.alphabet.n_sources}")
    if cb.mode == FF:
        words = [encode_ff(cb, x) for x in blocks]
        declared = sum(w.declared_error for w in words)
    else:
        words = [encode_fv(cb, x) for x in blocks]
        declared = 0
    with open(args.out, "wb") as f:
        write_codewords(cb.mode, words, f)
    print(f"encoded {len(words)} blocks, declared_errors={declared}", file=sys.stderr)
    return EXIT_OK


def cmd_decode(args) -> int:
    if None in (args.codebook, args.input, args.side, args.out):
        raise ConfigError("decode needs --codebook, --input, --side and --out")
    cb = _load_codebook(args.codebook)
    j = args.decoder
    if not 0 <= j < cb.net.n_decoders:
        raise ConfigError(f"decoder index {j} outside 0..{cb.net.n_decoders - 1}", field="decoder")
    with open(args.input, "rb") as f:
        mode, words = read_codewords(f)
    with open(args.side, "rb") as f:
        n, ns, sides = read_messages(f)
    if mode != cb.mode:
        raise GCDError(f"codewords are {mode}, codebook is {cb.mode}")
    if n != cb.n or ns != cb.alphabet.n_sources or len(sides) != len(words):
        raise GCDError("side-information file does not match the codeword file")
    demand = cb.net.demand(j)
    comp = cb.net.complement(j)
    out = []
    declared = 0
    for w, full in zip(words, sides):
        side = project(full, comp)
        if mode == FF:
            got = decode_ff(cb, j, w, side)
            declared += got.declared_error
            symbols = got.symbols
        else:
            symbols = decode_fv(cb, j, w, side)
        out.append(merge(symbols, demand, side, comp))
    with open(args.out, "wb") as f:
        write_messages(out, n, ns, f)
    print(f"decoded {len(out)} blocks at decoder {j}, declared_errors={declared}", file=sys.stderr)
    return EXIT_OK


ANALYZE_HEADER = (
    ["n", "R", "code_rate", "rf", "exact_error", "exact_correct", "exponent"]
    + [name for name in BOUND_NAMES]
    + [f"{name}_vacuous" for name in BOUND_NAMES]
    + ["expected_length_per_symbol", "overflow_exact", "underflow_exact"]
)


def cmd_analyze(args) -> int:
    cfg = _config(args)
    P = cfg.require_distribution()
    _check_cap(cfg)
    rows = []
    for n in sorted(cfg.n_grid):
        for R in sorted(cfg.rate_grid):
            rep = full_report(P, n, R, cfg.net, cfg.alphabet, cfg.coloring_mode(), cfg.cap)
            rows.append(
                [n, R, rep.code_rate, rep.rf, rep.exact_error, rep.exact_correct, rep.exponent]
                + [rep.bounds[k] for k in BOUND_NAMES]
                + [rep.vacuous[k] for k in BOUND_NAMES]
                + [rep.fv_stats[k] for k in ("expected_length_per_symbol", "overflow_exact", "underflow_exact")]
            )
    _write_csv(rows, ANALYZE_HEADER, args.out)
    return EXIT_OK


def simulate_header(n_decoders: int) -> list:
    return (
        ["n", "R", "mode", "coloring", "seed", "trials", "declared_errors", "error_rate",
         "ci_low", "ci_high", "exact_error"]
        + [f"mismatches_{j}" for j in range(n_decoders)]
        + [f"mismatch_rate_{j}" for j in range(n_decoders)]
    )


def cmd_simulate(args) -> int:
    from .analysis import exact_error_prob

    cfg = _config(args)
    P = cfg.require_distribution()
    if cfg.trials < 1:
        raise ConfigError("simulate needs trials >= 1", field="trials")
    if not cfg.n_grid:
        raise ConfigError("simulate needs a block length", field="n")
    if cfg.mode == FF and not cfg.rate_grid:
        raise ConfigError("FF simulation needs a rate", field="rate")
    _check_cap(cfg)
    rates = cfg.rate_grid if cfg.mode == FF else [None]
    rows = []
    for n in sorted(cfg.n_grid):
        for R in rates:
            cb = _codebook_for(cfg, n, R)
            tally = simulate(cb, P, cfg.trials, cfg.seed, args.workers)
            exact = exact_error_prob(P, n, R, cfg.net, cfg.alphabet, cfg.cap) if cfg.mode == FF else 0.0
            lo, hi = wilson_interval(tally.declared, tally.trials)
            rows.append(
                [n, "" if R is None else R, cfg.mode, cb.coloring_mode, cfg.seed, tally.trials,
                 tally.declared, tally.declared / tally.trials, lo, hi, exact]
                + tally.mismatches
                + [m / tally.trials for m in tally.mismatches]
            )
    _write_csv(rows, simulate_header(cfg.net.n_decoders), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcdcode", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, grid=True):
        p.add_argument("--config", metavar="PATH")
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--mode", choices=(FF, FV))
        p.add_argument("--coloring", choices=("greedy", "bipartite"))
        if grid:
            p.add_argument("--n", type=_int_list, metavar="N[,N...]")
            p.add_argument("--rate-grid", type=_rate_list, metavar="R[,R...]")

    p = sub.add_parser("rate", help="print the optimal FF and FV rates")
    p.add_argument("--config", metavar="PATH")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("build", help="build a codebook file")
    common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("encode", help="encode a message file")
    p.add_argument("--codebook", metavar="PATH")
    p.add_argument("--input", metavar="PATH")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a codeword file at one decoder")
    p.add_argument("--codebook", metavar="PATH")
    p.add_argument("--input", metavar="PATH")
    p.add_argument("--side", metavar="PATH", help="message file holding the side information")
    p.add_argument("--decoder", type=int, default=0)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("analyze", help="exact probabilities and bounds as CSV")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="seeded Monte Carlo as CSV")
    common(p)
    p.add_argument("--seed", type=_u64)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"gcdcode: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GCDError, OSError, ValueError, KeyError) as exc:
        print(f"gcdcode: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
