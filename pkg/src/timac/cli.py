"""Batch command-line front end.

Commands: states (catalog listing / DOT export), simulate (end-to-end
experiment), bound / report (converse vs achievable), verify (rank-oracle
check of a linear scheme over random draws).

Exit codes: 0 clean, 1 configuration/input error, 2 run completed but
decoding failures were observed.  JSON output is byte-identical for
identical command lines (sorted keys, fixed indentation, one trailing
newline).  Rationals print as "p/q" strings; --float adds decimal
convenience columns without replacing the exact values.
"""

from __future__ import annotations

import argparse
import os
import random
import sys

from . import __version__
from .bounds import gap_report, upper_bound
from .coding import (
    BUILTIN_SCHEMES,
    ChannelDraw,
    SchemeFormatError,
    builtin_scheme,
    scheme_from_json,
    verify_decodable,
)
from .galois import NotPrimeError, field_new
from .simulate import ConfigError, SimulationConfig, run
from .topology import (
    RX_INDICES,
    STATE_ORDER,
    DistributionError,
    StateDistribution,
    UnknownStateError,
    all_states,
    lookup,
    silent_candidates,
    to_dot,
)


class CliError(Exception):
    """Bad flags or bad input files; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; here 2 is reserved for
    # observed decoding failures, so usage errors are rerouted to CliError.
    def error(self, message):
        raise CliError(message)


def _default_seed() -> int:
    raw = os.environ.get("TIMAC_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"TIMAC_SEED must be an integer, got {raw!r}") from None


def _build_parser() -> _Parser:
    parser = _Parser(prog="timac", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"timac {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("states", help="list the 27-state catalog")
    p.add_argument("--name", help="show a single state")
    p.add_argument("--format", choices=("text", "dot", "json"), default="text")
    p.add_argument("--out", help="write output to a file instead of stdout")

    p = sub.add_parser("simulate", help="run an end-to-end experiment")
    _add_dist_flags(p)
    span = p.add_mutually_exclusive_group()
    span.add_argument("--rounds", type=int, help="exact rounds of the distribution")
    span.add_argument("--n-uses", type=int, help="i.i.d. sampled channel uses")
    p.add_argument("--mode", choices=("joint", "separate"), default="joint")
    p.add_argument("--q", type=int, default=257, help="field modulus (prime)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--float", action="store_true", dest="float_column")
    p.add_argument("--out", help="write output to a file instead of stdout")

    for name, blurb in (
        ("bound", "print the DoF upper bound for a distribution"),
        ("report", "compare upper bound against both achievable modes"),
    ):
        p = sub.add_parser(name, help=blurb)
        _add_dist_flags(p)
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--float", action="store_true", dest="float_column")
        p.add_argument("--out", help="write output to a file instead of stdout")

    p = sub.add_parser("verify", help="rank-oracle a linear scheme over random draws")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--builtin", choices=BUILTIN_SCHEMES)
    source.add_argument("--scheme", help="path to a LinearScheme JSON file")
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--q", type=int, default=None, help="field modulus (builtins)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="write output to a file instead of stdout")
    return parser


def _add_dist_flags(p: _Parser):
    group = p.add_mutually_exclusive_group()
    group.add_argument("--uniform", action="store_true",
                       help="equiprobable states (default)")
    group.add_argument("--dist", help="path to a distribution JSON file")


def _load_dist(args) -> StateDistribution:
    if getattr(args, "dist", None):
        try:
            return StateDistribution.from_file(args.dist)
        except OSError as exc:
            raise CliError(f"cannot read {args.dist}: {exc.strerror}") from exc
    return StateDistribution.uniform()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt_rational(x, float_column: bool) -> str:
    return f"{x} ({float(x):.6g})" if float_column else str(x)


def _cmd_states(args) -> int:
    if args.format == "dot":
        if not args.name:
            raise CliError("--format dot needs --name")
        _emit(to_dot(args.name), args.out)
        return 0
    names = [args.name] if args.name else list(STATE_ORDER)
    if args.name:
        lookup(args.name)
    if args.format == "json":
        import json

        states = {n: list(lookup(n).interferers) for n in names}
        _emit(json.dumps({"states": states}, indent=2, sort_keys=True) + "\n", args.out)
        return 0
    lines = [f"{'state':<6}{'Rx1<-':<7}{'Rx2<-':<7}{'Rx3<-':<7}silence"]
    for n in names:
        st = lookup(n)
        cells = [
            f"Tx{st.interferer(rx)}" if st.interferer(rx) else "-"
            for rx in RX_INDICES
        ]
        quiet = ",".join(str(t) for t in sorted(silent_candidates(n))) or "-"
        lines.append(f"{n:<6}{cells[0]:<7}{cells[1]:<7}{cells[2]:<7}{quiet}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_simulate(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    rounds = args.rounds
    n_uses = args.n_uses
    if rounds is None and n_uses is None:
        rounds = 1
    cfg = SimulationConfig(
        distribution=_load_dist(args),
        mode=args.mode,
        q=args.q,
        seed=seed,
        rounds=rounds,
        n_uses=n_uses,
    )
    report = run(cfg, workers=args.workers)
    if args.format == "json":
        text = report.to_json(float_column=args.float_column)
    elif args.format == "csv":
        text = report.to_csv()
    else:
        text = "\n".join(
            [
                f"uses              {report.uses}",
                f"symbols_delivered {report.symbols_delivered}",
                f"failures          {report.failures}",
                f"exact_dof         {_fmt_rational(report.exact_dof, args.float_column)}",
                f"empirical_dof     {_fmt_rational(report.empirical_dof, args.float_column)}",
            ]
        ) + "\n"
    _emit(text, args.out)
    return 2 if report.failures else 0


def _cmd_bound(args) -> int:
    d = _load_dist(args)
    value = upper_bound(d)
    if args.format == "json":
        import json

        obj = {"upper": str(value)}
        if args.float_column:
            obj["upper_float"] = float(value)
        text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    else:
        text = f"upper_bound = {_fmt_rational(value, args.float_column)}\n"
    _emit(text, args.out)
    return 0


def _cmd_report(args) -> int:
    rep = gap_report(_load_dist(args))
    if args.format == "json":
        text = rep.to_json(float_column=args.float_column)
    else:
        text = "\n".join(
            [
                f"upper               {_fmt_rational(rep.upper, args.float_column)}",
                f"achievable_joint    {_fmt_rational(rep.achievable_joint, args.float_column)}",
                f"achievable_separate {_fmt_rational(rep.achievable_separate, args.float_column)}",
                f"tight               {'yes' if rep.tight else 'no'}",
            ]
        ) + "\n"
    _emit(text, args.out)
    return 0


def _cmd_verify(args) -> int:
    if args.draws <= 0:
        raise CliError("--draws must be positive")
    seed = args.seed if args.seed is not None else _default_seed()
    if args.builtin:
        field = field_new(args.q if args.q is not None else 257)
        scheme = builtin_scheme(args.builtin, field)
    else:
        try:
            with open(args.scheme, "r", encoding="utf-8") as fh:
                scheme = scheme_from_json(fh.read())
        except OSError as exc:
            raise CliError(f"cannot read {args.scheme}: {exc.strerror}") from exc
        if args.q is not None and args.q != scheme.field.q:
            raise CliError(
                f"--q {args.q} conflicts with the scheme's q={scheme.field.q}"
            )
    rng = random.Random(seed)
    per_rx = [0, 0, 0]
    all_ok = 0
    for _ in range(args.draws):
        draw = ChannelDraw.random(scheme.field, scheme.states, rng)
        flags = verify_decodable(scheme, draw)
        for idx, flag in enumerate(flags):
            per_rx[idx] += flag
        all_ok += all(flags)
    if args.format == "json":
        import json

        text = json.dumps(
            {"draws": args.draws, "per_rx": per_rx, "all_ok": all_ok},
            indent=2,
            sort_keys=True,
        ) + "\n"
    else:
        rows = "  ".join(
            f"Rx{j}: {per_rx[j - 1]}/{args.draws}" for j in (1, 2, 3)
        )
        text = f"{rows}  all: {all_ok}/{args.draws}\n"
    _emit(text, args.out)
    return 0 if all_ok == args.draws else 2


_HANDLERS = {
    "states": _cmd_states,
    "simulate": _cmd_simulate,
    "bound": _cmd_bound,
    "report": _cmd_report,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        ConfigError,
        DistributionError,
        SchemeFormatError,
        UnknownStateError,
        NotPrimeError,
    ) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1


def entrypoint():
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
