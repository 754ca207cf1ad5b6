"""Command-line driver: ``chromsplit <command> ...``.

Exit status is 0 on success, 1 when a computation disagrees with its
expected output, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Sequence

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would call sys.exit here
        raise UsageError(f"{self.prog}: {message}")


def parse_range(text: str) -> range:
    """``-4:8`` (inclusive) or a single integer."""
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            return range(int(lo), int(hi) + 1)
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or lo:hi, got {text!r}") from None
    return range(n, n + 1)


def parse_level(text: str) -> int | None:
    if text.lower() in ("z2", "integral", "inf"):
        return None
    try:
        level = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"level must be a positive integer or z2, got {text!r}") from None
    if level < 1:
        raise argparse.ArgumentTypeError("level must be at least 1")
    return level


# ---------------------------------------------------------------------------
# Commands


def cmd_height1(args) -> int:
    from .height1 import format_tsv, table_rows

    sys.stdout.write(format_tsv(table_rows(args.t, args.smax, args.level)))
    return EXIT_OK


def cmd_adss(args) -> int:
    from .duality import adss_run

    r = adss_run(args.coefficients, args.depth)
    print(f"# ADSS, {r.coefficients} coefficients, resolution depth {args.depth}")
    print(f"# {r.collapse}")
    for d in r.degrees:
        print(f"H^{d.n} = {d.group}\t{d}")
    if args.ledger:
        print(json.dumps([e.to_dict() for e in r.ledger], indent=1))
    return EXIT_OK


def cmd_tdss(args) -> int:
    from .duality import galois_descend, tdss_run

    r = tdss_run()
    for n in sorted(r.stems):
        print(f"pi_{n} = {r.group(n)}\t" + " + ".join(str(s) for s in r.stems[n]))
    for a, b in r.twice.items():
        print(f"2 * ({a}) = {b}")
    print(f"Galois descent of pi_0: {galois_descend(r.group(0))}")
    if args.ledger:
        print(json.dumps([e.to_dict() for e in r.ledger], indent=1))
    return EXIT_OK


def cmd_sseq(args) -> int:
    from .sseq import run_scenario

    run = run_scenario(args.scenario)
    if args.json:
        print(json.dumps(run.ledger, indent=1))
    else:
        for e in run.ledger:
            cell = "" if e["cell"] is None else f" at {tuple(e['cell'])}"
            print(f"E{e['page']}{cell} {e['class']}: {e['event']}, {e['justification']}")
        if run.collapse is not None:
            print(f"collapse: {bool(run.collapse)} ({'; '.join(run.collapse.reasons)})")
        if run.window is not None:
            print(run.window)
        if run.ahss is not None:
            print(f"cellular count 2^{run.ahss.log_order}; wedge side {run.ahss.wedge}")
    for m in run.mismatches:
        print(f"MISMATCH {m}", file=sys.stderr)
    return EXIT_OK if run.ok else EXIT_MISMATCH


def cmd_quaternion(args) -> int:
    from .quaternion import verify

    res = verify()
    for k, v in res.items():
        print(f"{'PASS' if v else 'FAIL'} {k}")
    return EXIT_OK if all(res.values()) else EXIT_MISMATCH


def _les_moore() -> str:
    from .les import hg21_window, smash_moore

    return str(smash_moore(hg21_window()))


def _les_moore_moore() -> str:
    from .les import moore_window, smash_moore

    return str(smash_moore(moore_window()))


def _les_fiber() -> str:
    from .les import pi_minus_three

    return str(pi_minus_three())


def _les_twist() -> str:
    from .les import twist_case_analysis

    a = twist_case_analysis()
    lines = [f"y1 = {a.y1}; engine: Z/2^{a.engine_order}{{{a.engine_class}}}, twice {a.engine_twice}"]
    lines += [f"  {c.label}: boundary order 2^{c.boundary_order}, consistent {c.consistent}" for c in a.cases]
    lines.append(f"resolution: {a.resolution}")
    return "\n".join(lines)


def _les_splitting() -> str:
    from .les import splitting_summary

    return str(splitting_summary())


LES_PIPELINES: dict[str, Callable[[], str]] = {
    "moore": _les_moore,
    "moore-moore": _les_moore_moore,
    "fiber": _les_fiber,
    "twist": _les_twist,
    "splitting": _les_splitting,
}


def cmd_les(args) -> int:
    print(LES_PIPELINES[args.pipeline]())
    return EXIT_OK


def scenario_charts(name: str):
    from .charts import e4_chart, integral_chart
    from .sseq import run_scenario

    run = run_scenario(name)
    sc = run.scenario
    stems = (sc.stem_range.start, sc.stem_range.stop - 1)
    if run.integral is not None:
        return [integral_chart(run.integral.e2, f"{sc.name}: E2", stems, sc.smax),
                integral_chart(run.integral.e4, f"{sc.name}: E4", stems, sc.smax)]
    if run.ss is None:
        raise UsageError(f"scenario {name} has no spectral sequence page to chart")
    return [e4_chart(run, f"{sc.name}: E2 with d3", stems, sc.smax, page=3),
            e4_chart(run, f"{sc.name}: E4", stems, sc.smax)]


def cmd_chart(args) -> int:
    from .charts import FIGURES, render_charts, render_svg

    charts = FIGURES[args.input]() if args.input in FIGURES else scenario_charts(args.input)
    if args.panel is not None:
        if not 1 <= args.panel <= len(charts):
            raise UsageError(f"panel must be between 1 and {len(charts)}")
        charts = [charts[args.panel - 1]]
    if args.format == "ascii":
        sys.stdout.write(render_charts(charts))
    elif len(charts) == 1:
        sys.stdout.write(render_svg(charts[0]))
    else:
        raise UsageError(f"{args.input} has {len(charts)} panels; choose one with --panel for SVG output")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import CRITERIA, run_check, verify_all

    if args.which == "all":
        results = verify_all()
    else:
        try:
            number = int(args.which)
        except ValueError:
            raise UsageError(f"verify takes 'all' or a criterion number, got {args.which!r}") from None
        if not 1 <= number <= len(CRITERIA):
            raise UsageError(f"criterion numbers run from 1 to {len(CRITERIA)}")
        results = [run_check(number)]
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.ok for r in results) else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    from .sseq import SCENARIO_NAMES

    p = _Parser(prog="chromsplit", description="Chromatic splitting computations at p = 2.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    h = sub.add_parser("height1", help="continuous cohomology of Z2^x with 2-adic coefficients (TSV)")
    h.add_argument("--t", type=parse_range, required=True, help="internal degree or range lo:hi")
    h.add_argument("--smax", type=int, default=4)
    h.add_argument("--level", type=parse_level, default=None, help="coefficients Z/2^j, or z2 (default)")
    h.set_defaults(fn=cmd_height1)

    a = sub.add_parser("adss", help="algebraic duality spectral sequence for S2^1")
    a.add_argument("--coefficients", choices=("f2", "z2"), required=True)
    a.add_argument("--depth", type=int, default=8)
    a.add_argument("--ledger", action="store_true", help="also dump the ledger as JSON")
    a.set_defaults(fn=cmd_adss)

    t = sub.add_parser("tdss", help="topological duality spectral sequence, stems -3..0")
    t.add_argument("--ledger", action="store_true")
    t.set_defaults(fn=cmd_tdss)

    s = sub.add_parser("sseq", help="run a scenario through the spectral sequence engine")
    s_sub = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    run = s_sub.add_parser("run")
    run.add_argument("scenario", help=f"a JSON file or one of: {', '.join(SCENARIO_NAMES)}")
    run.add_argument("--json", action="store_true", help="print the ledger as JSON")
    run.set_defaults(fn=cmd_sseq)

    q = sub.add_parser("quaternion", help="identities for the quaternion action on E2")
    q.add_argument("action", choices=("verify",))
    q.set_defaults(fn=cmd_quaternion)

    l_ = sub.add_parser("les", help="long exact sequence pipelines")
    l_.add_argument("pipeline", choices=tuple(LES_PIPELINES))
    l_.set_defaults(fn=cmd_les)

    c = sub.add_parser("chart", help="render a figure (fig1..fig5) or a scenario")
    c.add_argument("input")
    c.add_argument("--format", choices=("ascii", "svg"), default="ascii")
    c.add_argument("--panel", type=int, default=None, help="1-based panel index")
    c.set_defaults(fn=cmd_chart)

    v = sub.add_parser("verify", help="the acceptance regression suite")
    v.add_argument("which", help="'all' or a criterion number")
    v.set_defaults(fn=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    from .errors import IntegrityError, UndeterminedError

    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # a range such as -4:8 would otherwise be mistaken for an option
    for i in range(len(argv) - 1):
        if argv[i] == "--t" and argv[i + 1].startswith("-"):
            argv[i:i + 2] = [f"--t={argv[i + 1]}", ""]
    argv = [a for a in argv if a != ""]
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"chromsplit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrityError, UndeterminedError) as exc:
        print(f"chromsplit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
