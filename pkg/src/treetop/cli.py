"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 computation refused (budget, certification unavailable, M == m, ...).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, core, counting, oracle, recode
from .errors import (
    BudgetExceeded,
    CertificationUnavailable,
    ConvergenceError,
    DomainError,
    NotApplicable,
    ParseError,
)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3
LOG_BASES = {"e": None, "2": 2.0, "10": 10.0}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _canon(obj):
    """Round floats to 12 significant digits; non-finite floats become null."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(format(x, ".12g")) if math.isfinite(x) else None
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_canon(obj), indent=2, allow_nan=False) + "\n"


def _emit(args, payload: dict, text_lines=None) -> None:
    if getattr(args, "format", "json") == "text" and text_lines is not None:
        sys.stdout.write("\n".join(text_lines) + "\n")
    else:
        sys.stdout.write(dumps(payload))


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    return core.parse_matrix(text)


def _load_integer(path: str) -> np.ndarray:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    return core.parse_integer_matrix(text)


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.12g}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_entropy(args) -> int:
    A, tp = _load(args.matrix)
    rep = counting.entropy_report(A, tp.d, args.depth, eps=args.eps)
    payload = rep.to_dict(LOG_BASES[args.log_base])
    lines = [
        f"k={rep.k} d={rep.d} M={rep.M} m={rep.m} rho={_fmt(rep.rho)}",
        f"line entropy        {_fmt(payload['line_entropy'])}",
        f"tree upper bound    {_fmt(payload['upper_bound'])}",
        f"tree lower (Perron) {_fmt(payload['lower_bound_perron'])}",
        f"tree lower (cert.)  {_fmt(payload['lower_bound_certified'])}",
        f"verdict             {rep.verdict}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_analyze(args) -> int:
    A, tp = _load(args.matrix)
    d = tp.d
    rep = counting.entropy_report(A, d, args.depth)
    Ae, removed = core.essential_reduce(A)
    dec = core.strongly_connected_components(A)
    payload = {
        "report": rep.to_dict(LOG_BASES[args.log_base]),
        "essential_removed": [i + 1 for i in removed],
        "components": [[i + 1 for i in c] for c in dec.components],
        "irreducible": core.is_irreducible(A),
        "equality_verdict": analysis.equality_verdict(Ae, d) if not Ae.is_empty else "not_applicable",
    }
    gap = analysis.entropy_gap_classify(A, d)
    payload["entropy_gap"] = {"case": gap.case, "bound": gap.bound, "M": gap.M}
    if not Ae.is_empty and not core.is_irreducible(Ae):
        payload["component_comparison"] = analysis.component_comparison(A, d, args.depth).to_dict()
    if rep.verdict == "strictly_greater":
        eps = args.eps if args.eps is not None else analysis.default_eps(A, d)
        try:
            cert = analysis.certified_lower_bound(A, d, eps, max(args.depth, 20))
            payload["certificate"] = cert.to_dict()
        except CertificationUnavailable as exc:
            payload["certificate"] = None
            payload["certificate_refusal"] = str(exc)
    _emit(args, payload)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    A, tp = _load(args.matrix)
    res = oracle.enumerate_tree_blocks(
        A, tp.d, args.depth, limit=args.limit, budget=args.budget, method=args.method
    )
    payload = {
        "d": tp.d,
        "n": args.depth,
        "method": res.method,
        "count": res.count,
        "subtotals": dict(zip(A.labels, res.subtotals)),
        "sample": [b.as_mapping(A.labels) for b in res.sample],
    }
    _emit(args, payload, [f"|B_{args.depth}| = {res.count}"])
    return EXIT_OK


def _parse_word(tok: str) -> tuple[int, ...]:
    tok = tok.strip()
    if " " in tok or "." in tok:
        parts = tok.replace(".", " ").split()
        return tuple(int(p) for p in parts)
    return tuple(int(ch) for ch in tok)


def cmd_recode(args) -> int:
    if args.matrix:
        if args.forbidden is not None:
            raise UsageError("give either a matrix file or --forbidden, not both")
        A, tp = _load(args.matrix)
        hb = recode.higher_block_markov(A, args.m)
        d = tp.d
        src_labels = A.labels
    else:
        if args.forbidden is None or args.alphabet is None:
            raise UsageError("recode needs a matrix file or --alphabet with --forbidden")
        try:
            words = [_parse_word(w) for w in args.forbidden.split(",") if w.strip()]
        except ValueError:
            raise UsageError(f"bad --forbidden list {args.forbidden!r}") from None
        hb = recode.forbidden_words_to_markov(args.alphabet, words)
        d = args.d
        src_labels = None
    if hb.empty:
        sys.stderr.write("recoded shift is empty\n")
        return EXIT_REFUSED
    comments = [f"higher block recoding, m={hb.m}, index label <- source word"]
    comments += hb.comment_lines(src_labels)
    sys.stdout.write(core.format_matrix(hb.matrix, d, comments))
    return EXIT_OK


def cmd_gapset(args) -> int:
    A, tp = _load(args.matrix)
    eps = args.eps if args.eps is not None else analysis.default_eps(A, tp.d)
    gs = analysis.gap_set(A, tp.d, eps, args.depth)
    _emit(args, gs.to_dict(), [f"N={gs.N} windows_ok={gs.windows_ok} S={list(gs.S)}"])
    return EXIT_OK


def cmd_certify(args) -> int:
    A, tp = _load(args.matrix)
    eps = args.eps if args.eps is not None else analysis.default_eps(A, tp.d)
    cert = analysis.certified_lower_bound(A, tp.d, eps, args.depth)
    _emit(args, cert.to_dict(), [f"h(T_A) >= {cert.lower_bound:.12g} (margin {cert.margin:.3e})"])
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_checks

    A, tp = _load(args.matrix)
    checks = run_checks(A, tp.d, args.depth, include_random=args.all, seed=args.seed,
                        budget=args.budget)
    passed = all(c.passed for c in checks)
    payload = {
        "passed": passed,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
    }
    lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in checks]
    _emit(args, payload, lines)
    if not passed:
        first = next(c for c in checks if not c.passed)
        sys.stderr.write(f"first failure: {first.name}: {first.detail}\n")
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_sse_check(args) -> int:
    A, _ = _load(args.A)
    B, _ = _load(args.B)
    R = _load_integer(args.R)
    S = _load_integer(args.S)
    valid = recode.sse_witness_check(A, B, recode.SSEWitness(R, S))
    rho_a = core.spectral_data(core.essential_reduce(A)[0]).rho
    rho_b = core.spectral_data(core.essential_reduce(B)[0]).rho
    payload = {"valid": valid, "rho_A": rho_a, "rho_B": rho_b}
    _emit(args, payload, [f"valid={valid} rho_A={rho_a:.12g} rho_B={rho_b:.12g}"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treetop", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, depth_default=6):
        sp.add_argument("--depth", type=_positive_int, default=depth_default)
        sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = sub.add_parser("entropy", help="entropy bracket and verdict")
    sp.add_argument("matrix")
    common(sp)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--log-base", choices=tuple(LOG_BASES), default="e")
    sp.set_defaults(func=cmd_entropy)

    sp = sub.add_parser("analyze", help="full analysis of one matrix")
    sp.add_argument("matrix")
    common(sp)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--log-base", choices=tuple(LOG_BASES), default="e")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("enumerate", help="brute-force tree-block count")
    sp.add_argument("matrix")
    common(sp, depth_default=2)
    sp.add_argument("--limit", type=int, default=0, help="number of sample blocks to print")
    sp.add_argument("--method", choices=("exhaustive", "dp"), default="exhaustive")
    sp.add_argument("--budget", type=int, help=f"candidate labelings (env {oracle.BUDGET_ENV})")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("recode", help="higher block or forbidden-word recoding")
    sp.add_argument("matrix", nargs="?")
    sp.add_argument("--m", type=_positive_int, default=2)
    sp.add_argument("--alphabet", type=_positive_int)
    sp.add_argument("--forbidden", help="comma separated words, e.g. 000,011")
    sp.add_argument("--d", type=int, default=2, help="arity written to the header with --forbidden")
    sp.set_defaults(func=cmd_recode)

    sp = sub.add_parser("gapset", help="gap set S(eps) and window check")
    sp.add_argument("matrix")
    common(sp, depth_default=20)
    sp.add_argument("--eps", type=float)
    sp.set_defaults(func=cmd_gapset)

    sp = sub.add_parser("certify", help="certified lower bound for h(T_A)")
    sp.add_argument("matrix")
    common(sp, depth_default=20)
    sp.add_argument("--eps", type=float)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("verify", help="run the consistency checks applicable to a matrix")
    sp.add_argument("matrix")
    common(sp, depth_default=3)
    sp.add_argument("--all", action="store_true", help="also run randomized property suites")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sse-check", help="check a strong shift equivalence witness")
    for name in ("A", "B", "R", "S"):
        sp.add_argument(name)
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.set_defaults(func=cmd_sse_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, UsageError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (NotApplicable, BudgetExceeded, CertificationUnavailable, ConvergenceError) as exc:
        sys.stderr.write(f"refused: {exc}\n")
        return EXIT_REFUSED
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
