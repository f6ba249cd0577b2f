"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resonance.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .contact import WeightMismatchError, contact_bracket, lie_derivative
from .operators import ZeroOperatorError, to_json as op_to_json
from .parsing import ParseError, parse_operator, parse_scalar, parse_superfunction
from .quantization import ORDERS2, OrderError, quantize, symbol_map
from .scalars import LAM, MU, ResonanceError, factored_str, scalar_str
from .solver import UNIQUE, derive, solve_values
from .superfunctions import ParityError, to_json as sf_to_json
from .symbols import Symbol
from . import verification

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESONANCE = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def parse_order(text: str) -> int:
    """'3/2' -> 3 (doubled contact order)."""
    try:
        k = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"invalid order {text!r}") from None
    k2 = k * 2
    if k2.denominator != 1 or k2 < 0:
        raise UsageError(f"order {text} is not a nonnegative half-integer")
    return int(k2)


def _weight(text, default):
    return default if text is None else parse_scalar(text)


def _emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def combine_branches(even, odd) -> str:
    """One expression in the parity sign s for a coefficient's two branch values."""
    e, o = factored_str(even), factored_str(odd)
    if even == odd:
        return e
    if even == -odd:
        sign = ""
        if e.startswith("-"):
            sign, e = "-", e[1:]
        if e.startswith("1/"):
            return f"{sign}s{e[1:]}"
        return f"{sign}s*{e}"
    return f"({e} if s=1, {o} if s=-1)"


def group_tags(values: dict) -> list:
    """Merge tags with identical text: ['C11 = C12 = expr', ...] in first-seen order."""
    groups: dict = {}
    for tag, text in values.items():
        groups.setdefault(text, []).append(tag)
    return [" = ".join(tags + [text]) for text, tags in groups.items()]


# commands ----------------------------------------------------------------

def cmd_bracket(args):
    f, g = parse_superfunction(args.f), parse_superfunction(args.g)
    h = contact_bracket(f, g)
    _emit(args, {"result": str(h), "components": sf_to_json(h)}, str(h))
    return EXIT_OK


def cmd_apply(args):
    f = parse_superfunction(args.hamiltonian)
    w = parse_scalar(args.weight)
    g = parse_superfunction(args.density)
    h = lie_derivative(f, w, g)
    _emit(args, {"result": str(h), "weight": scalar_str(w), "components": sf_to_json(h)}, str(h))
    return EXIT_OK


def cmd_quantize(args):
    k2 = parse_order(args.order)
    if k2 not in (0,) + ORDERS2:
        raise UsageError(f"no closed-form quantization at order {args.order}; use 0, 1/2, 1, 3/2 or 2")
    lam, mu = _weight(args.lam, LAM), _weight(args.mu, MU)
    F1, F2 = parse_superfunction(args.F1), parse_superfunction(args.F2)
    if k2 == 0 and F2:
        raise UsageError("order 0 symbols have a single component; pass 0 as F2")
    want = 0 if args.parity == "even" else 1
    for F in (F1, F2):
        if F and (not F.is_homogeneous() or F.parity() != want):
            raise UsageError(f"component {F} is not {args.parity}")
    A = quantize(Symbol(F1, F2, k2, lam, mu))
    _emit(args, {"operator": str(A), **op_to_json(A)}, str(A))
    return EXIT_OK


def cmd_symbol(args):
    lam, mu = _weight(args.lam, LAM), _weight(args.mu, MU)
    A = parse_operator(args.operator, lam, mu)
    symbols = symbol_map(A)
    lines = [f"k={Fraction(k2, 2)}: ({S.F1}, {S.F2})" for k2, S in enumerate(symbols) if S]
    payload = {"symbols": [S.to_json() for S in symbols]}
    _emit(args, payload, "\n".join(lines) if lines else "0")
    return EXIT_OK


def cmd_derive(args):
    k2 = parse_order(args.order)
    if k2 == 0:
        raise UsageError("order 0 has no unknown coefficients")
    if args.family == "symmetric" and k2 not in ORDERS2:
        raise UsageError(f"order {args.order} needs --family full (experimental above 2)")
    parities = {"even": (1,), "odd": (-1,), "both": (1, -1)}[args.parity]
    k = Fraction(k2, 2)
    reports = {s: derive(k, s, family=args.family, bound=args.bound) for s in parities}
    payload = {"order": str(k), "branches": {}}
    lines = []
    for s, rep in reports.items():
        label = "even" if s > 0 else "odd"
        payload["branches"][label] = rep.to_json()
    if args.delta is not None:
        d = parse_scalar(args.delta)
        spec = {}
        for s, rep in reports.items():
            st, vals = solve_values(rep.system.specialize_delta(d))
            spec[s] = (st, vals)
            payload["branches"]["even" if s > 0 else "odd"]["specialized"] = {
                "delta": scalar_str(d),
                "status": st,
                "solution": {t: scalar_str(v) for t, v in vals.items()},
            }
        for s, (st, vals) in spec.items():
            lines.append(f"order {k}, s={s:+d}, mu-lam={d}: {st}")
            lines += [f"{t} = {factored_str(v)}" for t, v in vals.items() if v]
        _emit(args, payload, "\n".join(lines))
        return EXIT_OK
    statuses = {rep.status for rep in reports.values()}
    rank = ", ".join(sorted({f"rank {rep.rank} of {rep.unknown_count}" for rep in reports.values()}))
    lines.append(f"order {k}: {'/'.join(sorted(statuses))} over Q(lam, mu) ({rank})")
    if statuses == {UNIQUE}:
        if len(reports) == 2:
            combined = {
                t: combine_branches(reports[1].solution[t], reports[-1].solution[t]) for t in reports[1].unknowns
            }
        else:
            (rep,) = reports.values()
            combined = {t: factored_str(v) for t, v in rep.solution.items()}
        if args.family == "full":
            combined = {t: v for t, v in combined.items() if v != "0"}
        payload["combined"] = combined
        lines += group_tags(combined)
    sing = sorted({d for rep in reports.values() for d in rep.singular_deltas})
    payload["singular_deltas"] = [str(d) for d in sing]
    lines.append("singular at mu-lam in {" + ", ".join(str(d) for d in sing) + "}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_verify(args):
    orders = ORDERS2 if args.order is None else (parse_order(args.order),)
    if any(k2 not in ORDERS2 for k2 in orders):
        raise UsageError(f"verify covers orders 1/2, 1, 3/2, 2, not {args.order}")
    log = None if args.json else print
    results = verification.run_all(orders, log=log)
    ok = all(r.passed for r in results)
    if args.json:
        print(json.dumps(
            {"passed": ok, "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]},
            indent=2, sort_keys=True,
        ))
    else:
        print("all checks passed" if ok else "some checks failed")
    return EXIT_OK if ok else EXIT_FAIL


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")

    p = argparse.ArgumentParser(
        prog="superquant",
        description="Differential operators on the supercircle S^(1|2) and osp(2|2)-equivariant quantization.",
        parents=[common],
    )
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("bracket", parents=[common], help="contact bracket {f, g}")
    q.add_argument("f")
    q.add_argument("g")
    q.set_defaults(func=cmd_bracket)

    q = sub.add_parser("apply", parents=[common], help="Lie derivative of a density")
    q.add_argument("--hamiltonian", required=True, help="contact Hamiltonian f")
    q.add_argument("--weight", required=True, help="density weight, e.g. 1/2 or lam")
    q.add_argument("density")
    q.set_defaults(func=cmd_apply)

    q = sub.add_parser("quantize", parents=[common], help="quantize a symbol (F1, F2)")
    q.add_argument("--order", required=True, help="contact order: 0, 1/2, 1, 3/2 or 2")
    q.add_argument("--parity", choices=("even", "odd"), required=True)
    q.add_argument("--lam", help="source weight (symbolic when omitted)")
    q.add_argument("--mu", help="target weight (symbolic when omitted)")
    q.add_argument("F1")
    q.add_argument("F2")
    q.set_defaults(func=cmd_quantize)

    q = sub.add_parser("symbol", parents=[common], help="full symbol of an operator of order <= 2")
    q.add_argument("--lam")
    q.add_argument("--mu")
    q.add_argument("operator")
    q.set_defaults(func=cmd_symbol)

    q = sub.add_parser("derive", parents=[common], help="re-derive a quantization map")
    q.add_argument("--order", required=True)
    q.add_argument("--parity", choices=("even", "odd", "both"), default="both")
    q.add_argument("--family", choices=("symmetric", "full"), default="symmetric",
                   help="ansatz: the reflection-symmetric term families, or every affine term")
    q.add_argument("--bound", type=int, help="largest x-degree of basis monomials (default 2k+3)")
    q.add_argument("--delta", help="specialize mu = lam + delta")
    q.set_defaults(func=cmd_derive)

    q = sub.add_parser("verify", parents=[common], help="run the verification suite")
    q.add_argument("--order")
    q.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResonanceError as exc:
        print(f"resonance: {exc}", file=sys.stderr)
        return EXIT_RESONANCE
    except (UsageError, ParseError, OrderError, ParityError, WeightMismatchError, ZeroOperatorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
