"""``frobtensor`` command line.

Exit codes: 0 pass, 1 mathematical failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import m0n
from .frobenius import (
    Report,
    class_invariance_check,
    coherence_check,
    conformality_check,
    flat_identity_check,
    quasi_homogeneity_check,
    wdvv_check,
)
from .modelio import ModelFileError, dumps, model_to_json, read_model
from .rank_one import RankOneTheory, tensor_rank1
from .series import TruncationError, as_rational, rational_str, shift_correlators
from .semisimple import NonSemisimpleError, NonTameError, pn_pm_model, skewness_defect, special_init
from .tensor import tensor_correlators

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(doc, out: str | None) -> None:
    text = dumps(doc)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _rationals(text: str) -> list[Fraction]:
    try:
        return [as_rational(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"cannot parse rational list {text!r}: {e}") from None


def _complexes(text: str) -> list[complex]:
    out = []
    for t in text.split(","):
        t = t.strip().replace(" ", "")
        if not t:
            continue
        try:
            out.append(complex(Fraction(t)) if "/" in t else complex(t))
        except ValueError:
            raise UsageError(f"cannot parse number {t!r}") from None
    return out


def _shift_spec(text: str) -> dict[int, Fraction]:
    """``"0=1/2,1=-3"`` or a plain list of values."""
    out: dict[int, Fraction] = {}
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if all("=" in p for p in parts):
        for p in parts:
            k, v = p.split("=", 1)
            try:
                out[int(k)] = as_rational(v)
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"bad shift component {p!r}") from None
    else:
        for a, v in enumerate(_rationals(text)):
            if v:
                out[a] = v
    return out


# ----------------------------------------------------------------- commands


def cmd_check(args) -> int:
    model = read_model(args.model)
    flags = [f for f in ("wdvv", "coherence", "identity", "euler") if getattr(args, f)]
    flags = flags or ["wdvv", "coherence", "identity", "euler"]
    report = Report("check")
    if "wdvv" in flags:
        report = report.merge(wdvv_check(model))
    if "coherence" in flags:
        report = report.merge(coherence_check(model))
    if "identity" in flags:
        if model.identity is None:
            report.unverifiable.append("identity: model declares no identity")
        else:
            report = report.merge(flat_identity_check(model))
    if "euler" in flags:
        if model.euler is None:
            report.unverifiable.append("euler: model carries no Euler data")
        else:
            report = report.merge(conformality_check(model)).merge(quasi_homogeneity_check(model))
    if args.keel:
        for n in range(4, min(model.truncation, args.keel) + 1):
            report = report.merge(class_invariance_check(model, n))
    report.name = "check"
    _emit(report.to_json(), args.output)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_tensor(args) -> int:
    A, B = read_model(args.a), read_model(args.b)
    order = args.order or min(A.truncation, B.truncation, args.n_max)
    if order > args.n_max:
        raise UsageError(f"order {order} exceeds the diagonal range n_max = {args.n_max} "
                         f"(use --n-max up to {m0n.N_MAX_EXPENSIVE})")
    T = tensor_correlators(A, B, order, n_max=args.n_max, jobs=args.jobs)
    _emit(model_to_json(T), args.output)
    return EXIT_OK


def cmd_diagonal(args) -> int:
    delta = m0n.diagonal(args.n, n_max=args.n_max, allow_expensive=args.n_max > m0n.N_MAX_DEFAULT)
    terms = sorted(((b.to_text(), c.to_text(), rational_str(x)) for b, c, x in delta.pairs))
    doc = {"n": args.n, "terms": [{"left": b, "right": c, "coefficient": x} for b, c, x in terms]}
    _emit(doc, args.output)
    return EXIT_OK


def cmd_rank1(args) -> int:
    c1, c2 = _rationals(args.c), _rationals(args.c2)
    if not c1 or not c2:
        raise UsageError("both --c and --c2 need at least C_3")
    N = args.order or min(len(c1), len(c2)) + 2
    t1 = RankOneTheory(tuple(c1) + (Fraction(0),) * max(0, N - 2 - len(c1)))
    t2 = RankOneTheory(tuple(c2) + (Fraction(0),) * max(0, N - 2 - len(c2)))
    out = tensor_rank1(t1, t2, N)
    _emit({"C": {str(n): rational_str(out.C(n)) for n in range(3, N + 1)}}, args.output)
    return EXIT_OK


def cmd_shift(args) -> int:
    model = read_model(args.model)
    shift = _shift_spec(args.s)
    if any(not 0 <= a < model.dimension for a in shift):
        raise UsageError("shift index out of range")
    shifted = model.with_correlators(shift_correlators(model.correlators, shift))
    _emit(model_to_json(shifted), args.output)
    return EXIT_OK


def cmd_semisimple(args) -> int:
    model = read_model(args.model)
    point = _complexes(args.at) if args.at else None
    if point is not None and len(point) != model.dimension:
        raise UsageError(f"--at needs {model.dimension} coordinates")
    if model.euler is None:
        raise UsageError("model has no Euler data; special initial conditions need it")
    S = special_init(model, point, rng=random.Random(args.seed), tol=args.tolerance)
    doc = S.to_json()
    doc["skewness_defect"] = skewness_defect(S)
    _emit(doc, args.output)
    return EXIT_OK if doc["skewness_defect"] <= max(args.tolerance, 1e-8) else EXIT_FAIL


def cmd_pnpm(args) -> int:
    x = [_complexes(t)[0] for t in (args.x00, args.x10, args.x01)]
    S = pn_pm_model(args.n, args.m, *x, tol=args.tolerance)
    doc = S.to_json()
    doc["index"] = [[i, j] for i in range(args.n + 1) for j in range(args.m + 1)]
    _emit(doc, args.output)
    return EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="frobtensor", description="Tensor products of formal Frobenius manifolds.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write JSON here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for tensor products")
    common.add_argument("--seed", type=int, default=0, help="seed for numeric diagonalisation")
    common.add_argument("--tolerance", type=float, default=1e-10)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="run structural checks on a model file")
    s.add_argument("model")
    for flag in ("wdvv", "coherence", "identity", "euler"):
        s.add_argument(f"--{flag}", action="store_true")
    s.add_argument("--keel", type=int, default=0, metavar="N", help="also check Keel-relation invariance up to arity N")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("tensor", parents=[common], help="tensor product of two model files")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--order", type=int)
    s.add_argument("--n-max", type=int, default=m0n.N_MAX_DEFAULT)
    s.set_defaults(func=cmd_tensor)

    s = sub.add_parser("diagonal", parents=[common], help="diagonal class of M_{0,n}")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--n-max", type=int, default=m0n.N_MAX_DEFAULT)
    s.set_defaults(func=cmd_diagonal)

    s = sub.add_parser("rank1", parents=[common], help="tensor product of rank-one theories")
    s.add_argument("--c", required=True, help="C_3,C_4,... of the first factor")
    s.add_argument("--c2", required=True, help="C_3,C_4,... of the second factor")
    s.add_argument("--order", type=int)
    s.set_defaults(func=cmd_rank1)

    s = sub.add_parser("shift", parents=[common], help="re-expand a model at a shifted base point")
    s.add_argument("model")
    s.add_argument("--s", required=True, help="'a=p/q,...' or a full coordinate list")
    s.set_defaults(func=cmd_shift)

    s = sub.add_parser("semisimple", parents=[common], help="special initial conditions at a point")
    s.add_argument("model")
    s.add_argument("--at", help="comma-separated point coordinates (default: origin)")
    s.set_defaults(func=cmd_semisimple)

    s = sub.add_parser("pnpm", parents=[common], help="closed-form data for P^n x P^m")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--x00", default="0")
    s.add_argument("--x10", default="0")
    s.add_argument("--x01", default="0")
    s.set_defaults(func=cmd_pnpm)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ModelFileError, TruncationError, m0n.RangeError, NonTameError, NonSemisimpleError) as e:
        print(f"frobtensor {args.command}: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
