"""Command-line front end.

Exit codes: 0 pass, 1 identity failure, 2 usage error, 3 precision exhausted.
All output is JSON with sorted keys, so identical inputs give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from math import lcm

from . import phigamma as pg
from .errors import LTError, PrecisionExhausted
from .ffield import GF, FFElem, _log_p, _prime_of, solve_root_of_sign
from .padic import LocalFieldSpec, PiadicInteger
from .reps import RepClass, enumerate_classes
from .series import TSeries
from .tame_ext import (
    InertiaElem,
    TameRing,
    build_vj,
    check_inertia_eigen,
    check_phi_fixed,
    compatible_zeta,
    incompatible_zeta,
    unramified_descent,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3
UNIT_PREC = pg.UNIT_PREC
CORRUPTIONS = ("gamma-exponent", "gamma-sign", "phi-sign", "zeta")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# parsing helpers


def _spec(args) -> LocalFieldSpec:
    if args.p is None:
        raise UsageError("--p is required")
    try:
        eis = None
        if args.eis is not None:
            eis = [[int(c) for c in r] if isinstance(r, list) else [int(r)] for r in json.loads(args.eis)]
        return LocalFieldSpec(args.p, args.f, args.e, eis)
    except (LTError, ValueError, TypeError) as exc:
        raise UsageError(f"bad field spec: {exc}") from None


def parse_lambda(text: str | None, spec: LocalFieldSpec) -> FFElem | None:
    """An integer code in F_q, or a JSON coefficient list over F_p."""
    if text is None:
        return None
    value = json.loads(text)
    if isinstance(value, int):
        if not 0 <= value < spec.q:
            raise UsageError(f"lambda code {value} outside 0..{spec.q - 1}")
        lam = spec.residue_field.from_code(value)
    elif isinstance(value, list) and value:
        m = -(-len(value) // spec.f) * spec.f
        lam = GF(spec.p, m)([int(x) for x in value] + [0] * (m - len(value)))
    else:
        raise UsageError(f"cannot read lambda from {text!r}")
    if lam.is_zero():
        raise UsageError("lambda must be nonzero")
    return lam


def parse_unit(text: str, spec: LocalFieldSpec) -> PiadicInteger:
    """'3', '1+pi', 'tau:<code>' or a JSON object as written by ``to_json``."""
    text = text.strip()
    if text == "1+pi":
        u = pg.one_plus_pi(spec, UNIT_PREC)
    elif text.startswith("tau:"):
        a = spec.residue_field.from_code(int(text[4:]))
        if a.is_zero():
            raise UsageError("Teichmuller lift of zero is not a unit")
        u = spec.teichmuller(a, UNIT_PREC)
    elif text.startswith("{"):
        u = PiadicInteger.from_json(spec, json.loads(text))
    else:
        try:
            u = spec.from_int(int(text), UNIT_PREC)
        except ValueError:
            raise UsageError(f"cannot read unit {text!r}") from None
    if not u.is_unit():
        raise UsageError(f"{text} is not a unit")
    return u


def random_unit(spec: LocalFieldSpec, rng: random.Random, prec: int = UNIT_PREC) -> PiadicInteger:
    while True:
        u = spec.element([rng.randrange(spec.p ** (prec // spec.e + 1)) for _ in range(spec.f)], prec)
        if u.is_unit():
            return u


def job_units(args, spec: LocalFieldSpec) -> list[PiadicInteger]:
    if args.unit:
        return [parse_unit(x, spec) for x in args.unit]
    rng = random.Random(args.seed)
    return [pg.one_plus_pi(spec, UNIT_PREC), random_unit(spec, rng)]


def unit_pairs(units):
    """Consecutive pairs (cyclically); a single unit pairs with itself."""
    return [(units[i], units[(i + 1) % len(units)]) for i in range(len(units))]


def _check_job(args):
    if args.prec <= 0:
        raise UsageError("--prec must be positive")
    if args.n is None or args.n < 1:
        raise UsageError("--n must be a positive integer")
    if args.h is None:
        raise UsageError("--h is required")


def _s_arg(args):
    return None if not args.s else args.s


def build_module(args, spec: LocalFieldSpec) -> pg.PhiGammaModule:
    _check_job(args)
    lam = parse_lambda(args.lam, spec)
    s = _s_arg(args)
    if s is not None or lam is not None:
        # validates q-primitivity of the combined exponent
        RepClass(spec.q, args.n, args.h, pg.fold_exponent(s or 0, spec.q), lam or spec.residue_field.one)
    return pg.construct_twisted(spec, args.n, args.h, s, lam, args.prec)


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args) -> tuple[object, int]:
    q = args.q
    if q is None:
        if args.p is None:
            raise UsageError("give --q or --p/--f")
        q = args.p**args.f
    if args.n is None or args.n < 1:
        raise UsageError("--n must be a positive integer")
    try:
        _log_p(q, _prime_of(q))
    except (LTError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    classes = [{"orbit": orb, "h": h} for orb, h in enumerate_classes(q, args.n)]
    return {"q": q, "n": args.n, "count": len(classes), "classes": classes}, EXIT_OK


def cmd_construct(args) -> tuple[object, int]:
    spec = _spec(args)
    M = build_module(args, spec)
    units = job_units(args, spec)
    stored = list(units)
    for u, v in unit_pairs(units):
        stored.append(u * v)
    data = M.to_json(stored)
    data["units"] = [u.to_json() for u in units]
    return data, EXIT_OK


def _read_vector(args, M: pg.PhiGammaModule):
    if args.vector is None:
        if args.basis is None or not 0 <= args.basis < M.n:
            raise UsageError(f"--basis must lie in 0..{M.n - 1}")
        return M.basis_vector(args.basis)
    raw = json.loads(args.vector)
    if len(raw) != M.n:
        raise UsageError(f"vector must have {M.n} coordinates")
    return [TSeries.from_json(M.field, x) if isinstance(x, dict) else
            TSeries.from_list(M.field, [int(c) for c in x], M.work) for x in raw]


def cmd_act(args) -> tuple[object, int]:
    spec = _spec(args)
    M = build_module(args, spec)
    v = _read_vector(args, M)
    if args.op == "phi":
        out = pg.apply_phi(M, v)
        meta = {"op": "phi"}
    else:
        units = job_units(args, spec)
        out = pg.apply_gamma(M, units[0], v)
        meta = {"op": "gamma", "unit": units[0].to_json()}
    trimmed = [x.truncate(max(min(x.prec, args.prec), x.val)) for x in out]
    return dict(meta, module=M.label, result=[x.to_json() for x in trimmed]), EXIT_OK


def _load_module(path: str):
    with open(path) as fh:
        data = json.load(fh)
    M = pg.PhiGammaModule.from_json(data)
    units = [PiadicInteger.from_json(M.spec, u) for u in data.get("units", [])]
    if not units:
        raise UsageError("module file lists no units")
    return M, units


def _corrupt(M: pg.PhiGammaModule, mode: str | None) -> pg.PhiGammaModule:
    if mode in ("gamma-sign", "phi-sign") and M.spec.p == 2:
        raise UsageError(f"--corrupt {mode} is the identity in characteristic 2")
    if mode == "gamma-exponent":
        return pg.corrupt_gamma_exponent(M)
    if mode == "gamma-sign":
        return pg.corrupt_gamma_sign(M)
    if mode == "phi-sign":
        return pg.corrupt_phi_sign(M)
    return M


def verify_module(M: pg.PhiGammaModule, units, corrupt: str | None = None) -> list[dict]:
    """Every identity applicable to M, as a list of reports."""
    label = M.label or {}
    n, h, q = M.n, label.get("h"), M.q
    s = label.get("s") or None
    lam = None
    if label.get("lambda") is not None:
        coeffs = label["lambda"]
        lam = GF(M.spec.p, len(coeffs))(coeffs)
    M = _corrupt(M, corrupt)
    reports = [pg.check_commutation(M, u) for u in units]
    reports += [pg.check_cocycle(M, u, v) for u, v in unit_pairs(units)]
    reports.append(pg.check_det_identity(M, h, units, s=s, lam=lam))
    if s is None and lam is None:
        ring = TameRing(q, n)
        alpha = solve_root_of_sign(n, q)
        N_y = M.N * ring.d
        vs = build_vj(M, alpha, h, ring, N_y)
        reports += [check_phi_fixed(M, v, ring, N_y, j) for j, v in enumerate(vs)]
        for u in units:
            zeta = incompatible_zeta(u, n) if corrupt == "zeta" else compatible_zeta(u, n)
            g = InertiaElem(u, zeta)
            reports += [check_inertia_eigen(M, v, j, h, g, ring, N_y) for j, v in enumerate(vs)]
    if lam is not None:
        degree = lcm(M.spec.f, lam.field.m) // M.spec.f
        _, report = unramified_descent(lam, degree, q)
        reports.append(report)
    return reports


def cmd_verify(args) -> tuple[object, int]:
    if args.module:
        M, units = _load_module(args.module)
    else:
        spec = _spec(args)
        M = build_module(args, spec)
        units = job_units(args, spec)
    reports = verify_module(M, units, args.corrupt)
    failed = [r["check"] for r in reports if not r["ok"]]
    out = {"ok": not failed, "failed": failed, "reports": reports}
    return out, EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="residue characteristic")
    common.add_argument("--f", type=int, default=1, help="residue degree")
    common.add_argument("--e", type=int, default=1, help="ramification index")
    common.add_argument("--eis", help="JSON list r_0..r_{e-1} with pi^e = sum r_i pi^i")
    common.add_argument("--n", type=int, help="rank")
    common.add_argument("--h", type=int, help="exponent of the level-nf character")
    common.add_argument("--s", type=int, default=0, help="exponent of the level-f twist")
    common.add_argument("--lambda", dest="lam", help="unramified twist: code in F_q or coefficient list")
    common.add_argument("--prec", type=int, default=32, help="t-adic precision N")
    common.add_argument("--unit", action="append", help="unit for Gamma (repeatable)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write JSON here instead of stdout")

    parser = _Parser(prog="ltphigamma", description="Explicit (phi, Gamma)-modules of tame representations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", parents=[common], help="list canonical classes")
    c.add_argument("--q", type=int)
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("construct", parents=[common], help="phi- and Gamma-matrices")
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("act", parents=[common], help="apply phi or gamma_u to a vector")
    c.add_argument("--op", choices=("phi", "gamma"), default="phi")
    c.add_argument("--basis", type=int, default=0)
    c.add_argument("--vector", help="JSON list of coefficient lists")
    c.set_defaults(func=cmd_act)

    c = sub.add_parser("verify", parents=[common], help="run the identity suite")
    c.add_argument("--module", help="module JSON written by construct")
    c.add_argument("--corrupt", choices=CORRUPTIONS)
    c.set_defaults(func=cmd_verify)
    return parser


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        out, code = args.func(args)
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (UsageError, LTError, ValueError, TypeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(out)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
