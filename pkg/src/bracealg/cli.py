"""Batch front end: ingest algebra / DG / structure dumps, run pipelines,
emit machine-readable reports.

Commands: hh, transfer, massey, compare, model.  Exit codes: 0 success,
2 invariant violation in the input, 3 cap exceeded, 4 class mismatch.
Reports are schema-versioned JSON, byte-identical across runs and across
thread counts (timing is printed to stderr, never into the report).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .algebra import AlgebraSpecError, LaurentAlgebra, load_algebra
from .ainfty import (
    ClassMismatch,
    DGAlgebra,
    MinimalAInfty,
    NotLaurentForm,
    ObstructionNotContractible,
    ainfty_map_check,
    build_iso,
    cohomology_algebra,
    formality_verdict_of_model,
    make_contraction,
    mc_check,
    transfer,
)
from .hochschild import (
    CapTooLow,
    Cochain,
    DEFAULT_CAP,
    cohomology,
    tate_unit_check,
)
from .linalg import GF, QQ, Matrix
from .models import (
    BadParameters,
    complete_resolution,
    dg_end,
    periodicity_witness,
    rigidity_check,
    seeded_minimal_model,
    stable_endomorphism_algebra,
)

SCHEMA = "v1"

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_CAP_EXCEEDED = 3
EXIT_CLASS_MISMATCH = 4


class ConfigError(Exception):
    pass


def _field_of(spec, cap_n):
    if spec in (None, "qq", "QQ"):
        return QQ
    if spec.startswith("fp:"):
        p = int(spec.split(":", 1)[1])
        if p <= 2 * cap_n:
            raise ConfigError("prime %d must exceed twice the arity cap %d" % (p, cap_n))
        try:
            return GF(p)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    raise ConfigError("unknown field %r (use qq or fp:<prime>)" % spec)


def _emit(report, out_path, t0):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print("elapsed: %.3fs" % (time.time() - t0), file=sys.stderr)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("cannot read %s: %s" % (path, exc)) from exc


# ---------------------------------------------------------------------------
# Structure (minimal model) dumps


def structure_to_json(m: MinimalAInfty):
    from .hochschild import differential

    data = m.to_json()
    data["algebra"] = m.algebra.to_json()
    data["schema"] = SCHEMA
    flags = {}
    for n, c in sorted(m.ops.items()):
        dc = differential(c, cap=n + 1)
        flags[str(n)] = {"is_cocycle": dc.is_zero(up_to=n + 1)}
    data["cochain_flags"] = flags
    return data


def structure_from_json(data, field=QQ) -> MinimalAInfty:
    lam = load_algebra(data["algebra"], field)
    cap = data["cap"]
    ops = {}
    for key, dump in data.get("ops", {}).items():
        n = int(key)
        comps = dump["components"].get(str(n))
        if comps is None:
            raise AlgebraSpecError("operation %d: missing its own component" % n)
        mat = None
        for entry in comps:
            if not any(entry["weights"]):
                rows = [[_scalar(field, x) for x in row] for row in entry["matrix"]]
                mat = Matrix(rows, field, cols=lam.dim**n)
            elif any(any(_scalar(field, x) for x in row) for row in entry["matrix"]):
                raise AlgebraSpecError("operation %d: weighted components not allowed" % n)
        if mat is None:
            continue
        ops[n] = Cochain.from_matrix(lam, n, mat, dump["iota_power"], cap)
    return MinimalAInfty(LaurentAlgebra(lam), ops, cap)


def _scalar(field, txt):
    if isinstance(txt, str) and "/" in txt:
        a, b = txt.split("/")
        return field.of(int(a), int(b))
    return field.of(int(txt))


# ---------------------------------------------------------------------------
# Commands


def cmd_hh(args, t0):
    field = _field_of(args.field, args.cap_n)
    data = _load_json(args.input)
    lam = load_algebra(data, field)
    cap_p = args.cap_p
    if cap_p >= DEFAULT_CAP:
        raise CapTooLow("--cap-p must stay below the horizontal cap %d" % DEFAULT_CAP)
    js = list(range(0, cap_p // 2 + 2))

    def dims_for(p):
        return (p, len(cohomology(lam, p, _j_for(p))))

    def _j_for(p):
        return max(0, (p + 1) // 2)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(dims_for, range(0, cap_p + 1)))
    else:
        rows = [dims_for(p) for p in range(0, cap_p + 1)]
    rows.sort()
    table = {str(p): d for p, d in rows}
    # cup and bracket tables on generators of low bidegrees
    gens = []
    for p in range(0, min(cap_p, 4) + 1):
        for cls in cohomology(lam, p, _j_for(p)):
            gens.append(((p, -2 * _j_for(p)), cls))
    cup_table = []
    bracket_table = []
    for (bi1, c1) in gens:
        for (bi2, c2) in gens:
            if bi1[0] + bi2[0] <= min(cap_p, DEFAULT_CAP - 1):
                prod = c1.cup_cls(c2)
                cup_table.append(
                    {"left": list(bi1), "right": list(bi2), "coords": [field.to_str(x) for x in prod.coords]}
                )
            if bi1[0] + bi2[0] - 1 <= min(cap_p, DEFAULT_CAP - 1) and bi1[0] + bi2[0] >= 1:
                br = c1.bracket_cls(c2)
                bracket_table.append(
                    {"left": list(bi1), "right": list(bi2), "coords": [field.to_str(x) for x in br.coords]}
                )
    report = {
        "schema": SCHEMA,
        "command": "hh",
        "config": {"input": args.input, "cap_p": cap_p, "field": args.field or "qq"},
        "algebra": {"dim": lam.dim, "labels": lam.basis_labels},
        "hh_dimensions": table,
        "cup_table": cup_table,
        "bracket_table": bracket_table,
    }
    _emit(report, args.out, t0)
    return EXIT_OK


def _load_dga(args, field):
    if args.input:
        return DGAlgebra.from_json(_load_json(args.input), field)
    if args.n is not None and args.a is not None:
        return dg_end(complete_resolution(args.n, args.a, field))
    raise ConfigError("need either an input DG dump or --n/--a model parameters")


def cmd_transfer(args, t0):
    field = _field_of(args.field, args.cap_n)
    dga = _load_dga(args, field)
    con = make_contraction(dga)
    m = transfer(dga, con, args.cap_n)
    rep = mc_check(m)
    verdict = formality_verdict_of_model(m, args.cap_n)
    report = {
        "schema": SCHEMA,
        "command": "transfer",
        "config": {"input": args.input, "n": args.n, "a": args.a, "cap_n": args.cap_n, "field": args.field or "qq"},
        "h0_dim": m.algebra.dim,
        "structure": structure_to_json(m),
        "mc_residual_digest": rep.digest(),
        "formality": verdict.verdict,
        "hypothesis_flags": getattr(dga, "hypothesis_flags", {}),
    }
    _emit(report, args.out, t0)
    return EXIT_OK


def cmd_massey(args, t0):
    field = _field_of(args.field, args.cap_n)
    if args.input:
        m = structure_from_json(_load_json(args.input), field)
    elif args.n is not None and args.a is not None:
        m = seeded_minimal_model(args.n, args.a, cap=args.cap_n, field=field)
    else:
        raise ConfigError("need a structure dump or --n/--a")
    from .ainfty import restricted_ump

    lam = m.algebra
    if m.arities():
        cls = restricted_ump(m)
        zero = cls.is_zero()
    else:
        ctx_cls = cohomology(lam, 4, 1)
        cls = None
        zero = True
    separable = False
    if zero and cls is None:
        from .hochschild import hh_context, vec_to_cochain, normalized_space_dim, HHClass

        cls = HHClass(
            hh_context(lam, 4, 1),
            vec_to_cochain(lam, 4, 1, [lam.field.zero] * normalized_space_dim(lam, 4)),
        )
    unit = tate_unit_check(cls)
    # explicit syzygy certificate
    from .hochschild import cocycle_to_extension
    from .algebra import is_stable_iso

    fmap = cocycle_to_extension(cls.representative, 4)
    stable_iso = is_stable_iso(fmap)
    report = {
        "schema": SCHEMA,
        "command": "massey",
        "config": {"input": args.input, "n": args.n, "a": args.a, "cap_n": args.cap_n, "field": args.field or "qq"},
        "restricted_class": {
            "bidegree": [4, -2],
            "coords": [field.to_str(x) for x in cls.coords],
            "is_zero": bool(zero),
        },
        "tate_unit": bool(unit),
        "separable_coefficient": bool(unit.separable),
        "omega4_stable_iso_certificate": bool(stable_iso),
    }
    _emit(report, args.out, t0)
    return EXIT_OK


def cmd_compare(args, t0):
    field = _field_of(args.field, args.cap_n)
    m = structure_from_json(_load_json(args.left), field)
    mp = structure_from_json(_load_json(args.right), field)
    try:
        f = build_iso(m, mp, args.cap_n)
    except ClassMismatch as exc:
        report = {
            "schema": SCHEMA,
            "command": "compare",
            "config": {"left": args.left, "right": args.right, "cap_n": args.cap_n},
            "result": "class_mismatch",
            "detail": str(exc),
        }
        _emit(report, args.out, t0)
        return EXIT_CLASS_MISMATCH
    except ObstructionNotContractible as exc:
        report = {
            "schema": SCHEMA,
            "command": "compare",
            "config": {"left": args.left, "right": args.right, "cap_n": args.cap_n},
            "result": "obstruction",
            "obstruction_arity": exc.arity,
        }
        _emit(report, args.out, t0)
        return EXIT_OK
    rep = ainfty_map_check(f, m, mp, cap=args.cap_n)
    report = {
        "schema": SCHEMA,
        "command": "compare",
        "config": {"left": args.left, "right": args.right, "cap_n": args.cap_n},
        "result": "isomorphism",
        "linear_part": "identity" if f.linear is None else "central-unit gauge",
        "morphism": f.to_json(),
        "residual_digest": rep.digest(),
    }
    _emit(report, args.out, t0)
    return EXIT_OK


def cmd_model(args, t0):
    field = _field_of(args.field, args.cap_n)
    if args.n is None or args.a is None:
        raise ConfigError("model command needs --n and --a")
    c = complete_resolution(args.n, args.a, field)
    e = dg_end(c)
    w, winv = periodicity_witness(e)
    lau = cohomology_algebra(e)
    report = {
        "schema": SCHEMA,
        "command": "model",
        "config": {"n": args.n, "a": args.a, "field": args.field or "qq"},
        "dga": e.to_json(),
        "h0_dim": lau.base.dim,
        "stable_end_dim": stable_endomorphism_algebra(args.n, args.a, field).dim,
        "rigid": rigidity_check(args.n, args.a, field),
        "periodicity_witness": {
            "cocycle": [field.to_str(x) for x in w],
            "inverse": [field.to_str(x) for x in winv],
        },
        "hypothesis_flags": e.hypothesis_flags,
    }
    _emit(report, args.out, t0)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="bracealg",
        description="Exact Hochschild/A-infinity pipelines on small algebras",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, inputs=True):
        p.add_argument("--cap-p", type=int, default=6, help="horizontal cap for cohomology tables")
        p.add_argument("--cap-n", type=int, default=8, help="arity cap for A-infinity operations")
        p.add_argument("--field", default=None, help="qq (default) or fp:<prime>")
        p.add_argument("--out", default=None, help="write the JSON report here")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--verbose", action="store_true")

    p_hh = sub.add_parser("hh", help="cohomology dimension table with cup/bracket tables")
    p_hh.add_argument("input", help="algebra spec JSON")
    common(p_hh)

    p_tr = sub.add_parser("transfer", help="DG input -> minimal model dump + MC residuals")
    p_tr.add_argument("input", nargs="?", default=None, help="DG algebra dump JSON")
    p_tr.add_argument("--n", type=int, default=None)
    p_tr.add_argument("--a", type=int, default=None)
    common(p_tr)

    p_ma = sub.add_parser("massey", help="restricted class, Tate unit test, syzygy certificate")
    p_ma.add_argument("input", nargs="?", default=None, help="structure dump JSON")
    p_ma.add_argument("--n", type=int, default=None)
    p_ma.add_argument("--a", type=int, default=None)
    common(p_ma)

    p_cp = sub.add_parser("compare", help="two structure dumps -> isomorphism or obstruction")
    p_cp.add_argument("left")
    p_cp.add_argument("right")
    common(p_cp)

    p_mo = sub.add_parser("model", help="emit the DG model for (n, a)")
    p_mo.add_argument("--n", type=int, default=None)
    p_mo.add_argument("--a", type=int, default=None)
    common(p_mo)
    return ap


COMMANDS = {
    "hh": cmd_hh,
    "transfer": cmd_transfer,
    "massey": cmd_massey,
    "compare": cmd_compare,
    "model": cmd_model,
}


def main(argv=None):
    t0 = time.time()
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.cap_n < 4 or args.cap_p < 4:
        print("error: caps must be at least 4", file=sys.stderr)
        return EXIT_INVALID_INPUT
    try:
        return COMMANDS[args.command](args, t0)
    except (ConfigError, AlgebraSpecError, BadParameters, NotLaurentForm) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INVALID_INPUT
    except CapTooLow as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CAP_EXCEEDED
    except ClassMismatch as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CLASS_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
