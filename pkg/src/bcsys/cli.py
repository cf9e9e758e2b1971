"""Command line front end: build examples, check axioms, translate, round-trip.

Exit codes: 0 all checked laws pass, 1 at least one law fails or a
round-trip witness does not verify, 2 malformed input or usage error.
Structure files are the JSON documents of the serialize module; `-`
reads standard input or writes standard output.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bsys import BSystem, build_finset_bsystem, validate_bsystem
from .cesys import CESystem, build_finset_cesystem, validate_cesystem
from .core import Stratification, stratify
from .csys import CSystem, validate_csystem
from .esys import (
    ESystem,
    build_group_structure,
    build_nat_esystem,
    check_pairing,
    s3_table,
    validate_esystem,
)
from .report import Report
from .serialize import LoadError, load_structure, save_structure
from .syntax import SignatureError, build_syntactic_bframe, parse_signature
from .xlate import (
    adjunction_witnesses,
    b_to_e,
    c_to_ce,
    casce_iso,
    ce_to_c,
    ce_to_e,
    compose_equivalence,
    counit_cehom,
    e_to_b,
    e_to_ce,
    grand_roundtrip_iso,
    invert_ehom,
    unit_ehom,
    validate_ehom,
)

MAX_HEIGHT_ENV = "BCSYS_MAX_HEIGHT"


def max_height() -> int:
    try:
        return int(os.environ.get(MAX_HEIGHT_ENV, "8"))
    except ValueError:
        return 8


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _print_report(rep: Report) -> int:
    print(rep.format())
    return 0 if rep.ok else 1


def cmd_example(args) -> int:
    height = args.height
    if height > max_height():
        print(f"height {height} exceeds {MAX_HEIGHT_ENV}={max_height()}", file=sys.stderr)
        return 2
    if args.name == "finset-b":
        obj = build_finset_bsystem(height)
    elif args.name == "finset-ce":
        obj = build_finset_cesystem(height)
    elif args.name == "nat-e":
        obj = build_nat_esystem(height)
    elif args.name == "group-s3":
        obj = build_group_structure(*s3_table())
    elif args.name == "syntactic":
        if not args.sig:
            print("syntactic example needs --sig FILE", file=sys.stderr)
            return 2
        try:
            sig = parse_signature(_read(args.sig))
        except SignatureError as exc:
            print(f"signature error: {exc}", file=sys.stderr)
            return 2
        obj, _rep = build_syntactic_bframe(sig, height, args.bound)
    else:
        print(f"unknown example {args.name!r}", file=sys.stderr)
        return 2
    _write(args.output, save_structure(obj))
    return 0


def _validate(kind: str, obj, rooted: bool, stratified: bool) -> Report:
    if kind == "bsystem":
        return validate_bsystem(obj)
    if kind == "bframe":
        from .bsys import validate_bframe

        return validate_bframe(obj)
    if kind == "esystem":
        return validate_esystem(obj)
    if kind == "csystem":
        return validate_csystem(obj)
    if kind == "cesystem":
        return validate_cesystem(obj, rooted=rooted, stratified=stratified)
    if kind == "tree":
        from .core import validate_tree

        return validate_tree(obj)
    if kind == "signature":
        rep = Report()
        rep.tick("signature")
        return rep
    raise LoadError(f"no validator for kind {kind!r}")


def cmd_check(args) -> int:
    try:
        kind, obj = load_structure(_read(args.file), expect_kind=args.as_kind)
    except (LoadError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rep = _validate(kind, obj, args.rooted, args.stratified)
    return _print_report(rep)


def _ensure_levels(e: ESystem) -> ESystem:
    if e.levels is None:
        s = stratify(e.cat)
        if not isinstance(s, Stratification):
            raise LoadError(f"E-system is not stratified: {s}")
        e.levels = dict(s.level)
    return e


def cmd_translate(args) -> int:
    try:
        kind, obj = load_structure(_read(args.file))
    except (LoadError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    to = args.to
    try:
        out = _translate(kind, obj, to)
    except (LoadError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write(args.output, save_structure(out))
    return 0


def _translate(kind: str, obj, to: str):
    if kind == "bsystem":
        if to == "e":
            return b_to_e(obj)
        if to == "ce":
            return e_to_ce(b_to_e(obj))
        if to == "c":
            return compose_equivalence("b2c", obj).output
        if to == "b":
            return obj
    if kind == "esystem":
        if to == "b":
            return e_to_b(_ensure_levels(obj))
        if to == "ce":
            return e_to_ce(obj)
        if to == "c":
            return ce_to_c(e_to_ce(obj))
        if to == "e":
            return obj
    if kind == "cesystem":
        if to == "e":
            return ce_to_e(obj)
        if to == "c":
            return ce_to_c(obj)
        if to == "b":
            return e_to_b(_ensure_levels(ce_to_e(obj)))
        if to == "ce":
            return obj
    if kind == "csystem":
        if to == "ce":
            return c_to_ce(obj)
        if to == "e":
            return ce_to_e(c_to_ce(obj))
        if to == "b":
            return compose_equivalence("c2b", obj).output
        if to == "c":
            return obj
    raise LoadError(f"cannot translate kind {kind!r} to {to!r}")


def cmd_roundtrip(args) -> int:
    try:
        kind, obj = load_structure(_read(args.file))
    except (LoadError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if kind == "bsystem":
        iso, stages = grand_roundtrip_iso(obj)
        for name, rep in stages.items():
            print(f"== stage {name}")
            print(rep.format())
        print("== round-trip isomorphism")
        print(iso.report.format())
        ok = iso.verified and all(r.ok for r in stages.values())
        return 0 if ok else 1
    if kind == "esystem":
        eta = unit_ehom(obj)
        rep = validate_ehom(eta)
        inv, invrep = invert_ehom(eta)
        print(rep.format())
        print(invrep.format())
        return 0 if rep.ok and inv is not None else 1
    if kind == "cesystem":
        strat = stratify(obj.fam) if obj.fam.terminal is not None else None
        rooted = all(len(obj.base.hom(x, obj.root)) == 1 for x in obj.base.objects)
        if rooted and isinstance(strat, Stratification):
            iso = casce_iso(obj)
            print(iso.report.format())
            return 0 if iso.verified else 1
        e = ce_to_e(obj)
        _eta, _eps, rep = adjunction_witnesses(e, obj)
        print(rep.format())
        return 0 if rep.ok else 1
    if kind == "csystem":
        a = c_to_ce(obj)
        c2 = ce_to_c(a)
        rep = Report()
        rep.tick("retraction")
        same = (
            c2.cat.arrows.keys() == obj.cat.arrows.keys()
            and c2.length == obj.length
            and c2.ft == obj.ft
            and c2.proj == obj.proj
            and c2.pb == obj.pb
        )
        if not same:
            rep.fail("retraction", (), "ce_to_c(c_to_ce(c)) differs from c")
        print(rep.format())
        return 0 if rep.ok else 1
    print(f"error: no round trip for kind {kind!r}", file=sys.stderr)
    return 2


def cmd_pair(args) -> int:
    try:
        kind, obj = load_structure(_read(args.file), expect_kind="esystem")
    except (LoadError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _print_report(check_pairing(obj))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bcsys",
        description="check, translate and round-trip finitely presented "
        "B-, C-, E- and CE-systems",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("example", help="emit a built-in example structure")
    ex.add_argument("name", choices=["finset-b", "finset-ce", "nat-e", "group-s3", "syntactic"])
    ex.add_argument("--height", type=int, default=3)
    ex.add_argument("--bound", type=int, default=2, help="former-count bound (syntactic)")
    ex.add_argument("--sig", help="signature file (syntactic)")
    ex.add_argument("-o", "--output", default=None)
    ex.set_defaults(func=cmd_example)

    ck = sub.add_parser("check", help="run the axiom checkers on a structure file")
    ck.add_argument("file")
    ck.add_argument("--as", dest="as_kind", default=None, help="require this kind tag")
    ck.add_argument("--rooted", action="store_true")
    ck.add_argument("--stratified", action="store_true")
    ck.set_defaults(func=cmd_check)

    tr = sub.add_parser("translate", help="translate a structure to another kind")
    tr.add_argument("--to", required=True, choices=["b", "c", "e", "ce"])
    tr.add_argument("file")
    tr.add_argument("-o", "--output", default=None)
    tr.set_defaults(func=cmd_translate)

    rt = sub.add_parser("roundtrip", help="verify the round-trip isomorphism")
    rt.add_argument("file")
    rt.set_defaults(func=cmd_roundtrip)

    pr = sub.add_parser("pair", help="verify the pairing bijection on an E-system")
    pr.add_argument("file")
    pr.set_defaults(func=cmd_pair)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
