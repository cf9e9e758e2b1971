"""JSON documents for every structure kind, with canonical key order.

A document is {"kind": ..., "version": 1, "payload": ...} where the
payload mirrors the in-memory tables field for field. Loading checks
referential integrity of ids (dangling references are errors) but does
not run the domain-law validators; the CLI's check command does that.
"""

from __future__ import annotations

import json
from typing import Any

from .bsys import BFrame, BFrameHom, BSystem
from .cesys import CESystem
from .core import Arrow, FinCat, RootedTree
from .csys import CSystem
from .esys import ESystem, SliceFunctorT, TermCat
from .syntax import BindingSignature, Former, FormerArg

VERSION = 1


class LoadError(ValueError):
    pass


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# FinCat


def fincat_payload(c: FinCat) -> dict:
    return {
        "objects": sorted(c.objects),
        "arrows": [
            {"id": a.name, "dom": a.dom, "cod": a.cod}
            for _, a in sorted(c.arrows.items())
        ],
        "identity": dict(sorted(c.identity.items())),
        "compose": [[g, f, gf] for (g, f), gf in sorted(c.compose.items())],
        "terminal": c.terminal,
        "partial": c.partial,
    }


def fincat_load(p: dict) -> FinCat:
    objects = frozenset(p["objects"])
    arrows = {}
    for rec in p["arrows"]:
        if rec["dom"] not in objects or rec["cod"] not in objects:
            raise LoadError(f"arrow {rec['id']!r} has dangling endpoints")
        arrows[rec["id"]] = Arrow(rec["id"], rec["dom"], rec["cod"])
    for obj, i in p["identity"].items():
        if obj not in objects or i not in arrows:
            raise LoadError(f"identity entry {obj!r}: {i!r} dangling")
    compose = {}
    for g, f, gf in p["compose"]:
        if g not in arrows or f not in arrows or gf not in arrows:
            raise LoadError(f"compose entry ({g!r}, {f!r}) dangling")
        compose[(g, f)] = gf
    terminal = p.get("terminal")
    if terminal is not None and terminal not in objects:
        raise LoadError(f"terminal {terminal!r} not an object")
    return FinCat(
        objects=objects,
        arrows=arrows,
        identity=dict(p["identity"]),
        compose=compose,
        terminal=terminal,
        partial=bool(p.get("partial", False)),
    )


# ---------------------------------------------------------------------------
# trees and frames


def tree_payload(t: RootedTree) -> dict:
    return {
        "height": t.height,
        "levels": [sorted(l) for l in t.levels],
        "parent": [dict(sorted(m.items())) for m in t.parent],
    }


def tree_load(p: dict) -> RootedTree:
    levels = tuple(frozenset(l) for l in p["levels"])
    parent = tuple(dict(m) for m in p["parent"])
    for n, pm in enumerate(parent):
        for node, par in pm.items():
            if node not in levels[n + 1] or par not in levels[n]:
                raise LoadError(f"parent entry {node!r} -> {par!r} dangling")
    return RootedTree(height=p["height"], levels=levels, parent=parent)


def bframe_payload(b: BFrame) -> dict:
    return {
        "height": b.height,
        "B": [sorted(s) for s in b.B],
        "Bt": [sorted(s) for s in b.Bt[1:]],
        "ft": [dict(sorted(m.items())) for m in b.ft[1:]],
        "bd": [dict(sorted(m.items())) for m in b.bd[1:]],
    }


def bframe_load(p: dict) -> BFrame:
    height = p["height"]
    B = tuple(frozenset(s) for s in p["B"])
    Bt = (frozenset(),) + tuple(frozenset(s) for s in p["Bt"])
    ft = ({},) + tuple(dict(m) for m in p["ft"])
    bd = ({},) + tuple(dict(m) for m in p["bd"])
    if len(B) != height + 1 or len(Bt) != height + 1:
        raise LoadError("level family arity mismatch")
    for k in range(1, height + 1):
        for x, v in ft[k].items():
            if x not in B[k] or v not in B[k - 1]:
                raise LoadError(f"ft entry {x!r} dangling at level {k}")
        for x, v in bd[k].items():
            if x not in Bt[k] or v not in B[k]:
                raise LoadError(f"bd entry {x!r} dangling at level {k}")
    return BFrame(height=height, B=B, Bt=Bt, ft=ft, bd=bd)


def _bhom_payload(h: BFrameHom) -> dict:
    return {
        "H": {str(n): dict(sorted(m.items())) for n, m in sorted(h.H.items())},
        "Ht": {str(n): dict(sorted(m.items())) for n, m in sorted(h.Ht.items())},
    }


def _bhom_load(p: dict, src: BFrame, tgt: BFrame) -> BFrameHom:
    return BFrameHom(
        source=src,
        target=tgt,
        H={int(n): dict(m) for n, m in p["H"].items()},
        Ht={int(n): dict(m) for n, m in p["Ht"].items()},
    )


def bsystem_payload(b: BSystem) -> dict:
    return {
        "frame": bframe_payload(b.frame),
        "subst": [
            {"level": k, "element": x, "hom": _bhom_payload(h)}
            for (k, x), h in sorted(b.subst.items())
        ],
        "weak": [
            {"level": k, "element": x, "hom": _bhom_payload(h)}
            for (k, x), h in sorted(b.weak.items())
        ],
        "gen": [
            {"level": k, "element": x, "value": v}
            for (k, x), v in sorted(b.gen.items())
        ],
    }


def bsystem_load(p: dict) -> BSystem:
    from .bsys import slice_bframe

    frame = bframe_load(p["frame"])
    sys = BSystem(frame=frame)
    for rec in p["subst"]:
        k, x = rec["level"], rec["element"]
        if not (1 <= k <= frame.height) or x not in frame.Bt[k]:
            raise LoadError(f"substitution entry at ({k}, {x!r}) dangling")
        bdx = frame.bd[k][x]
        src = slice_bframe(frame, k, bdx)
        tgt = slice_bframe(frame, k - 1, frame.ft[k][bdx])
        sys.subst[(k, x)] = _bhom_load(rec["hom"], src, tgt)
    for rec in p["weak"]:
        k, x = rec["level"], rec["element"]
        if not (1 <= k <= frame.height) or x not in frame.B[k]:
            raise LoadError(f"weakening entry at ({k}, {x!r}) dangling")
        src = slice_bframe(frame, k - 1, frame.ft[k][x])
        tgt = slice_bframe(frame, k, x)
        sys.weak[(k, x)] = _bhom_load(rec["hom"], src, tgt)
    for rec in p["gen"]:
        k, x, v = rec["level"], rec["element"], rec["value"]
        if x not in frame.B[k] or k + 1 > frame.height or v not in frame.Bt[k + 1]:
            raise LoadError(f"generic element at ({k}, {x!r}) dangling")
        sys.gen[(k, x)] = v
    return sys


# ---------------------------------------------------------------------------
# E-systems


def _sfunctor_payload(sf: SliceFunctorT) -> dict:
    return {
        "source_apex": sf.source_apex,
        "target_apex": sf.target_apex,
        "obj": dict(sorted(sf.obj_map.items())),
        "mor": [[h, f, g, img] for (h, f, g), img in sorted(sf.mor_map.items())],
        "term": [
            [h, f, g, dict(sorted(tm.items()))]
            for (h, f, g), tm in sorted(sf.term_map.items())
        ],
    }


def _sfunctor_load(p: dict, cat: FinCat) -> SliceFunctorT:
    sf = SliceFunctorT(source_apex=p["source_apex"], target_apex=p["target_apex"])
    for x, y in p["obj"].items():
        if x not in cat.arrows or y not in cat.arrows:
            raise LoadError(f"slice functor object entry {x!r} dangling")
        sf.obj_map[x] = y
    for h, f, g, img in p["mor"]:
        for a in (h, f, g, img):
            if a not in cat.arrows:
                raise LoadError(f"slice functor morphism entry {a!r} dangling")
        sf.mor_map[(h, f, g)] = img
    for h, f, g, tm in p["term"]:
        sf.term_map[(h, f, g)] = dict(tm)
    return sf


def esystem_payload(e: ESystem) -> dict:
    return {
        "cat": fincat_payload(e.cat),
        "terms": {a: sorted(ts) for a, ts in sorted(e.tc.terms.items())},
        "subst": [
            {"arrow": a, "term": t, "functor": _sfunctor_payload(sf)}
            for (a, t), sf in sorted(e.subst.items())
        ],
        "weak": [
            {"arrow": a, "functor": _sfunctor_payload(sf)}
            for a, sf in sorted(e.weak.items())
        ],
        "proj": dict(sorted(e.proj.items())),
        "levels": dict(sorted(e.levels.items())) if e.levels is not None else None,
    }


def esystem_load(p: dict) -> ESystem:
    cat = fincat_load(p["cat"])
    terms = {}
    for a, ts in p["terms"].items():
        if a not in cat.arrows:
            raise LoadError(f"term set on dangling arrow {a!r}")
        terms[a] = frozenset(ts)
    e = ESystem(tc=TermCat(cat=cat, terms=terms))
    for rec in p["subst"]:
        a, t = rec["arrow"], rec["term"]
        if a not in cat.arrows or t not in terms.get(a, frozenset()):
            raise LoadError(f"substitution functor at ({a!r}, {t!r}) dangling")
        e.subst[(a, t)] = _sfunctor_load(rec["functor"], cat)
    for rec in p["weak"]:
        a = rec["arrow"]
        if a not in cat.arrows:
            raise LoadError(f"weakening functor at {a!r} dangling")
        e.weak[a] = _sfunctor_load(rec["functor"], cat)
    for a, t in p["proj"].items():
        if a not in cat.arrows:
            raise LoadError(f"identity term at {a!r} dangling")
        e.proj[a] = t
    if p.get("levels") is not None:
        e.levels = {x: int(v) for x, v in p["levels"].items()}
    return e


# ---------------------------------------------------------------------------
# C- and CE-systems


def csystem_payload(c: CSystem) -> dict:
    return {
        "cat": fincat_payload(c.cat),
        "one": c.one,
        "length": dict(sorted(c.length.items())),
        "ft": dict(sorted(c.ft.items())),
        "proj": dict(sorted(c.proj.items())),
        "pb": [[f, g, ob, q] for (f, g), (ob, q) in sorted(c.pb.items())],
    }


def csystem_load(p: dict) -> CSystem:
    cat = fincat_load(p["cat"])
    for x in p["length"]:
        if x not in cat.objects:
            raise LoadError(f"length entry {x!r} dangling")
    for x, v in p["ft"].items():
        if x not in cat.objects or v not in cat.objects:
            raise LoadError(f"ft entry {x!r} dangling")
    for x, v in p["proj"].items():
        if x not in cat.objects or v not in cat.arrows:
            raise LoadError(f"projection entry {x!r} dangling")
    pb = {}
    for f, g, ob, q in p["pb"]:
        if f not in cat.arrows or g not in cat.objects or ob not in cat.objects or q not in cat.arrows:
            raise LoadError(f"pullback entry ({f!r}, {g!r}) dangling")
        pb[(f, g)] = (ob, q)
    return CSystem(
        cat=cat,
        one=p["one"],
        length={x: int(v) for x, v in p["length"].items()},
        ft=dict(p["ft"]),
        proj=dict(p["proj"]),
        pb=pb,
    )


def cesystem_payload(a: CESystem) -> dict:
    return {
        "fam": fincat_payload(a.fam),
        "base": fincat_payload(a.base),
        "ifun": dict(sorted(a.ifun.items())),
        "root": a.root,
        "pb": [[f, A, fA, pi2] for (f, A), (fA, pi2) in sorted(a.pb.items())],
    }


def cesystem_load(p: dict) -> CESystem:
    fam = fincat_load(p["fam"])
    base = fincat_load(p["base"])
    for c, v in p["ifun"].items():
        if c not in fam.arrows or v not in base.arrows:
            raise LoadError(f"ifun entry {c!r} dangling")
    if p["root"] not in fam.objects:
        raise LoadError(f"root {p['root']!r} not an object")
    pb = {}
    for f, A, fA, pi2 in p["pb"]:
        if f not in base.arrows or A not in fam.arrows or fA not in fam.arrows or pi2 not in base.arrows:
            raise LoadError(f"pullback entry ({f!r}, {A!r}) dangling")
        pb[(f, A)] = (fA, pi2)
    return CESystem(fam=fam, base=base, ifun=dict(p["ifun"]), root=p["root"], pb=pb)


# ---------------------------------------------------------------------------
# signatures


def signature_payload(sig: BindingSignature) -> dict:
    def formers(fs):
        return [
            {"name": f.name, "args": [[a.sort, a.binders] for a in f.args]}
            for f in fs
        ]

    return {"types": formers(sig.type_formers), "terms": formers(sig.term_formers)}


def signature_load(p: dict) -> BindingSignature:
    def formers(recs):
        out = []
        for rec in recs:
            args = tuple(FormerArg(sort=s, binders=int(k)) for s, k in rec["args"])
            for a in args:
                if a.sort not in ("ty", "tm"):
                    raise LoadError(f"bad sort {a.sort!r}")
            out.append(Former(name=rec["name"], args=args))
        return tuple(out)

    return BindingSignature(type_formers=formers(p["types"]), term_formers=formers(p["terms"]))


# ---------------------------------------------------------------------------
# documents

_SAVERS = {
    RootedTree: ("tree", tree_payload),
    BFrame: ("bframe", bframe_payload),
    BSystem: ("bsystem", bsystem_payload),
    ESystem: ("esystem", esystem_payload),
    CSystem: ("csystem", csystem_payload),
    CESystem: ("cesystem", cesystem_payload),
    BindingSignature: ("signature", signature_payload),
}

_LOADERS = {
    "tree": tree_load,
    "bframe": bframe_load,
    "bsystem": bsystem_load,
    "esystem": esystem_load,
    "csystem": csystem_load,
    "cesystem": cesystem_load,
    "signature": signature_load,
}


def save_structure(obj: Any) -> str:
    for typ, (kind, payload) in _SAVERS.items():
        if isinstance(obj, typ):
            return dumps({"kind": kind, "version": VERSION, "payload": payload(obj)})
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load_structure(text: str, expect_kind: str | None = None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LoadError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "kind" not in doc:
        raise LoadError("document has no kind tag")
    kind = doc["kind"]
    if doc.get("version") != VERSION:
        raise LoadError(f"unsupported version {doc.get('version')!r}")
    if expect_kind is not None and kind != expect_kind:
        raise LoadError(f"expected kind {expect_kind!r}, found {kind!r}")
    loader = _LOADERS.get(kind)
    if loader is None:
        raise LoadError(f"unknown kind {kind!r}")
    return kind, loader(doc["payload"])
