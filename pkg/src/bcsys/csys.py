"""C-systems: length, father, canonical projections, chosen pullbacks.

The pullback table is explicit data keyed by (arrow id, object id);
universality is re-verified by enumerating all competing cones in the
finite category. Entries whose result would fall outside the object set
of a truncated presentation may be absent and are skipped with a count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import FinCat, FunctorData, validate_fincat, validate_functor
from .report import Report, Truncated


@dataclass
class CSystem:
    cat: FinCat
    one: str
    length: dict[str, int]
    ft: dict[str, str]
    proj: dict[str, str] = field(default_factory=dict)
    pb: dict[tuple[str, str], tuple[str, str]] = field(default_factory=dict)


@dataclass
class CSystemHom:
    source: CSystem
    target: CSystem
    functor: FunctorData


def check_pullback_square(
    cat: FinCat,
    top: str,
    left: str,
    right: str,
    bottom: str,
    rep: Report,
    law: str,
    witness: tuple,
) -> None:
    """Commutation and universality of one candidate square, brute force.

    top: P -> X, left: P -> Y, right: X -> Z, bottom: Y -> Z.
    """
    try:
        if cat.comp(right, top) != cat.comp(bottom, left):
            rep.fail(law, witness, "square does not commute")
            return
    except Truncated:
        rep.skip(law)
        return
    P = cat.dom(top)
    X, Y = cat.cod(top), cat.cod(left)
    for Z0 in sorted(cat.objects):
        for u in cat.hom(Z0, X):
            for v in cat.hom(Z0, Y):
                try:
                    if cat.comp(right, u) != cat.comp(bottom, v):
                        continue
                except Truncated:
                    rep.skip(law)
                    continue
                rep.tick(law)
                mediators = []
                try:
                    for w in cat.hom(Z0, P):
                        if cat.comp(top, w) == u and cat.comp(left, w) == v:
                            mediators.append(w)
                except Truncated:
                    rep.skip(law)
                    continue
                if len(mediators) != 1:
                    rep.fail(
                        law,
                        witness + (Z0, u, v),
                        f"{len(mediators)} mediating arrows",
                    )


def validate_csystem(c: CSystem) -> Report:
    """The seven C-system axioms, pullback universality included."""
    rep = Report()
    rep.merge(validate_fincat(c.cat), prefix="cat:")
    cat = c.cat
    for law in ("i", "ii", "iii", "iv", "v", "vi", "vii", "coverage"):
        rep.law(law)

    rep.tick("i")
    zero = {x for x, n in c.length.items() if n == 0}
    if zero != {c.one}:
        rep.fail("i", (tuple(sorted(zero)),), "length 0 objects are not exactly the unit")
    for x in sorted(cat.objects):
        if x not in c.length:
            rep.fail("i", (x,), "object has no length")

    for x in sorted(cat.objects):
        if c.length.get(x, 0) > 0:
            rep.tick("ii")
            fx = c.ft.get(x)
            if fx is None:
                rep.fail("ii", (x,), "no father")
            elif c.length.get(fx) != c.length[x] - 1:
                rep.fail("ii", (x, fx), "father length wrong")

    rep.tick("iii")
    if c.ft.get(c.one) != c.one:
        rep.fail("iii", (c.one,), "ft(1) != 1")

    for x in sorted(cat.objects):
        rep.tick("iv")
        arrs = cat.hom(x, c.one)
        if len(arrs) != 1:
            rep.fail("iv", (x, tuple(arrs)), "unit is not terminal")

    for x in sorted(cat.objects):
        if c.length.get(x, 0) > 0:
            rep.tick("v")
            p = c.proj.get(x)
            if p is None:
                if cat.partial:
                    rep.skip("v")
                else:
                    rep.fail("v", (x,), "no canonical projection")
                continue
            if cat.dom(p) != x or cat.cod(p) != c.ft[x]:
                rep.fail("v", (x, p), "projection endpoints wrong")

    # chosen pullbacks: coverage plus the pullback property
    for gamma in sorted(cat.objects):
        if c.length.get(gamma, 0) == 0:
            continue
        base = c.ft[gamma]
        for f in cat.arrows:
            if cat.cod(f) != base:
                continue
            rep.tick("coverage")
            entry = c.pb.get((f, gamma))
            if entry is None:
                rep.skip("coverage")
                continue
            ob, q = entry
            rep.tick("v")
            if ob not in cat.objects or q not in cat.arrows:
                rep.fail("v", (f, gamma), "pullback entry dangling")
                continue
            if c.ft.get(ob) != cat.dom(f):
                rep.fail("v", (f, gamma, ob), "ft(f*G) != dom(f)")
                continue
            if c.length.get(ob, 0) <= 0:
                rep.fail("v", (f, gamma, ob), "f*G has length 0")
                continue
            p_ob = c.proj.get(ob)
            p_g = c.proj.get(gamma)
            if p_ob is None or p_g is None:
                rep.skip("v")
                continue
            if cat.dom(q) != ob or cat.cod(q) != gamma:
                rep.fail("v", (f, gamma, q), "q endpoints wrong")
                continue
            check_pullback_square(cat, q, p_ob, p_g, f, rep, "v", (f, gamma))

    for gamma in sorted(cat.objects):
        if c.length.get(gamma, 0) == 0:
            continue
        base = c.ft[gamma]
        rep.tick("vi")
        try:
            ident = cat.id_of(base)
        except Truncated:
            rep.skip("vi")
            continue
        entry = c.pb.get((ident, gamma))
        if entry is None:
            rep.skip("vi")
        else:
            try:
                expected = (gamma, cat.id_of(gamma))
            except Truncated:
                rep.skip("vi")
                continue
            if entry != expected:
                rep.fail("vi", (gamma,), f"id pullback is {entry!r}")

    for (f, gamma), (ob_f, q_f) in sorted(c.pb.items()):
        delta = c.cat.dom(f)
        for g in sorted(cat.arrows):
            if cat.cod(g) != delta:
                continue
            rep.tick("vii")
            try:
                fg = cat.comp(f, g)
            except Truncated:
                rep.skip("vii")
                continue
            lhs = c.pb.get((fg, gamma))
            inner = c.pb.get((g, ob_f))
            if lhs is None or inner is None:
                rep.skip("vii")
                continue
            ob_g, q_g = inner
            try:
                composite_q = cat.comp(q_f, q_g)
            except Truncated:
                rep.skip("vii")
                continue
            if lhs != (ob_g, composite_q):
                rep.fail("vii", (f, g, gamma), f"{lhs!r} != {(ob_g, composite_q)!r}")
    return rep


def validate_csystem_hom(h: CSystemHom) -> Report:
    """Conditions (i)-(v) for a morphism of C-systems, exhaustively."""
    rep = Report()
    rep.merge(validate_functor(h.functor), prefix="functor:")
    src, tgt, F = h.source, h.target, h.functor
    for law in ("hom-i", "hom-ii", "hom-iii", "hom-iv", "hom-v"):
        rep.law(law)

    rep.tick("hom-i")
    if F.object_map.get(src.one) != tgt.one:
        rep.fail("hom-i", (src.one,), "unit not preserved")

    for x in sorted(src.cat.objects):
        rep.tick("hom-ii")
        img = F.object_map.get(x)
        if img is None or tgt.length.get(img) != src.length.get(x):
            rep.fail("hom-ii", (x,), "length not preserved")
        rep.tick("hom-iii")
        if img is not None and src.length.get(x, 0) > 0:
            if F.object_map.get(src.ft[x]) != tgt.ft.get(img):
                rep.fail("hom-iii", (x,), "father not preserved")
        if src.length.get(x, 0) > 0:
            rep.tick("hom-iv")
            p = src.proj.get(x)
            if p is None or img is None:
                rep.skip("hom-iv")
            elif F.arrow_map.get(p) != tgt.proj.get(img):
                rep.fail("hom-iv", (x,), "projection not preserved")

    for (f, gamma), (ob, q) in sorted(src.pb.items()):
        rep.tick("hom-v")
        fi = F.arrow_map.get(f)
        gi = F.object_map.get(gamma)
        if fi is None or gi is None:
            rep.skip("hom-v")
            continue
        entry = tgt.pb.get((fi, gi))
        if entry is None:
            rep.skip("hom-v")
            continue
        if entry != (F.object_map.get(ob), F.arrow_map.get(q)):
            rep.fail("hom-v", (f, gamma), f"pullback image {entry!r}")
    return rep
