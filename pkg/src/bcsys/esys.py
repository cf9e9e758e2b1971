"""E-systems: term structure, substitution, weakening, projections.

An E-system is a strict category with a chosen terminal object, a set of
terms for each arrow, and three families of slice functors: substitution
S_x for each term x, weakening W_A for each arrow A, and identity terms
1_A. The five axioms and the derived pairing calculus live here.

Slice functors are explicit tables. A slice morphism over an apex is the
triple (underlying arrow, source object, target object); term maps are
indexed by those triples. On height-truncated systems some table entries
legitimately do not exist; every check in this module compares on the
maximal common defined domain and counts the rest as skipped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import Arrow, FinCat, FunctorData, validate_fincat, validate_functor
from .report import Report, Truncated

SliceMor = tuple[str, str, str]  # (underlying arrow, source object, target object)


@dataclass
class TermCat:
    cat: FinCat
    terms: dict[str, frozenset[str]] = field(default_factory=dict)

    def T(self, a: str) -> frozenset[str]:
        return self.terms.get(a, frozenset())


@dataclass
class SliceFunctorT:
    """A functor with term structure between two slices of the same category."""

    source_apex: str
    target_apex: str
    obj_map: dict[str, str] = field(default_factory=dict)
    mor_map: dict[SliceMor, str] = field(default_factory=dict)
    term_map: dict[SliceMor, dict[str, str]] = field(default_factory=dict)


@dataclass
class ESystem:
    tc: TermCat
    subst: dict[tuple[str, str], SliceFunctorT] = field(default_factory=dict)
    weak: dict[str, SliceFunctorT] = field(default_factory=dict)
    proj: dict[str, str] = field(default_factory=dict)
    levels: dict[str, int] | None = None

    @property
    def cat(self) -> FinCat:
        return self.tc.cat

    def T(self, a: str) -> frozenset[str]:
        return self.tc.T(a)


@dataclass
class EHom:
    """A functor with term structure between two E-systems."""

    source: ESystem
    target: ESystem
    functor: FunctorData
    term_map: dict[str, dict[str, str]] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# slice plumbing


def slice_objects(cat: FinCat, apex: str) -> list[str]:
    return cat.arrows_into(apex)


def slice_mors(cat: FinCat, apex: str) -> list[SliceMor]:
    out: list[SliceMor] = []
    objs = slice_objects(cat, apex)
    for f in objs:
        for g in objs:
            for h in cat.hom(cat.dom(f), cat.dom(g)):
                if cat.compose.get((g, h)) == f:
                    out.append((h, f, g))
    return out


def terminal_mor(cat: FinCat, u: str, apex: str) -> SliceMor:
    """The canonical slice morphism from object u to the slice terminal."""
    return (u, u, cat.id_of(apex))


def identity_sf(e: ESystem, apex: str) -> SliceFunctorT:
    cat = e.cat
    sf = SliceFunctorT(source_apex=apex, target_apex=apex)
    for f in slice_objects(cat, apex):
        sf.obj_map[f] = f
    for m in slice_mors(cat, apex):
        sf.mor_map[m] = m[0]
        sf.term_map[m] = {t: t for t in e.T(m[0])}
    return sf


def compose_sf(e: ESystem, g: SliceFunctorT, f: SliceFunctorT) -> SliceFunctorT:
    """g after f; entries undefined anywhere along the way are omitted."""
    out = SliceFunctorT(source_apex=f.source_apex, target_apex=g.target_apex)
    for x, y in f.obj_map.items():
        if y in g.obj_map:
            out.obj_map[x] = g.obj_map[y]
    for (h, a, b), h1 in f.mor_map.items():
        fa, fb = f.obj_map.get(a), f.obj_map.get(b)
        if fa is None or fb is None:
            continue
        key1 = (h1, fa, fb)
        h2 = g.mor_map.get(key1)
        if h2 is None:
            continue
        out.mor_map[(h, a, b)] = h2
        t1 = f.term_map.get((h, a, b), {})
        t2 = g.term_map.get(key1, {})
        out.term_map[(h, a, b)] = {
            t: t2[u] for t, u in t1.items() if u in t2
        }
    return out


def restrict_sf(e: ESystem, F: SliceFunctorT, P: str) -> SliceFunctorT:
    """F/P: the functor induced between slices over dom(P) and dom(F(P)).

    Uses the canonical identification of a slice of a slice with the slice
    at the domain; every entry is read off F's tables at morphisms over P.
    """
    cat = e.cat
    if P not in F.obj_map:
        raise Truncated(f"restrict: {P!r} not in obj_map")
    out = SliceFunctorT(
        source_apex=cat.dom(P), target_apex=cat.dom(F.obj_map[P])
    )
    for q in slice_objects(cat, cat.dom(P)):
        pq = cat.compose.get((P, q))
        if pq is None:
            continue
        img = F.mor_map.get((q, pq, P))
        if img is not None:
            out.obj_map[q] = img
    for (h, q1, q2) in slice_mors(cat, cat.dom(P)):
        pq1 = cat.compose.get((P, q1))
        pq2 = cat.compose.get((P, q2))
        if pq1 is None or pq2 is None:
            continue
        img = F.mor_map.get((h, pq1, pq2))
        if img is None:
            continue
        out.mor_map[(h, q1, q2)] = img
        out.term_map[(h, q1, q2)] = dict(F.term_map.get((h, pq1, pq2), {}))
    return out


def term_action_at(e: ESystem, F: SliceFunctorT, u: str) -> dict[str, str] | None:
    """F's action on the terms of a slice object u (an arrow into the apex)."""
    try:
        key = terminal_mor(e.cat, u, F.source_apex)
    except Truncated:
        return None
    return F.term_map.get(key)


def sf_equal(f: SliceFunctorT, g: SliceFunctorT) -> tuple[list[tuple], int, int]:
    """Compare two slice functors on the common defined domain."""
    bad: list[tuple] = []
    skipped = 0
    checked = 0
    for x in sorted(set(f.obj_map) | set(g.obj_map)):
        if x in f.obj_map and x in g.obj_map:
            checked += 1
            if f.obj_map[x] != g.obj_map[x]:
                bad.append(("obj", x, f.obj_map[x], g.obj_map[x]))
        else:
            skipped += 1
    for m in sorted(set(f.mor_map) | set(g.mor_map)):
        if m in f.mor_map and m in g.mor_map:
            checked += 1
            if f.mor_map[m] != g.mor_map[m]:
                bad.append(("mor", m, f.mor_map[m], g.mor_map[m]))
        else:
            skipped += 1
    keys = set(f.term_map) | set(g.term_map)
    for m in sorted(keys):
        ft, gt = f.term_map.get(m), g.term_map.get(m)
        if ft is None or gt is None:
            skipped += 1
            continue
        for t in sorted(set(ft) | set(gt)):
            if t in ft and t in gt:
                checked += 1
                if ft[t] != gt[t]:
                    bad.append(("term", m, t, ft[t], gt[t]))
            else:
                skipped += 1
    return bad, skipped, checked


def validate_sfunctor(e: ESystem, F: SliceFunctorT, rep: Report, law: str) -> None:
    """Functor-with-term-structure laws for one slice functor."""
    cat = e.cat
    src_objs = set(slice_objects(cat, F.source_apex))
    tgt_objs = set(slice_objects(cat, F.target_apex))
    for x, y in sorted(F.obj_map.items()):
        rep.tick(law)
        if x not in src_objs or y not in tgt_objs:
            rep.fail(law, (x, y), "object map endpoints wrong")
    for (h, a, b), h1 in sorted(F.mor_map.items()):
        rep.tick(law)
        fa, fb = F.obj_map.get(a), F.obj_map.get(b)
        if fa is None or fb is None:
            rep.skip(law)
            continue
        if cat.compose.get((fb, h1)) != fa:
            rep.fail(law, (h, a, b), "image does not commute over the apex")
    # identities and composition
    for a in sorted(F.obj_map):
        rep.tick(law)
        try:
            ida = cat.id_of(cat.dom(a))
            key = (ida, a, a)
            img = F.mor_map.get(key)
            if img is None:
                rep.skip(law)
            elif img != cat.id_of(cat.dom(F.obj_map[a])):
                rep.fail(law, (a,), "identity not preserved")
        except Truncated:
            rep.skip(law)
    mors = set(F.mor_map)
    for (h1, a, b) in sorted(mors):
        for (h2, b2, c) in sorted(mors):
            if b2 != b:
                continue
            rep.tick(law)
            try:
                hh = cat.comp(h2, h1)
            except Truncated:
                rep.skip(law)
                continue
            lhs = F.mor_map.get((hh, a, c))
            i1, i2 = F.mor_map[(h1, a, b)], F.mor_map[(h2, b, c)]
            try:
                rhs = cat.comp(i2, i1)
            except Truncated:
                rep.skip(law)
                continue
            if lhs is None:
                rep.skip(law)
            elif lhs != rhs:
                rep.fail(law, (h2, h1, a), "composition not preserved")
    # term maps land in the right sets
    for m, tm in sorted(F.term_map.items()):
        img = F.mor_map.get(m)
        for t, u in sorted(tm.items()):
            rep.tick(law)
            if t not in e.T(m[0]):
                rep.fail(law, (m, t), "term map key not a term")
            elif img is None or u not in e.T(img):
                rep.fail(law, (m, t, u), "term image outside target term set")


# ---------------------------------------------------------------------------
# the slice-level homomorphism conditions

def _ehom_part(e: ESystem, H: SliceFunctorT, part: str, rep: Report, law: str) -> None:
    """One of the pre-E-homomorphism conditions for a slice functor H.

    part "sub": H commutes with substitution on slices of its source.
    part "weak": H commutes with weakening.
    part "proj": H preserves identity terms.
    """
    cat = e.cat
    delta = H.source_apex
    for P in slice_objects(cat, delta):
        if P not in H.obj_map:
            rep.skip(law)
            continue
        try:
            HP = restrict_sf(e, H, P)
        except Truncated:
            rep.skip(law)
            continue
        for Q in slice_objects(cat, cat.dom(P)):
            PQ = cat.compose.get((P, Q))
            if PQ is None:
                rep.skip(law)
                continue
            key = (Q, PQ, P)
            Qimg = H.mor_map.get(key)
            if Qimg is None:
                rep.skip(law)
                continue
            try:
                HPQ = restrict_sf(e, H, PQ)
            except Truncated:
                rep.skip(law)
                continue
            if part == "sub":
                for y in sorted(e.T(Q)):
                    rep.tick(law)
                    Sy = e.subst.get((Q, y))
                    yimg = H.term_map.get(key, {}).get(y)
                    Syi = e.subst.get((Qimg, yimg)) if yimg is not None else None
                    if Sy is None or Syi is None:
                        rep.skip(law)
                        continue
                    lhs = compose_sf(e, HP, Sy)
                    rhs = compose_sf(e, Syi, HPQ)
                    bad, skipped, _ = sf_equal(lhs, rhs)
                    rep.skip(law, skipped)
                    for w in bad:
                        rep.fail(law, (P, Q, y) + w)
            elif part == "weak":
                rep.tick(law)
                WQ = e.weak.get(Q)
                Wi = e.weak.get(Qimg)
                if WQ is None or Wi is None:
                    rep.skip(law)
                    continue
                lhs = compose_sf(e, Wi, HP)
                rhs = compose_sf(e, HPQ, WQ)
                bad, skipped, _ = sf_equal(lhs, rhs)
                rep.skip(law, skipped)
                for w in bad:
                    rep.fail(law, (P, Q) + w)
            else:  # proj
                rep.tick(law)
                oneQ = e.proj.get(Q)
                onei = e.proj.get(Qimg)
                WQ = e.weak.get(Q)
                if oneQ is None or onei is None or WQ is None:
                    rep.skip(law)
                    continue
                u = WQ.obj_map.get(Q)
                if u is None:
                    rep.skip(law)
                    continue
                act = term_action_at(e, HPQ, u)
                if act is None or oneQ not in act:
                    rep.skip(law)
                    continue
                if act[oneQ] != onei:
                    rep.fail(law, (P, Q), f"H(1) = {act[oneQ]!r}, expected {onei!r}")


# ---------------------------------------------------------------------------
# validation of E-systems

E_LAWS = (
    "terminal",
    "coverage",
    "subst-functor",
    "subst-system",
    "weak-functor",
    "weak-system",
    "proj-system",
    "e-axiom-1",
    "e-axiom-2",
    "e-axiom-3",
    "e-axiom-4",
    "e-axiom-5",
)


def validate_esystem(e: ESystem) -> Report:
    """Check every law of an E-system, reporting each one separately.

    Failures carry witnesses; instances that fall outside the truncation
    are skipped and counted. A missing terminal object is reported as
    absent structure, distinct from any failed equation.
    """
    rep = Report()
    rep.merge(validate_fincat(e.cat), prefix="cat:")
    cat = e.cat
    for law in E_LAWS:
        rep.law(law)

    for a in sorted(e.tc.terms):
        rep.tick("terms")
        if a not in cat.arrows:
            rep.fail("terms", (a,), "term set on a non-arrow")

    if cat.terminal is None:
        rep.miss("terminal", "no chosen terminal object")
    else:
        rep.tick("terminal")

    arrows = sorted(cat.arrows)

    # structure coverage and per-functor validity
    for A in arrows:
        for x in sorted(e.T(A)):
            rep.tick("coverage")
            sx = e.subst.get((A, x))
            if sx is None:
                if cat.partial:
                    rep.skip("coverage")
                else:
                    rep.fail("coverage", (A, x), "missing substitution functor")
                continue
            validate_sfunctor(e, sx, rep, "subst-functor")
            rep.tick("subst-functor")
            try:
                ids, idt = cat.id_of(cat.dom(A)), cat.id_of(cat.cod(A))
            except Truncated:
                rep.skip("subst-functor")
                continue
            if sx.obj_map.get(ids) != idt:
                rep.fail("subst-functor", (A, x), "S_x(id) != id")
        rep.tick("coverage")
        wa = e.weak.get(A)
        if wa is None:
            if cat.partial:
                rep.skip("coverage")
            else:
                rep.fail("coverage", (A,), "missing weakening functor")
            continue
        validate_sfunctor(e, wa, rep, "weak-functor")
        rep.tick("weak-functor")
        try:
            ids = cat.id_of(cat.cod(A))
            if wa.obj_map.get(ids) != cat.id_of(cat.dom(A)):
                rep.fail("weak-functor", (A,), "W_A does not preserve the slice terminal")
        except Truncated:
            rep.skip("weak-functor")
        # identity terms live where W_A(A) exists
        rep.tick("coverage")
        if A not in e.proj:
            if wa.obj_map.get(A) is not None and not cat.partial:
                rep.fail("coverage", (A,), "missing identity term")
            else:
                rep.skip("coverage")
        else:
            pos = wa.obj_map.get(A)
            rep.tick("proj-system")
            if pos is None:
                rep.skip("proj-system")
            elif e.proj[A] not in e.T(pos):
                rep.fail("proj-system", (A,), "identity term outside T(W_A(A))")

    # weakening is functorial in the arrow
    for X in sorted(cat.objects):
        rep.tick("weak-functor")
        try:
            ida = cat.id_of(X)
        except Truncated:
            rep.skip("weak-functor")
            continue
        wid = e.weak.get(ida)
        if wid is None:
            rep.skip("weak-functor")
            continue
        bad, skipped, _ = sf_equal(wid, identity_sf(e, X))
        rep.skip("weak-functor", skipped)
        for w in bad:
            rep.fail("weak-functor", (X,) + w, "W_id != id")
    for A in arrows:
        for P in slice_objects(cat, cat.dom(A)):
            rep.tick("weak-functor")
            AP = cat.compose.get((A, P))
            wa, wp = e.weak.get(A), e.weak.get(P)
            wap = e.weak.get(AP) if AP is not None else None
            if wa is None or wp is None or wap is None:
                rep.skip("weak-functor")
                continue
            bad, skipped, _ = sf_equal(wap, compose_sf(e, wp, wa))
            rep.skip("weak-functor", skipped)
            for w in bad:
                rep.fail("weak-functor", (A, P) + w, "W_{A.P} != W_P . W_A")

    # slice-level homomorphism laws
    for (A, x), sx in sorted(e.subst.items()):
        _ehom_part(e, sx, "sub", rep, "subst-system")
        _ehom_part(e, sx, "weak", rep, "e-axiom-1")
        _ehom_part(e, sx, "proj", rep, "e-axiom-1")
    for A, wa in sorted(e.weak.items()):
        _ehom_part(e, wa, "weak", rep, "weak-system")
        _ehom_part(e, wa, "proj", rep, "proj-system")
        _ehom_part(e, wa, "sub", rep, "e-axiom-2")

    # axiom 3: S_x . W_A = id
    for (A, x), sx in sorted(e.subst.items()):
        rep.tick("e-axiom-3")
        wa = e.weak.get(A)
        if wa is None:
            rep.skip("e-axiom-3")
            continue
        bad, skipped, _ = sf_equal(
            compose_sf(e, sx, wa), identity_sf(e, cat.cod(A))
        )
        rep.skip("e-axiom-3", skipped)
        for w in bad:
            rep.fail("e-axiom-3", (A, x) + w)

    # axiom 4: S_x(1_A) = x
    for (A, x), sx in sorted(e.subst.items()):
        rep.tick("e-axiom-4")
        wa = e.weak.get(A)
        one = e.proj.get(A)
        u = wa.obj_map.get(A) if wa is not None else None
        if one is None or u is None:
            rep.skip("e-axiom-4")
            continue
        act = term_action_at(e, sx, u)
        if act is None or one not in act:
            rep.skip("e-axiom-4")
            continue
        if act[one] != x:
            rep.fail("e-axiom-4", (A, x), f"S_x(1_A) = {act[one]!r}")

    # axiom 5: S_{1_A} . (W_A / A) = id on the slice over dom(A)
    for A in arrows:
        rep.tick("e-axiom-5")
        wa = e.weak.get(A)
        one = e.proj.get(A)
        if wa is None or one is None:
            rep.skip("e-axiom-5")
            continue
        u = wa.obj_map.get(A)
        s1 = e.subst.get((u, one)) if u is not None else None
        if s1 is None:
            rep.skip("e-axiom-5")
            continue
        try:
            waa = restrict_sf(e, wa, A)
        except Truncated:
            rep.skip("e-axiom-5")
            continue
        bad, skipped, _ = sf_equal(
            compose_sf(e, s1, waa), identity_sf(e, cat.dom(A))
        )
        rep.skip("e-axiom-5", skipped)
        for w in bad:
            rep.fail("e-axiom-5", (A,) + w)

    if e.levels is not None:
        _check_stratified(e, rep)
    return rep


def _check_stratified(e: ESystem, rep: Report) -> None:
    cat = e.cat
    lv = e.levels
    for x in sorted(cat.objects):
        rep.tick("stratified")
        if x not in lv:
            rep.fail("stratified", (x,), "object has no level")
    if cat.terminal is not None and lv.get(cat.terminal) != 0:
        rep.fail("stratified", (cat.terminal,), "terminal not at level 0")
    for a in sorted(cat.arrows):
        rep.tick("stratified")
        d, c = lv.get(cat.dom(a)), lv.get(cat.cod(a))
        if d is None or c is None:
            continue
        if d < c:
            rep.fail("stratified", (a,), "arrow raises level")
        if d == c and not cat.is_id(a):
            rep.fail("stratified", (a,), "level-preserving non-identity arrow")
    def functor_level_ok(F: SliceFunctorT, tag: tuple) -> None:
        off_s = lv.get(F.source_apex)
        off_t = lv.get(F.target_apex)
        for q, q1 in sorted(F.obj_map.items()):
            rep.tick("stratified")
            if lv[cat.dom(q)] - off_s != lv[cat.dom(q1)] - off_t:
                rep.fail("stratified", tag + (q,), "slice functor not stratified")
    for (A, x), sx in sorted(e.subst.items()):
        functor_level_ok(sx, ("S", A, x))
    for A, wa in sorted(e.weak.items()):
        functor_level_ok(wa, ("W", A))


# ---------------------------------------------------------------------------
# E-homomorphisms between whole systems


def slice_of_ehom(h: EHom, gamma: str) -> SliceFunctorT:
    """The restriction H/Gamma of a global homomorphism to a slice."""
    cat = h.source.cat
    out = SliceFunctorT(source_apex=gamma, target_apex=h.functor.object_map[gamma])
    for a in slice_objects(cat, gamma):
        img = h.functor.arrow_map.get(a)
        if img is not None:
            out.obj_map[a] = img
    for m in slice_mors(cat, gamma):
        img = h.functor.arrow_map.get(m[0])
        if img is None:
            continue
        out.mor_map[m] = img
        out.term_map[m] = dict(h.term_map.get(m[0], {}))
    return out


def validate_ehom(h: EHom) -> Report:
    """Functor + term structure + substitution/weakening/projection preservation."""
    rep = Report()
    rep.merge(validate_functor(h.functor), prefix="functor:")
    src, tgt = h.source, h.target
    cat, cat2 = src.cat, tgt.cat

    rep.law("terminal")
    if cat.terminal is not None and cat2.terminal is not None:
        rep.tick("terminal")
        if h.functor.object_map.get(cat.terminal) != cat2.terminal:
            rep.fail("terminal", (cat.terminal,), "terminal not preserved")

    for a in sorted(cat.arrows):
        img = h.functor.arrow_map.get(a)
        tm = h.term_map.get(a, {})
        for t in sorted(src.T(a)):
            rep.tick("term-map")
            if t not in tm:
                rep.skip("term-map")
            elif img is None or tm[t] not in tgt.T(img):
                rep.fail("term-map", (a, t), "term image outside target term set")

    for law in ("preserve-sub", "preserve-weak", "preserve-proj"):
        rep.law(law)

    for gamma in sorted(cat.objects):
        if gamma not in h.functor.object_map:
            continue
        hg = slice_of_ehom(h, gamma)
        for A in slice_objects(cat, gamma):
            Aimg = h.functor.arrow_map.get(A)
            if Aimg is None:
                rep.skip("preserve-sub")
                continue
            try:
                ha = slice_of_ehom(h, cat.dom(A))
            except KeyError:
                rep.skip("preserve-sub")
                continue
            for x in sorted(src.T(A)):
                rep.tick("preserve-sub")
                sx = src.subst.get((A, x))
                ximg = h.term_map.get(A, {}).get(x)
                sxi = tgt.subst.get((Aimg, ximg)) if ximg is not None else None
                if sx is None or sxi is None:
                    rep.skip("preserve-sub")
                    continue
                bad, skipped, _ = sf_equal(
                    compose_sf(src, hg, sx), compose_sf(src, sxi, ha)
                )
                rep.skip("preserve-sub", skipped)
                for w in bad:
                    rep.fail("preserve-sub", (gamma, A, x) + w)
            rep.tick("preserve-weak")
            wa = src.weak.get(A)
            wi = tgt.weak.get(Aimg)
            if wa is None or wi is None:
                rep.skip("preserve-weak")
            else:
                bad, skipped, _ = sf_equal(
                    compose_sf(src, ha, wa), compose_sf(src, wi, hg)
                )
                rep.skip("preserve-weak", skipped)
                for w in bad:
                    rep.fail("preserve-weak", (gamma, A) + w)
            rep.tick("preserve-proj")
            one = src.proj.get(A)
            onei = tgt.proj.get(Aimg)
            if one is None or onei is None or wa is None:
                rep.skip("preserve-proj")
                continue
            pos = wa.obj_map.get(A)
            if pos is None:
                rep.skip("preserve-proj")
                continue
            img = h.term_map.get(pos, {}).get(one)
            if img is None:
                rep.skip("preserve-proj")
            elif img != onei:
                rep.fail("preserve-proj", (gamma, A), f"H(1_A) = {img!r}")
    return rep


def identity_ehom(e: ESystem) -> EHom:
    from .core import identity_functor

    return EHom(
        source=e,
        target=e,
        functor=identity_functor(e.cat),
        term_map={a: {t: t for t in e.T(a)} for a in e.cat.arrows},
    )


def compose_ehom(g: EHom, f: EHom) -> EHom:
    from .core import compose_functors

    term_map: dict[str, dict[str, str]] = {}
    for a, tm in f.term_map.items():
        img = f.functor.arrow_map.get(a)
        gm = g.term_map.get(img, {}) if img is not None else {}
        term_map[a] = {t: gm[u] for t, u in tm.items() if u in gm}
    return EHom(
        source=f.source,
        target=g.target,
        functor=compose_functors(g.functor, f.functor),
        term_map=term_map,
    )


def ehom_equal(f: EHom, g: EHom) -> tuple[list[tuple], int, int]:
    bad: list[tuple] = []
    skipped = 0
    checked = 0
    for x in sorted(set(f.functor.object_map) | set(g.functor.object_map)):
        a, b = f.functor.object_map.get(x), g.functor.object_map.get(x)
        if a is None or b is None:
            skipped += 1
        else:
            checked += 1
            if a != b:
                bad.append(("obj", x, a, b))
    for x in sorted(set(f.functor.arrow_map) | set(g.functor.arrow_map)):
        a, b = f.functor.arrow_map.get(x), g.functor.arrow_map.get(x)
        if a is None or b is None:
            skipped += 1
        else:
            checked += 1
            if a != b:
                bad.append(("arrow", x, a, b))
    for a in sorted(set(f.term_map) | set(g.term_map)):
        fm, gm = f.term_map.get(a, {}), g.term_map.get(a, {})
        for t in sorted(set(fm) | set(gm)):
            if t in fm and t in gm:
                checked += 1
                if fm[t] != gm[t]:
                    bad.append(("term", a, t, fm[t], gm[t]))
            else:
                skipped += 1
    return bad, skipped, checked


# ---------------------------------------------------------------------------
# the derived calculus: pairing, projections, internal morphisms


def term_extension(e: ESystem, A: str, P: str, x: str, u: str) -> str:
    """The pairing <x, u> in T(A.P) for x in T(A), u in T(S_x(P)).

    Computed as S_u(S_x(1_{A.P})); raises Truncated when the identity
    term of A.P or an intermediate position is beyond the truncation.
    """
    cat = e.cat
    AP = cat.comp(A, P)
    one = e.proj.get(AP)
    if one is None:
        raise Truncated(f"identity term of {AP!r}")
    wap = e.weak.get(AP)
    if wap is None or AP not in wap.obj_map:
        raise Truncated(f"W_{{{AP!r}}}({AP!r})")
    pos = wap.obj_map[AP]
    sx = e.subst.get((A, x))
    if sx is None:
        raise Truncated(f"S_{{{x!r}}}")
    sxp = restrict_sf(e, sx, P)
    act1 = term_action_at(e, sxp, pos)
    if act1 is None or one not in act1:
        raise Truncated("S_x/P action on the identity term")
    t1 = act1[one]
    pos1 = sxp.obj_map.get(pos)
    sxP = sx.obj_map.get(P)
    su = e.subst.get((sxP, u)) if sxP is not None else None
    if su is None or pos1 is None:
        raise Truncated(f"S_{{{u!r}}}")
    act2 = term_action_at(e, su, pos1)
    if act2 is None or t1 not in act2:
        raise Truncated("S_u action")
    return act2[t1]


def projections(e: ESystem, A: str, P: str) -> tuple[str, str]:
    """(pr1, pr2) for the composite A.P: pr1 = W_P(1_A), pr2 = 1_P."""
    one_a = e.proj.get(A)
    one_p = e.proj.get(P)
    wa = e.weak.get(A)
    wp = e.weak.get(P)
    if one_a is None or one_p is None or wa is None or wp is None:
        raise Truncated("projection data")
    u = wa.obj_map.get(A)
    if u is None:
        raise Truncated("W_A(A)")
    act = term_action_at(e, wp, u)
    if act is None or one_a not in act:
        raise Truncated("W_P action on 1_A")
    return act[one_a], one_p


def subst_term(e: ESystem, w: str, AP: str, pos: str, t: str) -> str:
    """t[w]: apply the substitution functor of w (a term of AP) to a term
    t sitting on the slice object ``pos`` over dom(AP)."""
    sw = e.subst.get((AP, w))
    if sw is None:
        raise Truncated(f"S_{{{w!r}}}")
    act = term_action_at(e, sw, pos)
    if act is None or t not in act:
        raise Truncated("substitution action")
    return act[t]


def precompose(e: ESystem, A: str, B: str, f: str) -> SliceFunctorT:
    """f* = S_f . (W_A/B) for an internal morphism f in T(W_A(B))."""
    cat = e.cat
    wa = e.weak.get(A)
    if wa is None:
        raise Truncated("W_A")
    Bp = wa.obj_map.get(B)
    if Bp is None:
        raise Truncated("W_A(B)")
    sf = e.subst.get((Bp, f))
    if sf is None:
        raise Truncated(f"S_{{{f!r}}}")
    wab = restrict_sf(e, wa, B)
    return compose_sf(e, sf, wab)


def internal_hom_cat(e: ESystem, gamma: str) -> FinCat:
    """The strict category of internal morphisms over ``gamma``.

    Objects are the arrows into gamma; hom(A, B) = T(W_A(B)); composition
    is precomposition. On truncated systems some hom sets or composites
    fall outside the height; the result is marked partial.
    """
    cat = e.cat
    objs = slice_objects(cat, gamma)
    arrows: dict[str, Arrow] = {}
    identity: dict[str, str] = {}
    compose: dict[tuple[str, str], str] = {}
    partial = False

    def hom_terms(A: str, B: str) -> frozenset[str] | None:
        wa = e.weak.get(A)
        if wa is None:
            return None
        pos = wa.obj_map.get(B)
        if pos is None:
            return None
        return e.T(pos)

    from .core import join_ids

    def mk(A: str, B: str, t: str) -> str:
        return join_ids("ih", A, B, t)

    for A in objs:
        for B in objs:
            ts = hom_terms(A, B)
            if ts is None:
                partial = True
                continue
            for t in ts:
                name = mk(A, B, t)
                arrows[name] = Arrow(name, A, B)
    for A in objs:
        one = e.proj.get(A)
        name = mk(A, A, one) if one is not None else None
        if name is None or name not in arrows:
            partial = True
            continue
        identity[A] = name
    for A in objs:
        for B in objs:
            ts1 = hom_terms(A, B)
            if ts1 is None:
                continue
            for f in ts1:
                try:
                    fstar = precompose(e, A, B, f)
                except Truncated:
                    partial = True
                    continue
                for C in objs:
                    ts2 = hom_terms(B, C)
                    if ts2 is None:
                        continue
                    wb = e.weak[B]
                    posBC = wb.obj_map.get(C)
                    for g in ts2:
                        act = term_action_at(e, fstar, posBC) if posBC else None
                        if act is None or g not in act:
                            partial = True
                            continue
                        gf = act[g]
                        if mk(A, C, gf) not in arrows:
                            partial = True
                            continue
                        compose[(mk(B, C, g), mk(A, B, f))] = mk(A, C, gf)
    return FinCat(
        objects=frozenset(objs),
        arrows=arrows,
        identity=identity,
        compose=compose,
        terminal=cat.id_of(gamma) if gamma in cat.identity else None,
        partial=partial,
    )


def hom_terms_of(e: ESystem, A: str, B: str) -> frozenset[str] | None:
    """T(W_A(B)), the internal morphisms A -> B over cod(A), if represented."""
    wa = e.weak.get(A)
    if wa is None:
        return None
    pos = wa.obj_map.get(B)
    if pos is None:
        return None
    return e.T(pos)


def vertical_compose(e: ESystem, A: str, B: str, f: str, P: str, Q: str, F: str) -> str:
    """f.F : A.P -> B.Q, the pairing <W_P(f), F> over an internal morphism f.

    f is in hom(A, B) = T(W_A(B)); F is in hom_f(P, Q) = T(W_P(f*(Q))).
    """
    cat = e.cat
    wa, wp = e.weak.get(A), e.weak.get(P)
    if wa is None or wp is None:
        raise Truncated("weakening data")
    WAB = wa.obj_map.get(B)
    if WAB is None:
        raise Truncated("W_A(B)")
    act = term_action_at(e, wp, WAB)
    if act is None or f not in act:
        raise Truncated("W_P(f)")
    x = act[f]  # in T(W_P(W_A(B))) = T(W_{A.P}(B))
    Abar = wp.obj_map.get(WAB)
    if Abar is None:
        raise Truncated("W_P(W_A(B))")
    # P-bar = (W_{A.P}/B)(Q): the slice position whose substitution by x is f*(Q)
    AP = cat.comp(A, P)
    wap = e.weak.get(AP)
    if wap is None:
        raise Truncated("W_{A.P}")
    wapB = restrict_sf(e, wap, B)
    Pbar = wapB.obj_map.get(Q)
    if Pbar is None:
        raise Truncated("(W_{A.P}/B)(Q)")
    return term_extension(e, Abar, Pbar, x, F)


def check_pairing(e: ESystem) -> Report:
    """Instance-wise verification of the pairing bijection.

    For every composable pair (A, P): counts |sum_x T(x[P])| against
    |T(A.P)| (always checkable), and where the identity term of A.P is
    represented, computes the pairing map, verifies bijectivity, and
    inverts it through the two projections.
    """
    rep = Report()
    cat = e.cat
    rep.law("pairing-count")
    rep.law("pairing-bijective")
    rep.law("pairing-inverse")
    rep.law("terminal-terms")
    for gamma in sorted(cat.objects):
        for A in slice_objects(cat, gamma):
            for P in slice_objects(cat, cat.dom(A)):
                AP = cat.compose.get((A, P))
                if AP is None:
                    rep.skip("pairing-count")
                    continue
                rep.tick("pairing-count")
                total = 0
                defined = True
                pairs: list[tuple[str, str]] = []
                for x in sorted(e.T(A)):
                    sx = e.subst.get((A, x))
                    xP = sx.obj_map.get(P) if sx is not None else None
                    if xP is None:
                        defined = False
                        break
                    for u in sorted(e.T(xP)):
                        pairs.append((x, u))
                    total += len(e.T(xP))
                if not defined:
                    rep.skip("pairing-count")
                    continue
                if total != len(e.T(AP)):
                    rep.fail(
                        "pairing-count",
                        (A, P),
                        f"sum = {total}, |T(A.P)| = {len(e.T(AP))}",
                    )
                    continue
                # the actual map, where the identity term exists
                rep.tick("pairing-bijective")
                try:
                    image = {}
                    for (x, u) in pairs:
                        image[(x, u)] = term_extension(e, A, P, x, u)
                except Truncated:
                    rep.skip("pairing-bijective")
                    continue
                if sorted(image.values()) != sorted(e.T(AP)):
                    rep.fail("pairing-bijective", (A, P), f"image = {sorted(set(image.values()))}")
                    continue
                rep.tick("pairing-inverse")
                try:
                    pr1, pr2 = projections(e, A, P)
                    wa = e.weak[A]
                    wp = e.weak[P]
                    posWA = wp.obj_map.get(wa.obj_map[A])  # W_{A.P}(A), where pr1 sits
                    posP = wp.obj_map.get(P)  # W_P(P), where pr2 sits
                    for (x, u), w in image.items():
                        back1 = subst_term(e, w, AP, posWA, pr1)
                        back2 = subst_term(e, w, AP, posP, pr2)
                        if back1 != x or back2 != u:
                            rep.fail("pairing-inverse", (A, P, x, u), f"got {(back1, back2)!r}")
                except Truncated:
                    rep.skip("pairing-inverse")
    for gamma in sorted(cat.objects):
        rep.tick("terminal-terms")
        try:
            ida = cat.id_of(gamma)
        except Truncated:
            rep.skip("terminal-terms")
            continue
        if len(e.T(ida)) != 1:
            rep.fail("terminal-terms", (gamma,), f"|T(id)| = {len(e.T(ida))}")
    return rep


# ---------------------------------------------------------------------------
# builders: the (N, >=) system and the group-shaped negative example


def nat_arrow(m: int, n: int) -> str:
    return f"{m}>={n}"


def fn_term(values: tuple[int, ...]) -> str:
    return "[" + ",".join(str(v) for v in values) + "]"


def parse_fn_term(t: str) -> tuple[int, ...]:
    body = t[1:-1]
    return tuple(int(v) for v in body.split(",")) if body else ()


def nat_poset_cat(height: int) -> FinCat:
    arrows = {}
    identity = {}
    compose = {}
    for m in range(height + 1):
        for n in range(m + 1):
            a = nat_arrow(m, n)
            arrows[a] = Arrow(a, str(m), str(n))
        identity[str(m)] = nat_arrow(m, m)
    for m in range(height + 1):
        for n in range(m + 1):
            for p in range(n + 1):
                compose[(nat_arrow(n, p), nat_arrow(m, n))] = nat_arrow(m, p)
    return FinCat(
        objects=frozenset(str(k) for k in range(height + 1)),
        arrows=arrows,
        identity=identity,
        compose=compose,
        terminal="0",
    )


def build_nat_esystem(height: int) -> ESystem:
    """The E-system on (N, >=) with T(n+k >= n) the functions [k] -> [n].

    Substitution by f postcomposes with [id, f] + id, weakening with the
    initial-segment inclusion, and identity terms are the final-segment
    inclusions. Stratified by the identity on levels.
    """
    cat = nat_poset_cat(height)
    terms: dict[str, frozenset[str]] = {}
    for m in range(height + 1):
        for n in range(m + 1):
            k = m - n
            fs = [fn_term(v) for v in itertools.product(range(n), repeat=k)]
            if k == 0:
                fs = [fn_term(())]
            terms[nat_arrow(m, n)] = frozenset(fs)
    e = ESystem(tc=TermCat(cat=cat, terms=terms), levels={str(n): n for n in range(height + 1)})

    def subst_post(n: int, k: int, f: tuple[int, ...], h: tuple[int, ...]) -> tuple[int, ...]:
        # ([id_n, f] + id_j) . h  for h : [l] -> [n+k+j]
        out = []
        for i in h:
            if i < n:
                out.append(i)
            elif i < n + k:
                out.append(f[i - n])
            else:
                out.append(i - k)
        return tuple(out)

    def weak_post(n: int, k: int, h: tuple[int, ...]) -> tuple[int, ...]:
        # (i_n^{n+k} + id_j) . h  for h : [l] -> [n+j]
        return tuple(i if i < n else i + k for i in h)

    for m in range(height + 1):
        for n in range(m + 1):
            k = m - n
            A = nat_arrow(m, n)
            # weakening W_A : slice over n -> slice over m, objects +k
            wa = SliceFunctorT(source_apex=str(n), target_apex=str(m))
            for a in range(n, height + 1):
                if a + k <= height:
                    wa.obj_map[nat_arrow(a, n)] = nat_arrow(a + k, m)
            for (h, f1, g1) in slice_mors(cat, str(n)):
                a, b = int(cat.dom(h)), int(cat.cod(h))
                if b + k > height or a + k > height:
                    continue
                key = (h, f1, g1)
                wa.mor_map[key] = nat_arrow(a + k, b + k)
                wa.term_map[key] = {
                    t: fn_term(weak_post(n, k, parse_fn_term(t))) for t in terms[h]
                }
            e.weak[A] = wa
            # substitution S_f : slice over m -> slice over n, objects -k
            for t in terms[A]:
                f = parse_fn_term(t)
                sf = SliceFunctorT(source_apex=str(m), target_apex=str(n))
                for a in range(m, height + 1):
                    sf.obj_map[nat_arrow(a, m)] = nat_arrow(a - k, n)
                for (h, f1, g1) in slice_mors(cat, str(m)):
                    a, b = int(cat.dom(h)), int(cat.cod(h))
                    key = (h, f1, g1)
                    sf.mor_map[key] = nat_arrow(a - k, b - k)
                    sf.term_map[key] = {
                        u: fn_term(subst_post(n, k, f, parse_fn_term(u)))
                        for u in terms[h]
                    }
                e.subst[(A, t)] = sf
            if m + k <= height:
                e.proj[A] = fn_term(tuple(n + l for l in range(k)))
    return e


def build_group_structure(
    elements: list[str], mult: dict[tuple[str, str], str], unit: str
) -> ESystem:
    """The group-shaped partial E-system: one object, arrows the elements.

    T(g) is the automorphism set; substitution acts by the automorphism,
    weakening by conjugation, identity terms are the identity automorphism.
    No terminal object is claimed; with a nontrivial group the three
    identity-term axioms fail while the system laws hold.
    """
    for a in elements:
        for b in elements:
            for c in elements:
                if mult[(mult[(a, b)], c)] != mult[(a, mult[(b, c)])]:
                    raise ValueError("multiplication table is not associative")
    obj = "*"
    arrows = {g: Arrow(g, obj, obj) for g in elements}
    compose = {(g, h): mult[(g, h)] for g in elements for h in elements}
    cat = FinCat(
        objects=frozenset({obj}),
        arrows=arrows,
        identity={obj: unit},
        compose=compose,
        terminal=None,
    )
    # automorphisms by brute force
    auts: list[dict[str, str]] = []
    for perm in itertools.permutations(elements):
        phi = dict(zip(elements, perm))
        if phi[unit] != unit:
            continue
        if all(phi[mult[(a, b)]] == mult[(phi[a], phi[b])] for a in elements for b in elements):
            auts.append(phi)

    def aut_id(phi: dict[str, str]) -> str:
        return "aut(" + ",".join(f"{g}>{phi[g]}" for g in sorted(phi)) + ")"

    by_id = {aut_id(phi): phi for phi in auts}
    terms = {g: frozenset(by_id) for g in elements}
    e = ESystem(tc=TermCat(cat=cat, terms=terms))

    def aut_compose(p1: dict[str, str], p2: dict[str, str]) -> dict[str, str]:
        return {g: p1[p2[g]] for g in p1}

    def aut_inv(p: dict[str, str]) -> dict[str, str]:
        return {v: k for k, v in p.items()}

    def conj_by(p: dict[str, str], y: dict[str, str]) -> str:
        return aut_id(aut_compose(aut_compose(p, y), aut_inv(p)))

    mors = slice_mors(cat, obj)

    def mk_sf(on_el, on_term) -> SliceFunctorT:
        sf = SliceFunctorT(source_apex=obj, target_apex=obj)
        for g in elements:
            sf.obj_map[g] = on_el(g)
        for m in mors:
            sf.mor_map[m] = on_el(m[0])
            sf.term_map[m] = {aid: on_term(by_id[aid]) for aid in by_id}
        return sf

    for g in elements:
        # weakening conjugates by the inverse so that W_{A.P} = W_P . W_A
        # under the composite-after convention of the composition table
        gi = _ginv(g, elements, mult, unit)
        phi_g = {h: mult[(mult[(gi, h)], g)] for h in elements}
        e.weak[g] = mk_sf(lambda h, p=phi_g: p[h], lambda y, p=phi_g: conj_by(p, y))
        e.proj[g] = aut_id({h: h for h in elements})
        for aid, x in by_id.items():
            e.subst[(g, aid)] = mk_sf(lambda h, p=x: p[h], lambda y, p=x: conj_by(p, y))
    return e


def _ginv(g: str, elements: list[str], mult: dict[tuple[str, str], str], unit: str) -> str:
    for h in elements:
        if mult[(g, h)] == unit:
            return h
    raise ValueError(f"no inverse for {g!r}")


def s3_table() -> tuple[list[str], dict[tuple[str, str], str], str]:
    """The symmetric group on three letters as a multiplication table."""
    perms = list(itertools.permutations(range(3)))
    name = {p: "p" + "".join(str(i) for i in p) for p in perms}
    elements = [name[p] for p in perms]
    mult = {}
    for p in perms:
        for q in perms:
            pq = tuple(p[q[i]] for i in range(3))
            mult[(name[p], name[q])] = name[pq]
    return elements, mult, name[(0, 1, 2)]
