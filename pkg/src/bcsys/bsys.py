"""B-frames and B-systems: substitution, weakening, generic elements.

A B-frame is a pair of level-indexed families (contexts B_n, terms
B~_{n+1}) with father and boundary maps. Everything here is truncated at
a finite height; equations between homomorphisms are checked on the
maximal common domain, and instances whose data falls above the height
are skipped and counted rather than failed.

Structure maps on slices reuse the ambient tables: a slice of a slice is
elementwise a slice of the ambient frame, so the same homomorphism
objects serve at every depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .report import Report


@dataclass(frozen=True)
class BFrame:
    """Level sets B_0..B_N and B~_1..B~_N with father and boundary maps.

    ``ft[k]`` maps B_k to B_{k-1} and ``bd[k]`` maps B~_k to B_k, both
    keyed by the level of their domain (index 0 unused).
    """

    height: int
    B: tuple[frozenset[str], ...]
    Bt: tuple[frozenset[str], ...]
    ft: tuple[dict[str, str], ...]
    bd: tuple[dict[str, str], ...]

    def ft_iter(self, k: int, x: str, m: int) -> str:
        for i in range(m):
            x = self.ft[k - i][x]
        return x


@dataclass
class BFrameHom:
    """Level-indexed maps between two B-frames, possibly partial.

    ``H[n]`` maps B_n of the source into B_n of the target, ``Ht[k]``
    likewise for the term sets. Maps are meaningful for levels up to the
    minimum of the two heights; absent entries are treated as truncated.
    """

    source: BFrame
    target: BFrame
    H: dict[int, dict[str, str]]
    Ht: dict[int, dict[str, str]]

    @property
    def common_height(self) -> int:
        return min(self.source.height, self.target.height)


@dataclass
class BSystem:
    """A B-frame carrying substitution, weakening and generic elements.

    ``subst[(k, x)]`` is S_x : B/bd(x) -> B/ft(bd(x)) for x in B~_k;
    ``weak[(n, X)]`` is W_X : B/ft(X) -> B/X for X in B_n, n >= 1;
    ``gen[(n, X)]`` is the generic element of B~_{n+1} for X in B_n.
    Tables may be partial (truncation or a syntactic size bound).
    """

    frame: BFrame
    subst: dict[tuple[int, str], BFrameHom] = field(default_factory=dict)
    weak: dict[tuple[int, str], BFrameHom] = field(default_factory=dict)
    gen: dict[tuple[int, str], str] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# frames


def validate_bframe(b: BFrame) -> Report:
    rep = Report()
    rep.tick("root")
    if len(b.B) != b.height + 1 or len(b.Bt) != b.height + 1:
        rep.fail("shape", (b.height,), "level family arity mismatch")
        return rep
    if len(b.B[0]) != 1:
        rep.fail("root", (tuple(sorted(b.B[0])),), "B_0 is not a singleton")
    for k in range(1, b.height + 1):
        for x in sorted(b.B[k]):
            rep.tick("ft")
            v = b.ft[k].get(x)
            if v is None:
                rep.fail("ft", (k, x), "ft undefined")
            elif v not in b.B[k - 1]:
                rep.fail("ft", (k, x, v), "ft lands outside B_{k-1}")
        for x in sorted(b.Bt[k]):
            rep.tick("bd")
            v = b.bd[k].get(x)
            if v is None:
                rep.fail("bd", (k, x), "bd undefined")
            elif v not in b.B[k]:
                rep.fail("bd", (k, x, v), "bd lands outside B_k")
    return rep


def slice_bframe(b: BFrame, n: int, X: str) -> BFrame:
    """The slice frame B/X for X in B_n: level m holds the elements over X."""
    if n > b.height or X not in b.B[n]:
        raise ValueError(f"{X!r} is not an element of B_{n}")
    h = b.height - n
    B = [frozenset({X})]
    Bt: list[frozenset[str]] = [frozenset()]
    ft: list[dict[str, str]] = [{}]
    bd: list[dict[str, str]] = [{}]
    for m in range(1, h + 1):
        lvl = n + m
        bm = frozenset(y for y in b.B[lvl] if b.ft_iter(lvl, y, m) == X)
        btm = frozenset(
            y for y in b.Bt[lvl] if b.ft_iter(lvl, b.bd[lvl][y], m) == X
        )
        B.append(bm)
        Bt.append(btm)
        ft.append({y: b.ft[lvl][y] for y in bm})
        bd.append({y: b.bd[lvl][y] for y in btm})
    return BFrame(height=h, B=tuple(B), Bt=tuple(Bt), ft=tuple(ft), bd=tuple(bd))


# ---------------------------------------------------------------------------
# homomorphisms


def validate_bframe_hom(h: BFrameHom) -> Report:
    """Naturality of the ft/bd squares on every level where both sides exist."""
    rep = Report()
    top = h.common_height
    for n in range(1, top + 1):
        for X in sorted(h.source.B[n]):
            rep.tick("ft-natural")
            hx = h.H.get(n, {}).get(X)
            hft = h.H.get(n - 1, {}).get(h.source.ft[n][X])
            if hx is None or hft is None:
                rep.skip("ft-natural")
                continue
            if h.target.ft[n][hx] != hft:
                rep.fail("ft-natural", (n, X))
        for x in sorted(h.source.Bt[n]):
            rep.tick("bd-natural")
            hx = h.Ht.get(n, {}).get(x)
            hb = h.H.get(n, {}).get(h.source.bd[n][x])
            if hx is None or hb is None:
                rep.skip("bd-natural")
                continue
            if h.target.bd[n][hx] != hb:
                rep.fail("bd-natural", (n, x))
    for n in range(0, top + 1):
        for X in sorted(h.source.B[n]):
            rep.tick("total")
            y = h.H.get(n, {}).get(X)
            if y is None:
                rep.skip("total")
            elif y not in h.target.B[n]:
                rep.fail("total", (n, X, y), "image outside target level")
        if n >= 1:
            for x in sorted(h.source.Bt[n]):
                rep.tick("total")
                y = h.Ht.get(n, {}).get(x)
                if y is None:
                    rep.skip("total")
                elif y not in h.target.Bt[n]:
                    rep.fail("total", (n, x, y), "term image outside target level")
    return rep


def bhom_identity(b: BFrame) -> BFrameHom:
    return BFrameHom(
        source=b,
        target=b,
        H={n: {x: x for x in b.B[n]} for n in range(b.height + 1)},
        Ht={k: {x: x for x in b.Bt[k]} for k in range(1, b.height + 1)},
    )


def compose_bhom(g: BFrameHom, f: BFrameHom) -> BFrameHom:
    H: dict[int, dict[str, str]] = {}
    Ht: dict[int, dict[str, str]] = {}
    for n, fm in f.H.items():
        gm = g.H.get(n, {})
        H[n] = {x: gm[y] for x, y in fm.items() if y in gm}
    for k, fm in f.Ht.items():
        gm = g.Ht.get(k, {})
        Ht[k] = {x: gm[y] for x, y in fm.items() if y in gm}
    return BFrameHom(source=f.source, target=g.target, H=H, Ht=Ht)


def restrict_bhom(h: BFrameHom, n: int, X: str) -> BFrameHom:
    """The hom h/X : B/X -> A/h(X), for X at level n of h's source."""
    img = h.H[n][X]
    src = slice_bframe(h.source, n, X)
    tgt = slice_bframe(h.target, n, img)
    H = {
        m: {
            y: h.H[n + m][y]
            for y in src.B[m]
            if y in h.H.get(n + m, {})
        }
        for m in range(src.height + 1)
        if n + m <= h.common_height
    }
    Ht = {
        m: {
            y: h.Ht[n + m][y]
            for y in src.Bt[m]
            if y in h.Ht.get(n + m, {})
        }
        for m in range(1, src.height + 1)
        if n + m <= h.common_height
    }
    return BFrameHom(source=src, target=tgt, H=H, Ht=Ht)


def bhom_eq(f: BFrameHom, g: BFrameHom) -> tuple[list[tuple], int, int]:
    """Elementwise comparison on the common defined domain.

    Returns (mismatch witnesses, skipped entries, compared entries).
    """
    mismatches: list[tuple] = []
    skipped = 0
    checked = 0
    levels = set(f.H) | set(g.H)
    for n in sorted(levels):
        fm, gm = f.H.get(n, {}), g.H.get(n, {})
        for x in sorted(set(fm) | set(gm)):
            if x in fm and x in gm:
                checked += 1
                if fm[x] != gm[x]:
                    mismatches.append(("B", n, x, fm[x], gm[x]))
            else:
                skipped += 1
    levels = set(f.Ht) | set(g.Ht)
    for k in sorted(levels):
        fm, gm = f.Ht.get(k, {}), g.Ht.get(k, {})
        for x in sorted(set(fm) | set(gm)):
            if x in fm and x in gm:
                checked += 1
                if fm[x] != gm[x]:
                    mismatches.append(("Bt", k, x, fm[x], gm[x]))
            else:
                skipped += 1
    return mismatches, skipped, checked


# ---------------------------------------------------------------------------
# systems


def slice_system(sys: BSystem, n: int, X: str) -> BSystem:
    """The induced structure on B/X; tables are re-keyed ambient entries."""
    frame = slice_bframe(sys.frame, n, X)
    subst = {}
    for m in range(1, frame.height + 1):
        for x in frame.Bt[m]:
            amb = sys.subst.get((n + m, x))
            if amb is not None:
                subst[(m, x)] = amb
    weak = {}
    for m in range(1, frame.height + 1):
        for Y in frame.B[m]:
            amb = sys.weak.get((n + m, Y))
            if amb is not None:
                weak[(m, Y)] = amb
    gen = {}
    for m in range(1, frame.height + 1):
        for Y in frame.B[m]:
            amb = sys.gen.get((n + m, Y))
            if amb is not None:
                gen[(m, Y)] = amb
    return BSystem(frame=frame, subst=subst, weak=weak, gen=gen)


def check_preservation(
    h: BFrameHom, src: BSystem, tgt: BSystem, which: str, rep: Report | None = None,
    law: str | None = None,
) -> Report:
    """Does ``h`` preserve substitution, weakening or generic elements?

    ``which`` is one of "sub", "weak", "gen". The commuting squares are
    compared elementwise on maximal common domains; instances whose data
    is missing on either side count as skipped.
    """
    if which not in ("sub", "weak", "gen"):
        raise ValueError(f"unknown structure kind {which!r}")
    rep = rep if rep is not None else Report()
    name = law or f"preserve-{which}"

    if which == "sub":
        for (k, x), sx in sorted(src.subst.items()):
            rep.tick(name)
            ximg = h.Ht.get(k, {}).get(x)
            bdx = src.frame.bd[k][x]
            ftbdx = src.frame.ft[k][bdx]
            if ximg is None or (k, ximg) not in tgt.subst:
                rep.skip(name)
                continue
            if bdx not in h.H.get(k, {}) or ftbdx not in h.H.get(k - 1, {}):
                rep.skip(name)
                continue
            lhs = compose_bhom(restrict_bhom(h, k - 1, ftbdx), sx)
            rhs = compose_bhom(tgt.subst[(k, ximg)], restrict_bhom(h, k, bdx))
            bad, skipped, _ = bhom_eq(lhs, rhs)
            rep.skip(name, skipped)
            for w in bad:
                rep.fail(name, (k, x) + w)
    elif which == "weak":
        for (n, X), wx in sorted(src.weak.items()):
            rep.tick(name)
            ximg = h.H.get(n, {}).get(X)
            ftx = src.frame.ft[n][X]
            if ximg is None or (n, ximg) not in tgt.weak:
                rep.skip(name)
                continue
            if ftx not in h.H.get(n - 1, {}):
                rep.skip(name)
                continue
            lhs = compose_bhom(restrict_bhom(h, n, X), wx)
            rhs = compose_bhom(tgt.weak[(n, ximg)], restrict_bhom(h, n - 1, ftx))
            bad, skipped, _ = bhom_eq(lhs, rhs)
            rep.skip(name, skipped)
            for w in bad:
                rep.fail(name, (n, X) + w)
    else:
        for (n, X), d in sorted(src.gen.items()):
            rep.tick(name)
            ximg = h.H.get(n, {}).get(X)
            dimg = h.Ht.get(n + 1, {}).get(d)
            if ximg is None or dimg is None or (n, ximg) not in tgt.gen:
                rep.skip(name)
                continue
            if tgt.gen[(n, ximg)] != dimg:
                rep.fail(name, (n, X), f"H(delta) = {dimg!r}, delta(H) = {tgt.gen[(n, ximg)]!r}")
    return rep


def validate_bsystem(sys: BSystem) -> Report:
    """The five B-system axioms, each reported separately with witnesses."""
    rep = Report()
    rep.merge(validate_bframe(sys.frame), prefix="frame:")
    b = sys.frame
    for axiom in ("axiom-1", "axiom-2", "axiom-3", "axiom-4", "axiom-5"):
        rep.law(axiom)

    for k in range(1, b.height + 1):
        for x in sorted(b.Bt[k]):
            rep.tick("coverage-sub")
            if (k, x) not in sys.subst:
                rep.skip("coverage-sub")
        for X in sorted(b.B[k]):
            rep.tick("coverage-weak")
            if (k, X) not in sys.weak:
                rep.skip("coverage-weak")
            rep.tick("coverage-gen")
            if (k, X) not in sys.gen and k + 1 <= b.height:
                rep.skip("coverage-gen")

    for (k, x), sx in sorted(sys.subst.items()):
        rep.merge(validate_bframe_hom(sx), prefix="subst-hom:")
    for (n, X), wx in sorted(sys.weak.items()):
        rep.merge(validate_bframe_hom(wx), prefix="weak-hom:")

    # boundary of generic elements: bd(delta(X)) = W_X(X)
    for (n, X), d in sorted(sys.gen.items()):
        rep.tick("gen-boundary")
        if n + 1 > b.height or d not in b.Bt[n + 1]:
            rep.fail("gen-boundary", (n, X, d), "delta lands outside B~_{n+1}")
            continue
        wx = sys.weak.get((n, X))
        if wx is None or X not in wx.H.get(1, {}):
            rep.skip("gen-boundary")
            continue
        if b.bd[n + 1][d] != wx.H[1][X]:
            rep.fail("gen-boundary", (n, X), "bd(delta(X)) != W_X(X)")

    # axiom 1: every S_x is a pre-B-homomorphism
    for (k, x), sx in sorted(sys.subst.items()):
        bdx = b.bd[k][x]
        ftbdx = b.ft[k][bdx]
        src = slice_system(sys, k, bdx)
        tgt = slice_system(sys, k - 1, ftbdx)
        for which in ("sub", "weak", "gen"):
            check_preservation(sx, src, tgt, which, rep, law="axiom-1")

    # axiom 2: every W_X is a pre-B-homomorphism
    for (n, X), wx in sorted(sys.weak.items()):
        src = slice_system(sys, n - 1, b.ft[n][X])
        tgt = slice_system(sys, n, X)
        for which in ("sub", "weak", "gen"):
            check_preservation(wx, src, tgt, which, rep, law="axiom-2")

    # axiom 3: S_x . W_bd(x) = id
    for (k, x), sx in sorted(sys.subst.items()):
        rep.tick("axiom-3")
        bdx = b.bd[k][x]
        wx = sys.weak.get((k, bdx))
        if wx is None:
            rep.skip("axiom-3")
            continue
        composite = compose_bhom(sx, wx)
        bad, skipped, _ = bhom_eq(composite, bhom_identity(composite.source))
        rep.skip("axiom-3", skipped)
        for w in bad:
            rep.fail("axiom-3", (k, x) + w)

    # axiom 4: S_x(delta(bd x)) = x
    for (k, x), sx in sorted(sys.subst.items()):
        rep.tick("axiom-4")
        bdx = b.bd[k][x]
        d = sys.gen.get((k, bdx))
        if d is None:
            rep.skip("axiom-4")
            continue
        img = sx.Ht.get(1, {}).get(d)
        if img is None:
            rep.skip("axiom-4")
            continue
        if img != x:
            rep.fail("axiom-4", (k, x), f"S_x(delta) = {img!r}")

    # axiom 5: S_delta(X) . (W_X / X) = id on B/X
    for (n, X), d in sorted(sys.gen.items()):
        rep.tick("axiom-5")
        wx = sys.weak.get((n, X))
        sd = sys.subst.get((n + 1, d))
        if wx is None or sd is None or X not in wx.H.get(1, {}):
            rep.skip("axiom-5")
            continue
        composite = compose_bhom(sd, restrict_bhom(wx, 1, X))
        bad, skipped, _ = bhom_eq(composite, bhom_identity(composite.source))
        rep.skip("axiom-5", skipped)
        for w in bad:
            rep.fail("axiom-5", (n, X) + w)

    return rep


def validate_bsystem_hom(h: BFrameHom, src: BSystem, tgt: BSystem) -> Report:
    """A homomorphism of B-systems: frame naturality plus all preservations."""
    rep = Report()
    rep.merge(validate_bframe_hom(h))
    for which in ("sub", "weak", "gen"):
        check_preservation(h, src, tgt, which, rep)
    return rep


# ---------------------------------------------------------------------------
# the finite-set example


def finset_subst_map(n: int, x: int, j: int) -> dict[str, str]:
    """[id_n, x] + id_j as a table on string-encoded elements of [n+1+j]."""
    out = {}
    for i in range(n + 1 + j):
        if i < n:
            out[str(i)] = str(i)
        elif i == n:
            out[str(i)] = str(x)
        else:
            out[str(i)] = str(i - 1)
    return out


def finset_weak_map(n: int, j: int) -> dict[str, str]:
    """i_n + id_j as a table on string-encoded elements of [n+j]."""
    out = {}
    for i in range(n + j):
        out[str(i)] = str(i) if i < n else str(i + 1)
    return out


def build_finset_bframe(height: int) -> BFrame:
    B = tuple(frozenset({str(n)}) for n in range(height + 1))
    Bt = (frozenset(),) + tuple(
        frozenset(str(i) for i in range(k - 1)) for k in range(1, height + 1)
    )
    ft = ({},) + tuple({str(k): str(k - 1)} for k in range(1, height + 1))
    bd = ({},) + tuple(
        {str(i): str(k) for i in range(k - 1)} for k in range(1, height + 1)
    )
    return BFrame(height=height, B=B, Bt=Bt, ft=ft, bd=bd)


def build_finset_bsystem(height: int) -> BSystem:
    """The B-system on B_n = {n}, B~_{n+1} = [n] from finite sets."""
    frame = build_finset_bframe(height)
    sys = BSystem(frame=frame)
    for k in range(1, height + 1):
        n = k - 1  # x lives in B~_{n+1}
        src = slice_bframe(frame, k, str(k))
        tgt = slice_bframe(frame, k - 1, str(k - 1))
        for x in range(n):
            H = {m: {str(k + m): str(k - 1 + m)} for m in range(src.height + 1)}
            Ht = {
                m: finset_subst_map(n, x, m - 1)
                for m in range(1, src.height + 1)
            }
            sys.subst[(k, str(x))] = BFrameHom(source=src, target=tgt, H=H, Ht=Ht)
        wsrc = slice_bframe(frame, k - 1, str(k - 1))
        wtgt = slice_bframe(frame, k, str(k))
        H = {m: {str(k - 1 + m): str(k + m)} for m in range(wtgt.height + 1)}
        Ht = {m: finset_weak_map(n, m - 1) for m in range(1, wtgt.height + 1)}
        sys.weak[(k, str(k))] = BFrameHom(source=wsrc, target=wtgt, H=H, Ht=Ht)
        if k + 1 <= height:
            sys.gen[(k, str(k))] = str(k - 1)
    return sys
