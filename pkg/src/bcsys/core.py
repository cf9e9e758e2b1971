"""Finite strict categories, stratification, rooted trees, and slices.

Everything downstream builds on the types here. Categories are finite
presentations: explicit object and arrow sets with a stored composition
table. Validators re-derive the laws instead of trusting construction,
so arbitrary (including broken) tables can be checked.

Object and arrow ids are opaque strings; equality is id equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .report import Report, Truncated


def esc(part: str) -> str:
    """Escape an id for embedding into a composite id."""
    return part.replace("\\", "\\\\").replace("|", "\\|").replace("@", "\\@").replace(">", "\\>")


def unesc(part: str) -> str:
    out = []
    i = 0
    while i < len(part):
        if part[i] == "\\" and i + 1 < len(part):
            out.append(part[i + 1])
            i += 2
        else:
            out.append(part[i])
            i += 1
    return "".join(out)


def join_ids(*parts: str) -> str:
    return "|".join(esc(p) for p in parts)


def split_ids(s: str, sep: str) -> list[str]:
    """Split on unescaped separators and unescape the pieces."""
    parts = []
    cur = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\" and i + 1 < len(s):
            cur.append(s[i + 1])
            i += 2
            continue
        if c == sep:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
        i += 1
    parts.append("".join(cur))
    return parts


def pack_ids(parts: tuple[str, ...] | list[str]) -> str:
    """Canonical tuple encoding used for generated term and element ids."""
    return "(" + ",".join(p.replace("\\", "\\\\").replace(",", "\\,").replace("(", "\\(").replace(")", "\\)") for p in parts) + ")"


def unpack_ids(s: str) -> tuple[str, ...]:
    if not (s.startswith("(") and s.endswith(")")):
        raise ValueError(f"not a packed id: {s!r}")
    body = s[1:-1]
    if body == "":
        return ()
    return tuple(split_ids(body, ","))


@dataclass(frozen=True)
class Arrow:
    name: str
    dom: str
    cod: str


@dataclass
class FinCat:
    """A finite strict category with a stored composition table.

    ``compose[(g, f)]`` is the composite g after f, for f: X -> Y and
    g: Y -> Z. The table is expected to be total on composable pairs;
    validate_fincat reports where it is not.
    """

    objects: frozenset[str]
    arrows: dict[str, Arrow]
    identity: dict[str, str]
    compose: dict[tuple[str, str], str]
    terminal: str | None = None
    # Truncated presentations (e.g. internal-hom categories of a height-
    # truncated system) may lack some composites or identities; validators
    # then skip instead of failing.
    partial: bool = False

    def dom(self, a: str) -> str:
        return self.arrows[a].dom

    def cod(self, a: str) -> str:
        return self.arrows[a].cod

    def id_of(self, obj: str) -> str:
        try:
            return self.identity[obj]
        except KeyError:
            raise Truncated(f"identity({obj!r})") from None

    def is_id(self, a: str) -> bool:
        arr = self.arrows[a]
        return arr.dom == arr.cod and self.identity.get(arr.dom) == a

    def comp(self, g: str, f: str) -> str:
        """Composite g∘f (f applied first)."""
        try:
            return self.compose[(g, f)]
        except KeyError:
            raise Truncated(f"compose({g!r},{f!r})") from None

    def hom(self, x: str, y: str) -> list[str]:
        return sorted(a for a, ar in self.arrows.items() if ar.dom == x and ar.cod == y)

    def arrows_into(self, y: str) -> list[str]:
        return sorted(a for a, ar in self.arrows.items() if ar.cod == y)

    def arrows_from(self, x: str) -> list[str]:
        return sorted(a for a, ar in self.arrows.items() if ar.dom == x)


@dataclass(frozen=True)
class FunctorData:
    """Explicit functor tables between two finite categories."""

    source: FinCat
    target: FinCat
    object_map: dict[str, str]
    arrow_map: dict[str, str]

    def ob(self, x: str) -> str:
        try:
            return self.object_map[x]
        except KeyError:
            raise Truncated(f"object_map({x!r})") from None

    def ar(self, a: str) -> str:
        try:
            return self.arrow_map[a]
        except KeyError:
            raise Truncated(f"arrow_map({a!r})") from None


@dataclass(frozen=True)
class RootedTree:
    """Level sets T_0..T_height with parent maps T_{n+1} -> T_n."""

    height: int
    levels: tuple[frozenset[str], ...]
    parent: tuple[dict[str, str], ...]


@dataclass(frozen=True)
class Stratification:
    level: dict[str, int]

    def of(self, obj: str) -> int:
        return self.level[obj]


@dataclass(frozen=True)
class StratFailure:
    """Which of the three stratification conditions broke, and where."""

    condition: str  # "i", "ii" or "iii"
    witness: tuple
    detail: str = ""


@dataclass(frozen=True)
class SliceCat:
    """The strict slice of ``base`` over ``apex``, materialized.

    Objects of ``cat`` are the arrows of ``base`` into ``apex`` (same
    ids). Arrows of ``cat`` are commuting triangles, with ids encoding
    the triple (underlying arrow, source object, target object).
    """

    base: FinCat
    apex: str
    cat: FinCat
    triangle: dict[str, tuple[str, str, str]]


# ---------------------------------------------------------------------------
# validation


def validate_fincat(c: FinCat) -> Report:
    """Exhaustively check the strict-category laws and the chosen terminal."""
    rep = Report()

    for obj in sorted(c.objects):
        rep.tick("identity")
        i = c.identity.get(obj)
        if i is None:
            if c.partial:
                rep.skip("identity")
            else:
                rep.fail("identity", (obj,), "no identity arrow")
            continue
        if i not in c.arrows:
            rep.fail("identity", (obj, i), "identity arrow not present")
            continue
        if c.dom(i) != obj or c.cod(i) != obj:
            rep.fail("identity", (obj, i), "identity endpoints wrong")

    for a, ar in sorted(c.arrows.items()):
        rep.tick("endpoints")
        if ar.dom not in c.objects or ar.cod not in c.objects:
            rep.fail("endpoints", (a,), "dangling dom/cod")
        if ar.name != a:
            rep.fail("endpoints", (a,), "arrow key and name disagree")

    names = sorted(c.arrows)
    for g in names:
        for f in names:
            if c.dom(g) != c.cod(f):
                if (g, f) in c.compose:
                    rep.fail("compose-total", (g, f), "composite of non-composable pair")
                continue
            rep.tick("compose-total")
            gf = c.compose.get((g, f))
            if gf is None:
                if c.partial:
                    rep.skip("compose-total")
                else:
                    rep.fail("compose-total", (g, f), "missing composite")
                continue
            if gf not in c.arrows:
                rep.fail("compose-total", (g, f, gf), "composite not an arrow")
                continue
            if c.dom(gf) != c.dom(f) or c.cod(gf) != c.cod(g):
                rep.fail("compose-endpoints", (g, f, gf), "composite endpoints wrong")

    for f in names:
        rep.tick("unit")
        try:
            left = c.comp(c.id_of(c.cod(f)), f)
            right = c.comp(f, c.id_of(c.dom(f)))
        except (KeyError, Truncated):
            rep.skip("unit")
            continue
        if left != f:
            rep.fail("unit", (f,), f"id∘f = {left!r}")
        if right != f:
            rep.fail("unit", (f,), f"f∘id = {right!r}")

    for h in names:
        for g in names:
            if c.dom(h) != c.cod(g):
                continue
            for f in names:
                if c.dom(g) != c.cod(f):
                    continue
                rep.tick("assoc")
                try:
                    lhs = c.comp(c.comp(h, g), f)
                    rhs = c.comp(h, c.comp(g, f))
                except Truncated:
                    rep.skip("assoc")
                    continue
                if lhs != rhs:
                    rep.fail("assoc", (h, g, f), f"{lhs!r} != {rhs!r}")

    if c.terminal is not None:
        if c.terminal not in c.objects:
            rep.fail("terminal", (c.terminal,), "terminal not an object")
        else:
            for obj in sorted(c.objects):
                rep.tick("terminal")
                arrs = c.hom(obj, c.terminal)
                if len(arrs) != 1:
                    rep.fail("terminal", (obj, tuple(arrs)), "hom to terminal not a singleton")
    return rep


def validate_tree(t: RootedTree) -> Report:
    rep = Report()
    rep.tick("root")
    if len(t.levels) != t.height + 1 or len(t.parent) != t.height:
        rep.fail("shape", (t.height,), "level/parent arity mismatch")
        return rep
    if len(t.levels[0]) != 1:
        rep.fail("root", (tuple(sorted(t.levels[0])),), "T_0 is not a singleton")
    for n in range(t.height):
        for node in sorted(t.levels[n + 1]):
            rep.tick("parent")
            p = t.parent[n].get(node)
            if p is None:
                rep.fail("parent", (n + 1, node), "no parent")
            elif p not in t.levels[n]:
                rep.fail("parent", (n + 1, node, p), "parent not at level below")
    return rep


# ---------------------------------------------------------------------------
# stratification


def stratify(c: FinCat) -> Stratification | StratFailure:
    """Compute the unique stratification of ``c``, or explain why none exists.

    Levels are grown outward from the chosen terminal: an object is
    assigned level n+1 once all its non-identity out-arrows land on
    assigned objects. The candidate assignment is then checked against
    the three conditions characterising stratifications; the failure
    value names the first violated condition with a minimal witness.
    """
    if c.terminal is None:
        raise ValueError("stratify requires a chosen terminal object")

    level: dict[str, int] = {c.terminal: 0}
    proper_out: dict[str, list[str]] = {
        x: [a for a in c.arrows_from(x) if not c.is_id(a)] for x in c.objects
    }
    pending = set(c.objects) - {c.terminal}
    while pending:
        ready = []
        for x in sorted(pending):
            targets = [c.cod(a) for a in proper_out[x]]
            if all(t in level for t in targets):
                ready.append((x, targets))
        if not ready:
            witness = min(pending)
            return StratFailure("ii", (witness,), "no factorization down to the terminal")
        for x, targets in ready:
            level[x] = 1 + max((level[t] for t in targets), default=0)
            pending.discard(x)

    if level[c.terminal] != 0:
        return StratFailure("i", (c.terminal,), "terminal not at level 0")

    by_level: dict[int, list[str]] = {}
    for x, n in level.items():
        by_level.setdefault(n, []).append(x)

    for x in sorted(c.objects):
        for k in range(level[x] + 1):
            down = [
                a
                for y in by_level.get(k, [])
                for a in c.hom(x, y)
            ]
            if len(down) != 1:
                return StratFailure(
                    "ii", (x, k, tuple(sorted(down))), "arrows to that level not a singleton"
                )

    for a in sorted(c.arrows):
        if level[c.dom(a)] < level[c.cod(a)]:
            return StratFailure("iii", (a,), "arrow raises level")

    return Stratification(level=dict(level))


def factor_individuals(c: FinCat, s: Stratification, f: str) -> list[str]:
    """Unique factorization of ``f`` into level-dropping individual arrows.

    Returned in application order: the first entry has domain dom(f).
    An identity factors as the empty list.
    """
    lo, hi = s.of(c.cod(f)), s.of(c.dom(f))
    if hi < lo:
        raise ValueError(f"arrow {f!r} raises level under the given stratification")
    if hi == lo:
        if not c.is_id(f):
            raise ValueError(f"level-preserving arrow {f!r} is not an identity")
        return []
    steps: list[str] = []
    x = c.dom(f)
    for k in range(hi, lo, -1):
        cands = [
            a for a in c.arrows_from(x) if s.of(c.cod(a)) == k - 1
        ]
        if len(cands) != 1:
            raise ValueError(f"no unique individual arrow out of {x!r}")
        steps.append(cands[0])
        x = c.cod(cands[0])
    composite = steps[0]
    for a in steps[1:]:
        composite = c.comp(a, composite)
    if composite != f:
        raise ValueError(f"individual factorization composes to {composite!r}, not {f!r}")
    return steps


def individual_arrow(c: FinCat, s: Stratification, x: str) -> str:
    """The unique individual arrow with domain ``x`` (level of x positive)."""
    k = s.of(x)
    if k == 0:
        raise ValueError(f"{x!r} is at level 0")
    cands = [a for a in c.arrows_from(x) if s.of(c.cod(a)) == k - 1]
    if len(cands) != 1:
        raise ValueError(f"no unique individual arrow out of {x!r}")
    return cands[0]


# ---------------------------------------------------------------------------
# rooted trees <-> free stratified categories


def obj_id(n: int, node: str) -> str:
    return f"{esc(node)}@{n}"


def path_id(n: int, node: str, k: int) -> str:
    return f"{esc(node)}@{n}>{k}"


def _last_unescaped(s: str, ch: str) -> int:
    for i in range(len(s) - 1, -1, -1):
        if s[i] != ch:
            continue
        j, nb = i - 1, 0
        while j >= 0 and s[j] == "\\":
            nb += 1
            j -= 1
        if nb % 2 == 0:
            return i
    return -1


def parse_obj_id(s: str) -> tuple[int, str]:
    i = _last_unescaped(s, "@")
    if i < 0:
        raise ValueError(f"not an object id: {s!r}")
    return int(s[i + 1 :]), unesc(s[:i])


def parse_path_id(s: str) -> tuple[int, str, int]:
    i = _last_unescaped(s, ">")
    if i < 0:
        raise ValueError(f"not a path id: {s!r}")
    n, node = parse_obj_id(s[:i])
    return n, node, int(s[i + 1 :])


def free_cat_of_tree(t: RootedTree) -> tuple[FinCat, Stratification]:
    """The category freely generated by the parent edges of ``t``.

    Objects are (level, node) pairs; the arrows out of a node are the
    edge paths (node, k) down to its k-th iterated parent, with k = 0
    the identity.
    """
    objects = set()
    arrows: dict[str, Arrow] = {}
    identity: dict[str, str] = {}
    compose: dict[tuple[str, str], str] = {}
    level: dict[str, int] = {}

    anc: dict[tuple[int, str], list[str]] = {}
    for n in range(t.height + 1):
        for node in t.levels[n]:
            o = obj_id(n, node)
            objects.add(o)
            level[o] = n
            identity[o] = path_id(n, node, 0)
            chain = [node]
            m, cur = n, node
            while m > 0:
                cur = t.parent[m - 1][cur]
                chain.append(cur)
                m -= 1
            anc[(n, node)] = chain
            for k in range(n + 1):
                arrows[path_id(n, node, k)] = Arrow(
                    path_id(n, node, k), o, obj_id(n - k, chain[k])
                )

    for n in range(t.height + 1):
        for node in t.levels[n]:
            chain = anc[(n, node)]
            for k in range(n + 1):
                f = path_id(n, node, k)
                mid = chain[k]
                for j in range(n - k + 1):
                    g = path_id(n - k, mid, j)
                    compose[(g, f)] = path_id(n, node, k + j)

    root = next(iter(t.levels[0]))
    cat = FinCat(
        objects=frozenset(objects),
        arrows=arrows,
        identity=identity,
        compose=compose,
        terminal=obj_id(0, root),
    )
    return cat, Stratification(level=level)


def tree_of_strat(c: FinCat, s: Stratification) -> RootedTree:
    """Level fibers with parents given by the unique individual arrows."""
    height = max(s.level.values(), default=0)
    levels = [frozenset(x for x, n in s.level.items() if n == m) for m in range(height + 1)]
    parent: list[dict[str, str]] = []
    for m in range(height):
        pm: dict[str, str] = {}
        for x in levels[m + 1]:
            pm[x] = c.cod(individual_arrow(c, s, x))
        parent.append(pm)
    return RootedTree(height=height, levels=tuple(levels), parent=tuple(parent))


# ---------------------------------------------------------------------------
# slices


def triangle_id(h: str, f: str, g: str) -> str:
    return join_ids(h, f, g)


def slice_category(c: FinCat, apex: str) -> SliceCat:
    """Materialize the strict slice of ``c`` over ``apex`` as a FinCat."""
    if apex not in c.objects:
        raise ValueError(f"{apex!r} is not an object")
    objs = c.arrows_into(apex)
    arrows: dict[str, Arrow] = {}
    triangle: dict[str, tuple[str, str, str]] = {}
    identity: dict[str, str] = {}
    for f in objs:
        for g in objs:
            for h in c.hom(c.dom(f), c.dom(g)):
                if c.comp(g, h) == f:
                    tid = triangle_id(h, f, g)
                    arrows[tid] = Arrow(tid, f, g)
                    triangle[tid] = (h, f, g)
    for f in objs:
        identity[f] = triangle_id(c.id_of(c.dom(f)), f, f)
    compose: dict[tuple[str, str], str] = {}
    for t1, (h1, f1, g1) in triangle.items():
        for t2, (h2, f2, g2) in triangle.items():
            if f2 == g1:
                compose[(t2, t1)] = triangle_id(c.comp(h2, h1), f1, g2)
    cat = FinCat(
        objects=frozenset(objs),
        arrows=arrows,
        identity=identity,
        compose=compose,
        terminal=c.id_of(apex),
    )
    return SliceCat(base=c, apex=apex, cat=cat, triangle=triangle)


def slice_levels(base_strat: Stratification, sl: SliceCat) -> Stratification:
    """The induced stratification on a slice: level of f is L(dom f) - L(apex)."""
    off = base_strat.of(sl.apex)
    return Stratification(
        level={f: base_strat.of(sl.base.dom(f)) - off for f in sl.cat.objects}
    )


# ---------------------------------------------------------------------------
# functors


def validate_functor(fd: FunctorData, stratified: bool = False) -> Report:
    """Check functor laws exhaustively; with ``stratified``, also level preservation."""
    rep = Report()
    src, tgt = fd.source, fd.target

    for x in sorted(src.objects):
        rep.tick("object-map")
        y = fd.object_map.get(x)
        if y is None:
            rep.fail("object-map", (x,), "unmapped object")
        elif y not in tgt.objects:
            rep.fail("object-map", (x, y), "image not an object")

    for a in sorted(src.arrows):
        rep.tick("arrow-map")
        b = fd.arrow_map.get(a)
        if b is None:
            rep.fail("arrow-map", (a,), "unmapped arrow")
            continue
        if b not in tgt.arrows:
            rep.fail("arrow-map", (a, b), "image not an arrow")
            continue
        if tgt.dom(b) != fd.object_map.get(src.dom(a)) or tgt.cod(b) != fd.object_map.get(
            src.cod(a)
        ):
            rep.fail("arrow-map", (a, b), "endpoints not preserved")

    for x in sorted(src.objects):
        rep.tick("preserves-identity")
        try:
            if fd.ar(src.id_of(x)) != tgt.id_of(fd.ob(x)):
                rep.fail("preserves-identity", (x,))
        except (KeyError, Truncated):
            rep.skip("preserves-identity")

    for (g, f), gf in sorted(src.compose.items()):
        rep.tick("preserves-compose")
        try:
            img = tgt.comp(fd.ar(g), fd.ar(f))
            if img != fd.ar(gf):
                rep.fail("preserves-compose", (g, f), f"{img!r} != F({gf!r})")
        except Truncated:
            rep.skip("preserves-compose")

    if stratified:
        ss = stratify(src) if src.terminal is not None else None
        ts = stratify(tgt) if tgt.terminal is not None else None
        if not isinstance(ss, Stratification):
            rep.miss("stratified", "source category is not stratified")
        elif not isinstance(ts, Stratification):
            rep.miss("stratified", "target category is not stratified")
        else:
            for x in sorted(src.objects):
                rep.tick("stratified")
                try:
                    if ts.of(fd.ob(x)) != ss.of(x):
                        rep.fail("stratified", (x,), "level not preserved")
                except Truncated:
                    rep.skip("stratified")
            # the criterion: terminal and individual arrows are enough,
            # but level preservation on all objects subsumes both.
            if src.terminal is not None and fd.object_map.get(src.terminal) != tgt.terminal:
                rep.fail("stratified", (src.terminal,), "terminal not preserved")
    return rep


def compose_functors(g: FunctorData, f: FunctorData) -> FunctorData:
    return FunctorData(
        source=f.source,
        target=g.target,
        object_map={x: g.object_map[y] for x, y in f.object_map.items()},
        arrow_map={a: g.arrow_map[b] for a, b in f.arrow_map.items()},
    )


def identity_functor(c: FinCat) -> FunctorData:
    return FunctorData(
        source=c,
        target=c,
        object_map={x: x for x in c.objects},
        arrow_map={a: a for a in c.arrows},
    )


def functor_equal(f: FunctorData, g: FunctorData) -> bool:
    return f.object_map == g.object_map and f.arrow_map == g.arrow_map
