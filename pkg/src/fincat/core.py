"""Finite categories as explicit composition tables.

A category here is fully tabulated data: object ids, morphism ids with
endpoints, an identity assignment, and a composition table that must be total
on composable pairs. Validation checks every law exhaustively and reports
each breakage with a witness instead of stopping at the first.

The constructions the rest of the engine needs live here too: opposites,
products, functor categories (hence arrow categories and the category of
composable pairs), comma and iso-comma categories, inverters, preimage
subcategories, and the filteredness/cofinality probes.

Determinism rule used throughout the package: every search iterates in
sorted-id order and returns the first hit, so outputs are byte-reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .errors import (
    EnumerationBudgetExceeded,
    InvalidCategory,
    InvalidFunctor,
    InvalidSquare,
    InvalidTransformation,
    NotFullSubcategory,
)

DEFAULT_BUDGET = 10 ** 6


@dataclass(frozen=True, order=True)
class Violation:
    """One broken law with the ids that witness the breakage."""

    code: str
    witness: tuple

    def as_json(self):
        return {"code": self.code, "witness": list(self.witness)}


@dataclass(frozen=True, eq=True)
class FinCategory:
    """A finite category given by explicit tables.

    morphisms maps morphism id -> (src object, dst object); table maps a
    composable pair (g, f) with dst(f) == src(g) to the composite g-after-f.
    Instances are treated as immutable once built; helper accessors cache
    derived views (sorted morphism list, hom-sets).
    """

    name: str
    objects: tuple
    morphisms: dict
    identity: dict
    table: dict

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(sorted(self.objects)))
        object.__setattr__(
            self, "morphisms", {m: (s, t) for m, (s, t) in self.morphisms.items()}
        )

    # dict fields make the generated hash unusable; categories are never keys
    __hash__ = None

    @cached_property
    def mors(self):
        """All morphism ids, sorted."""
        return tuple(sorted(self.morphisms))

    @cached_property
    def _hom(self):
        out = {}
        for m in self.mors:
            out.setdefault(self.morphisms[m], []).append(m)
        return {pair: tuple(ms) for pair, ms in out.items()}

    @cached_property
    def identity_ids(self):
        return frozenset(self.identity.values())

    def hom(self, x, y):
        return self._hom.get((x, y), ())

    def src(self, m):
        return self.morphisms[m][0]

    def dst(self, m):
        return self.morphisms[m][1]

    def id_of(self, x):
        return self.identity[x]

    def compose(self, g, f):
        """g after f."""
        try:
            return self.table[(g, f)]
        except KeyError:
            raise ValueError(f"not composable in {self.name}: ({g}) after ({f})") from None

    def composable(self, g, f):
        return self.dst(f) == self.src(g)

    def is_identity(self, m):
        return self.identity.get(self.morphisms[m][0]) == m

    def non_identities(self):
        return tuple(m for m in self.mors if m not in self.identity_ids)

    def inverse(self, m):
        """Two-sided inverse by exhaustive search, least id first; None if not iso."""
        s, t = self.morphisms[m]
        for cand in self.hom(t, s):
            if self.table[(cand, m)] == self.identity[s] and self.table[(m, cand)] == self.identity[t]:
                return cand
        return None

    def is_iso(self, m):
        return self.inverse(m) is not None

    def iso_ids(self):
        return tuple(m for m in self.mors if self.is_iso(m))

    def __repr__(self):
        return f"FinCategory({self.name!r}, {len(self.objects)} objects, {len(self.morphisms)} morphisms)"


def category_violations(objects, morphisms, identity, table):
    """Every broken law in the raw tables, sorted for reproducibility.

    Structural problems (unknown ids, missing identity assignments, entries
    on non-composable pairs) are reported first; the law checks (totality,
    endpoint coherence, identity, associativity) only run on structurally
    sound tables, since they dereference the structure everywhere.
    """
    objects = list(objects)
    out = []
    seen = set()
    for x in objects:
        if x in seen:
            out.append(Violation("DuplicateObject", (x,)))
        seen.add(x)
    objset = set(objects)
    for m, ends in morphisms.items():
        s, t = ends
        if s not in objset:
            out.append(Violation("UnknownObject", (m, s)))
        if t not in objset:
            out.append(Violation("UnknownObject", (m, t)))
    for x in objset:
        if x not in identity:
            out.append(Violation("MissingIdentity", (x,)))
        elif identity[x] not in morphisms:
            out.append(Violation("UnknownMorphism", (identity[x], "identity", x)))
        elif tuple(morphisms[identity[x]]) != (x, x):
            out.append(Violation("BadEndpoints", (identity[x], "identity", x)))
    for x in identity:
        if x not in objset:
            out.append(Violation("UnknownObject", ("identity", x)))
    for (g, f), h in table.items():
        for m in (g, f, h):
            if m not in morphisms:
                out.append(Violation("UnknownMorphism", (m, "table", g, f)))
    if out:
        return sorted(set(out))

    for (g, f), h in table.items():
        if morphisms[f][1] != morphisms[g][0]:
            out.append(Violation("NotComposable", (g, f)))
    if out:
        return sorted(set(out))

    mors = sorted(morphisms)
    for g in mors:
        for f in mors:
            if morphisms[f][1] != morphisms[g][0]:
                continue
            if (g, f) not in table:
                out.append(Violation("MissingComposite", (g, f)))
                continue
            h = table[(g, f)]
            if tuple(morphisms[h]) != (morphisms[f][0], morphisms[g][1]):
                out.append(Violation("BadEndpoints", (g, f, h)))
    for f in mors:
        s, t = morphisms[f]
        left = table.get((f, identity[s]))
        if left is not None and left != f:
            out.append(Violation("BrokenIdentity", (f, identity[s], left)))
        right = table.get((identity[t], f))
        if right is not None and right != f:
            out.append(Violation("BrokenIdentity", (f, identity[t], right)))
    for h in mors:
        for g in mors:
            if morphisms[g][1] != morphisms[h][0]:
                continue
            hg = table.get((h, g))
            for f in mors:
                if morphisms[f][1] != morphisms[g][0]:
                    continue
                gf = table.get((g, f))
                if hg is None or gf is None:
                    continue
                a = table.get((h, gf))
                b = table.get((hg, f))
                if a is not None and b is not None and a != b:
                    out.append(Violation("BrokenAssociativity", (h, g, f)))
    return sorted(set(out))


def validate_category(objects, morphisms, identity, table, name="C"):
    """Build a FinCategory from raw tables, or raise with every violation."""
    bad = category_violations(objects, morphisms, identity, table)
    if bad:
        raise InvalidCategory(bad)
    return FinCategory(name, tuple(objects), dict(morphisms), dict(identity), dict(table))


def opposite(cat):
    """Reverse all arrows. Involutive on the nose, including the name."""
    name = cat.name[3:-1] if cat.name.startswith("op(") and cat.name.endswith(")") else f"op({cat.name})"
    return FinCategory(
        name,
        cat.objects,
        {m: (t, s) for m, (s, t) in cat.morphisms.items()},
        dict(cat.identity),
        {(f, g): h for (g, f), h in cat.table.items()},
    )


# ---------------------------------------------------------------------------
# functors, transformations, squares


@dataclass(frozen=True, eq=True)
class Functor:
    """A functor between finite categories, given by its two maps."""

    name: str
    source: FinCategory
    target: FinCategory
    obj_map: dict
    mor_map: dict

    __hash__ = None

    def ob(self, x):
        return self.obj_map[x]

    def mor(self, m):
        return self.mor_map[m]

    def __repr__(self):
        return f"Functor({self.name!r}: {self.source.name} -> {self.target.name})"


def functor_violations(fun):
    """Exhaustive check: totality, endpoints, identities, composites."""
    src, dst = fun.source, fun.target
    out = []
    for x in src.objects:
        if x not in fun.obj_map:
            out.append(Violation("MissingObjectImage", (x,)))
        elif fun.obj_map[x] not in set(dst.objects):
            out.append(Violation("UnknownObject", (x, fun.obj_map[x])))
    for m in src.mors:
        if m not in fun.mor_map:
            out.append(Violation("MissingMorphismImage", (m,)))
        elif fun.mor_map[m] not in dst.morphisms:
            out.append(Violation("UnknownMorphism", (m, fun.mor_map[m])))
    if out:
        return sorted(set(out))
    for m in src.mors:
        s, t = src.morphisms[m]
        if dst.morphisms[fun.mor_map[m]] != (fun.obj_map[s], fun.obj_map[t]):
            out.append(Violation("BadEndpoints", (m, fun.mor_map[m])))
    for x in src.objects:
        if fun.mor_map[src.identity[x]] != dst.identity[fun.obj_map[x]]:
            out.append(Violation("BrokenIdentity", (x,)))
    if out:
        return sorted(set(out))
    for (g, f), h in src.table.items():
        if dst.table[(fun.mor_map[g], fun.mor_map[f])] != fun.mor_map[h]:
            out.append(Violation("BrokenComposite", (g, f)))
    return sorted(set(out))


def validate_functor(fun):
    bad = functor_violations(fun)
    if bad:
        raise InvalidFunctor(bad)
    return fun


def identity_functor(cat):
    return Functor(f"id[{cat.name}]", cat, cat,
                   {x: x for x in cat.objects}, {m: m for m in cat.mors})


def constant_functor(source, target, at):
    """The functor collapsing everything onto one object of the target."""
    e = target.identity[at]
    return Functor(f"const[{at}]", source, target,
                   {x: at for x in source.objects}, {m: e for m in source.mors})


def compose_functors(outer, inner):
    assert inner.target == outer.source, "functors do not meet"
    return Functor(
        f"({outer.name}.{inner.name})", inner.source, outer.target,
        {x: outer.obj_map[inner.obj_map[x]] for x in inner.source.objects},
        {m: outer.mor_map[inner.mor_map[m]] for m in inner.source.mors},
    )


@dataclass(frozen=True, eq=True)
class NatTransformation:
    """Components indexed by source-shape objects, one naturality square each."""

    source: Functor
    target: Functor
    components: dict

    __hash__ = None

    def at(self, x):
        return self.components[x]


def nat_violations(nat):
    fun, gun = nat.source, nat.target
    out = []
    if fun.source != gun.source or fun.target != gun.target:
        return [Violation("MismatchedFunctors", (fun.name, gun.name))]
    shape, amb = fun.source, fun.target
    for x in shape.objects:
        if x not in nat.components:
            out.append(Violation("MissingComponent", (x,)))
        elif nat.components[x] not in amb.morphisms:
            out.append(Violation("UnknownMorphism", (x, nat.components[x])))
        elif amb.morphisms[nat.components[x]] != (fun.obj_map[x], gun.obj_map[x]):
            out.append(Violation("BadEndpoints", (x, nat.components[x])))
    if out:
        return sorted(set(out))
    for m in shape.mors:
        s, t = shape.morphisms[m]
        lhs = amb.table[(gun.mor_map[m], nat.components[s])]
        rhs = amb.table[(nat.components[t], fun.mor_map[m])]
        if lhs != rhs:
            out.append(Violation("BrokenNaturality", (m,)))
    return sorted(set(out))


def validate_nat(nat):
    bad = nat_violations(nat)
    if bad:
        raise InvalidTransformation(bad)
    return nat


@dataclass(frozen=True, eq=True)
class CommSquare:
    """A commutative square: right∘top == bottom∘left, endpoints aligned.

    left: A -> B, right: X -> Y, top: A -> X, bottom: B -> Y.
    """

    cat: FinCategory
    left: str
    right: str
    top: str
    bottom: str

    __hash__ = None

    def check(self):
        c = self.cat
        la, lb = c.morphisms[self.left]
        rx, ry = c.morphisms[self.right]
        if c.morphisms[self.top] != (la, rx):
            raise InvalidSquare(f"top edge {self.top} mistyped")
        if c.morphisms[self.bottom] != (lb, ry):
            raise InvalidSquare(f"bottom edge {self.bottom} mistyped")
        if c.table[(self.right, self.top)] != c.table[(self.bottom, self.left)]:
            raise InvalidSquare("square does not commute")
        return self


# ---------------------------------------------------------------------------
# basic constructions


def pair_id(a, b):
    return f"({a},{b})"


@dataclass(frozen=True)
class ProductResult:
    cat: FinCategory
    proj1: Functor
    proj2: Functor


def product_category(cat1, cat2):
    """Componentwise product with its two projection functors."""
    objects = [pair_id(x, y) for x in cat1.objects for y in cat2.objects]
    morphisms = {
        pair_id(f, g): (pair_id(cat1.src(f), cat2.src(g)), pair_id(cat1.dst(f), cat2.dst(g)))
        for f in cat1.mors for g in cat2.mors
    }
    identity = {
        pair_id(x, y): pair_id(cat1.identity[x], cat2.identity[y])
        for x in cat1.objects for y in cat2.objects
    }
    table = {}
    for (g1, f1), h1 in cat1.table.items():
        for (g2, f2), h2 in cat2.table.items():
            table[(pair_id(g1, g2), pair_id(f1, f2))] = pair_id(h1, h2)
    cat = FinCategory(f"({cat1.name}x{cat2.name})", tuple(objects), morphisms, identity, table)
    obj1 = {pair_id(x, y): x for x in cat1.objects for y in cat2.objects}
    obj2 = {pair_id(x, y): y for x in cat1.objects for y in cat2.objects}
    mor1 = {pair_id(f, g): f for f in cat1.mors for g in cat2.mors}
    mor2 = {pair_id(f, g): g for f in cat1.mors for g in cat2.mors}
    proj1 = Functor("proj1", cat, cat1, obj1, mor1)
    proj2 = Functor("proj2", cat, cat2, obj2, mor2)
    return ProductResult(cat, proj1, proj2)


def terminal_category():
    return FinCategory("1", ("pt",), {"id_pt": ("pt", "pt")}, {"pt": "id_pt"},
                       {("id_pt", "id_pt"): "id_pt"})


def discrete_category(name, objs):
    objs = tuple(objs)
    morphisms = {f"id_{x}": (x, x) for x in objs}
    return FinCategory(name, objs, morphisms, {x: f"id_{x}" for x in objs},
                       {(f"id_{x}", f"id_{x}"): f"id_{x}" for x in objs})


def chain_category(n, name=None):
    """The linear order 0 < 1 < ... < n as a thin category."""
    objs = [str(i) for i in range(n + 1)]
    morphisms = {f"id_{x}": (x, x) for x in objs}
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            morphisms[f"c{i}_{j}"] = (str(i), str(j))
    identity = {x: f"id_{x}" for x in objs}

    def arrow(i, j):
        return identity[str(i)] if i == j else f"c{i}_{j}"

    table = {}
    for i in range(n + 1):
        for j in range(i, n + 1):
            for k in range(j, n + 1):
                table[(arrow(j, k), arrow(i, j))] = arrow(i, k)
    return FinCategory(name or f"chain{n}", tuple(objs), morphisms, identity, table)


def walking_arrow():
    """Two objects 0, 1 and one generating arrow a01."""
    morphisms = {"id_0": ("0", "0"), "id_1": ("1", "1"), "a01": ("0", "1")}
    table = {
        ("id_0", "id_0"): "id_0", ("id_1", "id_1"): "id_1",
        ("a01", "id_0"): "a01", ("id_1", "a01"): "a01",
    }
    return FinCategory("walking-arrow", ("0", "1"), morphisms,
                       {"0": "id_0", "1": "id_1"}, table)


def walking_composable_pair():
    """Objects 0, 1, 2 with a01, a12 and their composite a02."""
    morphisms = {
        "id_0": ("0", "0"), "id_1": ("1", "1"), "id_2": ("2", "2"),
        "a01": ("0", "1"), "a12": ("1", "2"), "a02": ("0", "2"),
    }
    identity = {"0": "id_0", "1": "id_1", "2": "id_2"}
    table = {}
    arrow = {("0", "0"): "id_0", ("1", "1"): "id_1", ("2", "2"): "id_2",
             ("0", "1"): "a01", ("1", "2"): "a12", ("0", "2"): "a02"}
    for (i, j), f in arrow.items():
        for (j2, k), g in arrow.items():
            if j == j2:
                table[(g, f)] = arrow[(i, k)]
    return FinCategory("walking-pair", ("0", "1", "2"), morphisms, identity, table)


def full_subcategory(cat, objs, name=None):
    """The full subcategory on the given objects, with its inclusion."""
    objs = tuple(sorted(set(objs)))
    keep = {m for m in cat.mors if cat.src(m) in objs and cat.dst(m) in objs}
    sub = FinCategory(
        name or f"{cat.name}[{','.join(objs)}]",
        objs,
        {m: cat.morphisms[m] for m in keep},
        {x: cat.identity[x] for x in objs},
        {(g, f): h for (g, f), h in cat.table.items() if g in keep and f in keep},
    )
    inc = Functor(f"incl[{sub.name}]", sub, cat,
                  {x: x for x in objs}, {m: m for m in keep})
    return sub, inc


def generated_subcategory(cat, seed_mors, name=None):
    """Smallest subcategory containing the seeds: close under endpoints,
    identities and composition. Ids are kept as in the ambient category."""
    mors = set(seed_mors)
    objs = set()
    for m in seed_mors:
        objs.update(cat.morphisms[m])
    mors.update(cat.identity[x] for x in objs)
    changed = True
    while changed:
        changed = False
        for g in list(mors):
            for f in list(mors):
                if cat.composable(g, f):
                    h = cat.table[(g, f)]
                    if h not in mors:
                        mors.add(h)
                        changed = True
    objs = tuple(sorted(objs))
    sub = FinCategory(
        name or f"{cat.name}<{','.join(sorted(seed_mors))}>",
        objs,
        {m: cat.morphisms[m] for m in mors},
        {x: cat.identity[x] for x in objs},
        {(g, f): h for (g, f), h in cat.table.items() if g in mors and f in mors},
    )
    inc = Functor(f"incl[{sub.name}]", sub, cat,
                  {x: x for x in objs}, {m: m for m in sorted(mors)})
    return sub, inc


# ---------------------------------------------------------------------------
# functor categories


@dataclass(frozen=True)
class FunctorCategoryResult:
    """The category of functors shape -> base with all transformations.

    functors / transformations map the generated ids back to the actual
    Functor / NatTransformation values.
    """

    shape: FinCategory
    base: FinCategory
    cat: FinCategory
    functors: dict
    transformations: dict


def _functor_obj_id(shape, fun):
    objpart = ",".join(f"{x}:{fun.obj_map[x]}" for x in shape.objects)
    morpart = ",".join(f"{m}:{fun.mor_map[m]}" for m in shape.non_identities())
    return f"[{objpart}|{morpart}]"


def _nat_mor_id(shape, src_id, dst_id, components):
    comppart = ",".join(f"{x}:{components[x]}" for x in shape.objects)
    return f"{src_id}=>{dst_id}|{comppart}"


def functor_category(shape, base, budget=DEFAULT_BUDGET):
    """All functors shape -> base and all natural transformations between them.

    Enumeration cost is guarded: if the number of candidate assignments
    (functor maps, then transformation component tuples) exceeds the budget
    the search refuses loudly rather than truncating.
    """
    d_objs = shape.objects
    d_gens = shape.non_identities()
    spent = 0

    obj_choices = len(base.objects) ** len(d_objs) if d_objs else 1
    spent += obj_choices
    if spent > budget:
        raise EnumerationBudgetExceeded(spent, budget)

    functors = {}
    for combo in itertools.product(base.objects, repeat=len(d_objs)):
        omap = dict(zip(d_objs, combo))
        homs = [base.hom(omap[shape.src(m)], omap[shape.dst(m)]) for m in d_gens]
        count = 1
        for h in homs:
            count *= len(h)
        spent += count
        if spent > budget:
            raise EnumerationBudgetExceeded(spent, budget)
        for picks in itertools.product(*homs):
            mmap = dict(zip(d_gens, picks))
            for x in d_objs:
                mmap[shape.identity[x]] = base.identity[omap[x]]
            ok = all(
                base.table[(mmap[g], mmap[f])] == mmap[h]
                for (g, f), h in shape.table.items()
            )
            if ok:
                fun = Functor("F", shape, base, omap, mmap)
                oid = _functor_obj_id(shape, fun)
                functors[oid] = Functor(oid, shape, base, omap, mmap)

    obj_ids = sorted(functors)
    transformations = {}
    morphisms = {}
    comp_index = {}
    for src_id in obj_ids:
        for dst_id in obj_ids:
            fun, gun = functors[src_id], functors[dst_id]
            homs = [base.hom(fun.obj_map[x], gun.obj_map[x]) for x in d_objs]
            count = 1
            for h in homs:
                count *= len(h)
            spent += count
            if spent > budget:
                raise EnumerationBudgetExceeded(spent, budget)
            for picks in itertools.product(*homs):
                comps = dict(zip(d_objs, picks))
                ok = all(
                    base.table[(gun.mor_map[m], comps[shape.src(m)])]
                    == base.table[(comps[shape.dst(m)], fun.mor_map[m])]
                    for m in d_gens
                )
                if not ok:
                    continue
                mid = _nat_mor_id(shape, src_id, dst_id, comps)
                transformations[mid] = NatTransformation(fun, gun, comps)
                morphisms[mid] = (src_id, dst_id)
                comp_index[(src_id, dst_id, picks)] = mid

    identity = {}
    for oid in obj_ids:
        fun = functors[oid]
        picks = tuple(base.identity[fun.obj_map[x]] for x in d_objs)
        identity[oid] = comp_index[(oid, oid, picks)]

    table = {}
    for mid2, (b_src, b_dst) in morphisms.items():
        for mid1, (a_src, a_dst) in morphisms.items():
            if a_dst != b_src:
                continue
            n1, n2 = transformations[mid1], transformations[mid2]
            picks = tuple(
                base.table[(n2.components[x], n1.components[x])] for x in d_objs
            )
            table[(mid2, mid1)] = comp_index[(a_src, b_dst, picks)]

    cat = FinCategory(f"[{shape.name},{base.name}]", tuple(obj_ids), morphisms, identity, table)
    return FunctorCategoryResult(shape, base, cat, functors, transformations)


@dataclass(frozen=True)
class ArrowCategory:
    """The category of arrows of `base` with commutative squares as morphisms.

    Built as the functor category out of the walking arrow; the extra maps
    translate between base morphisms and arrow objects, and between arrow
    morphisms and their (domain-edge, codomain-edge) components. dom / cod
    are the evaluation functors back to the base.
    """

    base: FinCategory
    cat: FinCategory
    obj_of: dict
    mor_of: dict
    square_of: dict
    square_index: dict
    dom: Functor
    cod: Functor

    def square(self, f, g, u, v):
        """Arrow-morphism id for the square (u, v): f -> g, or None."""
        return self.square_index.get((f, g, u, v))


def arrow_category(base, budget=DEFAULT_BUDGET):
    fc = functor_category(walking_arrow(), base, budget)
    obj_of = {}
    for oid, fun in fc.functors.items():
        obj_of[fun.mor_map["a01"]] = oid
    mor_of = {oid: fun.mor_map["a01"] for oid, fun in fc.functors.items()}
    square_of = {}
    square_index = {}
    for mid, nat in fc.transformations.items():
        u, v = nat.components["0"], nat.components["1"]
        f = nat.source.mor_map["a01"]
        g = nat.target.mor_map["a01"]
        square_of[mid] = (u, v)
        square_index[(f, g, u, v)] = mid
    dom = Functor("dom", fc.cat, base,
                  {oid: base.src(m) for oid, m in mor_of.items()},
                  {mid: uv[0] for mid, uv in square_of.items()})
    cod = Functor("cod", fc.cat, base,
                  {oid: base.dst(m) for oid, m in mor_of.items()},
                  {mid: uv[1] for mid, uv in square_of.items()})
    return ArrowCategory(base, fc.cat, obj_of, mor_of, square_of, square_index, dom, cod)


@dataclass(frozen=True)
class PairCategory:
    """Functors out of the composable-pair shape, with the three restriction
    functors to the arrow category: first edge, composite edge, second edge."""

    base: FinCategory
    cat: FinCategory
    obj_of: dict  # (first, second) composable base pair -> object id
    triple_of: dict  # object id -> (first, second, composite)
    first_edge: Functor
    composite_edge: Functor
    second_edge: Functor


def pair_category(base, arrows, budget=DEFAULT_BUDGET):
    """Build the composable-pair functor category over `base`.

    `arrows` must be arrow_category(base); the restriction functors land in
    it and reuse its ids.
    """
    fc = functor_category(walking_composable_pair(), base, budget)
    obj_of, triple_of = {}, {}
    for oid, fun in fc.functors.items():
        first, second = fun.mor_map["a01"], fun.mor_map["a12"]
        comp = fun.mor_map["a02"]
        obj_of[(first, second)] = oid
        triple_of[oid] = (first, second, comp)

    def restriction(name, pick_obj, pick_square):
        omap, mmap = {}, {}
        for oid, (first, second, comp) in triple_of.items():
            omap[oid] = arrows.obj_of[pick_obj(first, second, comp)]
        for mid, nat in fc.transformations.items():
            c0, c1, c2 = (nat.components["0"], nat.components["1"], nat.components["2"])
            sf, ss, sc = triple_of[_functor_obj_id(fc.shape, nat.source)]
            tf, ts, tc = triple_of[_functor_obj_id(fc.shape, nat.target)]
            src_arrow = pick_obj(sf, ss, sc)
            dst_arrow = pick_obj(tf, ts, tc)
            u, v = pick_square(c0, c1, c2)
            mmap[mid] = arrows.square_index[(src_arrow, dst_arrow, u, v)]
        return Functor(name, fc.cat, arrows.cat, omap, mmap)

    first_edge = restriction("edge01", lambda f, s, c: f, lambda c0, c1, c2: (c0, c1))
    composite_edge = restriction("edge02", lambda f, s, c: c, lambda c0, c1, c2: (c0, c2))
    second_edge = restriction("edge12", lambda f, s, c: s, lambda c0, c1, c2: (c1, c2))
    return PairCategory(base, fc.cat, obj_of, triple_of, first_edge, composite_edge, second_edge)


# ---------------------------------------------------------------------------
# comma categories, inverters, preimages


@dataclass(frozen=True)
class CommaResult:
    cat: FinCategory
    proj_left: Functor
    proj_right: Functor
    data: dict  # object id -> (left object, right object, connecting morphism)
    components: dict  # morphism id -> (left component, right component)


def comma_category(fun, gun, iso_only=False):
    """Objects (a, b, e: F a -> G b); morphisms are compatible pairs (u, v).

    With iso_only, keep only objects whose connecting morphism is an
    isomorphism (the full subcategory on them).
    """
    assert fun.target == gun.target, "comma needs a common codomain"
    amb = fun.target
    aa, bb = fun.source, gun.source

    data = {}
    for a in aa.objects:
        for b in bb.objects:
            for e in amb.hom(fun.obj_map[a], gun.obj_map[b]):
                if iso_only and not amb.is_iso(e):
                    continue
                data[f"({a},{b},{e})"] = (a, b, e)

    morphisms, components, index = {}, {}, {}
    for o1 in sorted(data):
        a1, b1, e1 = data[o1]
        for o2 in sorted(data):
            a2, b2, e2 = data[o2]
            for u in aa.hom(a1, a2):
                for v in bb.hom(b1, b2):
                    if amb.table[(gun.mor_map[v], e1)] != amb.table[(e2, fun.mor_map[u])]:
                        continue
                    mid = f"({u},{v})@{o1}->{o2}"
                    morphisms[mid] = (o1, o2)
                    components[mid] = (u, v)
                    index[(o1, o2, u, v)] = mid

    identity = {}
    for oid, (a, b, _e) in data.items():
        identity[oid] = index[(oid, oid, aa.identity[a], bb.identity[b])]
    table = {}
    for m2, (s2, d2) in morphisms.items():
        u2, v2 = components[m2]
        for m1, (s1, d1) in morphisms.items():
            if d1 != s2:
                continue
            u1, v1 = components[m1]
            table[(m2, m1)] = index[(s1, d2, aa.table[(u2, u1)], bb.table[(v2, v1)])]

    tag = "iso-comma" if iso_only else "comma"
    cat = FinCategory(f"{tag}({fun.name},{gun.name})", tuple(sorted(data)),
                      morphisms, identity, table)
    proj_left = Functor("proj-left", cat, aa,
                        {o: data[o][0] for o in data},
                        {m: components[m][0] for m in morphisms})
    proj_right = Functor("proj-right", cat, bb,
                         {o: data[o][1] for o in data},
                         {m: components[m][1] for m in morphisms})
    return CommaResult(cat, proj_left, proj_right, data, components)


def inverter(fun, gun, nat):
    """Objects where the transformation's component is invertible.

    Returns {object id: inverse morphism id}; the retained objects span a
    full subcategory of the (shared) source.
    """
    validate_nat(nat)
    amb = fun.target
    out = {}
    for b in fun.source.objects:
        inv = amb.inverse(nat.components[b])
        if inv is not None:
            out[b] = inv
    return out


@dataclass(frozen=True)
class Subcategory:
    """A subcategory presented as id subsets of some ambient category."""

    objects: frozenset
    morphisms: frozenset
    cat: FinCategory
    inclusion: Functor


def preimage_subcategory(fun, sub_objects, sub_morphisms, strict=False, replete=False):
    """Everything in the source that lands inside the given codomain subset.

    strict: require the subset to be full in the codomain (every ambient
    morphism between retained objects retained), else refuse.
    replete: additionally require closure under ambient isomorphisms.
    Both checks are opt-in; defaults stay permissive.
    """
    dst = fun.target
    sub_objects = frozenset(sub_objects)
    sub_morphisms = frozenset(sub_morphisms)
    if strict:
        for x in sorted(sub_objects):
            for y in sorted(sub_objects):
                for m in dst.hom(x, y):
                    if m not in sub_morphisms:
                        raise NotFullSubcategory("not full", (x, y, m))
    if replete:
        for x in sorted(sub_objects):
            for m in dst.mors:
                if dst.src(m) == x and dst.is_iso(m) and dst.dst(m) not in sub_objects:
                    raise NotFullSubcategory("not replete", (x, m, dst.dst(m)))

    objs = frozenset(x for x in fun.source.objects if fun.obj_map[x] in sub_objects)
    mors = frozenset(
        m for m in fun.source.mors
        if fun.mor_map[m] in sub_morphisms
        and fun.source.src(m) in objs and fun.source.dst(m) in objs
    )
    src = fun.source
    closed = all(src.identity[x] in mors for x in objs) and all(
        src.table[(g, f)] in mors
        for g in mors for f in mors if src.composable(g, f)
    )
    cat = None
    inclusion = None
    if closed:
        cat = FinCategory(
            f"{src.name}|{fun.name}^-1",
            tuple(sorted(objs)),
            {m: src.morphisms[m] for m in mors},
            {x: src.identity[x] for x in objs},
            {(g, f): h for (g, f), h in src.table.items() if g in mors and f in mors},
        )
        inclusion = Functor(f"incl[{cat.name}]", cat, src,
                            {x: x for x in cat.objects}, {m: m for m in cat.mors})
    return Subcategory(objs, mors, cat, inclusion)


# ---------------------------------------------------------------------------
# filteredness and cofinality


class UnionFind:
    """Union-find with path compression; plain and deterministic."""

    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the lexicographically least representative as root
            lo, hi = (ra, rb) if ra <= rb else (rb, ra)
            self.parent[hi] = lo

    def groups(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return {root: tuple(sorted(members)) for root, members in out.items()}


@dataclass(frozen=True)
class CofinalIdempotent:
    """A cocone over the identity diagram: apex, its idempotent leg, all legs."""

    obj: str
    idem: str
    legs: dict


@dataclass(frozen=True)
class NotFiltered:
    """A finite subdiagram (full, on the listed objects) with no cocone."""

    objects: tuple
    morphisms: tuple


def _cocone_over(cat, objs, mors):
    """Least (apex, legs) with legs[dst m]∘m == legs[src m] for all listed m."""
    for apex in cat.objects:
        homs = [cat.hom(x, apex) for x in objs]
        if any(not h for h in homs):
            continue
        for picks in itertools.product(*homs):
            legs = dict(zip(objs, picks))
            if all(cat.table[(legs[cat.dst(m)], m)] == legs[cat.src(m)] for m in mors):
                return apex, legs
    return None


def find_cofinal_idempotent(cat):
    """Search for a cocone over the identity diagram of the whole category.

    On success the apex leg at the apex itself is idempotent and generates a
    cofinal subcategory; on failure, return the smallest full subdiagram
    (by object-subset size, then lexicographic) admitting no cocone. For a
    finite category, existence of this cocone is exactly filteredness.
    """
    hit = _cocone_over(cat, cat.objects, cat.mors)
    if hit is not None:
        apex, legs = hit
        return CofinalIdempotent(apex, legs[apex], legs)
    for k in range(len(cat.objects) + 1):
        for combo in itertools.combinations(cat.objects, k):
            objs = tuple(combo)
            mors = tuple(m for m in cat.mors
                         if cat.src(m) in objs and cat.dst(m) in objs)
            if _cocone_over(cat, objs, mors) is None:
                return NotFiltered(objs, mors)
    raise AssertionError("unreachable: full diagram had no cocone but every subdiagram does")


def is_filtered(cat):
    return isinstance(find_cofinal_idempotent(cat), CofinalIdempotent)


def is_cofinal(fun):
    """Inhabited and zig-zag connected comma category under every target object.

    Returns a Verdict-like pair (holds, failures); each failure names the
    target object and either "empty" or the partition into components.
    """
    from .verdict import Verdict

    src, dst = fun.source, fun.target
    failures = []
    for j in dst.objects:
        nodes = [
            (i, f)
            for i in src.objects
            for f in dst.hom(j, fun.obj_map[i])
        ]
        if not nodes:
            failures.append({"object": j, "problem": "empty"})
            continue
        uf = UnionFind(nodes)
        for (i, f) in nodes:
            for u in src.mors:
                if src.src(u) != i:
                    continue
                f2 = dst.table[(fun.mor_map[u], f)]
                uf.union((i, f), (src.dst(u), f2))
        groups = uf.groups()
        if len(groups) > 1:
            failures.append({
                "object": j,
                "problem": "disconnected",
                "components": [list(map(list, g)) for g in sorted(groups.values())],
            })
    return Verdict(not failures, tuple(failures))
