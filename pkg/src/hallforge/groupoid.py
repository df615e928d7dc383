"""Graded finite groupoids in skeletal form and their homotopy pullbacks.

A skeletal groupoid is a list of components, each a label together with
its automorphism group.  Group elements are matrices or (arbitrarily
nested) tuples of matrices, multiplied componentwise, so one generic
product works for parabolic subgroups, quiver-rep stabilizers and
products of groupoids alike.

The homotopy 2-fiber product is realized strictly: components of
``A x_C B`` are triples ``(a, b, double coset)`` and automorphisms are
the pairs ``(alpha, beta)`` intertwining the chosen coset
representative.  Pullback n-cubes reduce to iterated 2-fiber products
along a fixed axis order; independence of the order is a tested
property, not an assumption.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from hallforge.qlinalg import MAX_GROUP_ORDER, Matrix


def gmul(a, b):
    """Multiply group elements (matrices or nested tuples of matrices)."""
    if isinstance(a, Matrix):
        return a @ b
    return tuple(gmul(x, y) for x, y in zip(a, b))


def ginv(a):
    if isinstance(a, Matrix):
        return a.inverse()
    return tuple(ginv(x) for x in a)


def element_key(a):
    """Total order on group elements, for deterministic canonical choices."""
    if isinstance(a, Matrix):
        return (0, a.rows, a.cols, a.entries)
    return (1, tuple(element_key(x) for x in a))


def label_key(x):
    """Total order on component labels (nested tuples of ints/strings)."""
    if isinstance(x, tuple):
        return (2, tuple(label_key(y) for y in x))
    if isinstance(x, str):
        return (1, x)
    return (0, x)


def mulclose(gens, identity):
    """Subgroup generated by gens inside an ambient finite group."""
    els = {identity}
    boundary = [identity]
    while boundary:
        new = []
        for b in boundary:
            for g in gens:
                c = gmul(b, g)
                if c not in els:
                    els.add(c)
                    new.append(c)
        boundary = new
    return els


class FiniteGroup:
    """An explicit finite group of matrix-like elements."""

    def __init__(self, elements, identity=None):
        self.elements = tuple(elements)
        self._set = frozenset(self.elements)
        assert len(self._set) == len(self.elements), "duplicate group elements"
        if identity is None:
            identity = next(e for e in self.elements if gmul(e, e) == e)
        self.identity = identity
        self._gens = None
        self._index = None
        self._sorted_ranks = None
        self._mult_tables = {}

    def index(self) -> dict:
        if self._index is None:
            self._index = {e: i for i, e in enumerate(self.elements)}
        return self._index

    def sorted_ranks(self):
        """rank[i] = position of element i in element_key order."""
        if self._sorted_ranks is None:
            order = sorted(range(len(self.elements)), key=lambda i: element_key(self.elements[i]))
            ranks = [0] * len(order)
            for pos, i in enumerate(order):
                ranks[i] = pos
            self._sorted_ranks = (tuple(order), tuple(ranks))
        return self._sorted_ranks

    def mult_table(self, g, side: str) -> tuple:
        """Permutation i -> index of g*e_i (side='left') or e_i*g ('right')."""
        key = (side, g)
        tab = self._mult_tables.get(key)
        if tab is None:
            idx = self.index()
            if side == "left":
                tab = tuple(idx[gmul(g, e)] for e in self.elements)
            else:
                tab = tuple(idx[gmul(e, g)] for e in self.elements)
            self._mult_tables[key] = tab
        return tab

    @property
    def order(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self._set

    def __iter__(self):
        return iter(self.elements)

    def sorted_elements(self):
        return sorted(self.elements, key=element_key)

    def generators(self):
        """A small, deterministic generating set (greedy closure)."""
        if self._gens is None:
            gens = []
            closure = {self.identity}
            for e in self.sorted_elements():
                if e not in closure:
                    gens.append(e)
                    closure = mulclose(gens, self.identity)
                    if len(closure) == self.order:
                        break
            self._gens = tuple(gens)
        return self._gens

    @staticmethod
    def trivial(identity):
        return FiniteGroup((identity,), identity)

    @staticmethod
    def product(g1, g2):
        els = [(a, b) for a in g1.elements for b in g2.elements]
        return FiniteGroup(els, (g1.identity, g2.identity))


_INTERNED_GROUPS = {}


def interned_group(elements, identity) -> FiniteGroup:
    """Shared FiniteGroup instances keyed by element set, so cached
    generator sets and multiplication tables are reused."""
    key = frozenset(elements)
    group = _INTERNED_GROUPS.get(key)
    if group is None:
        group = FiniteGroup(sorted(elements, key=element_key), identity)
        _INTERNED_GROUPS[key] = group
    return group


TRIVIAL_IDENTITY = None  # set lazily to the 0x0 matrix over F_2


def trivial_identity():
    global TRIVIAL_IDENTITY
    if TRIVIAL_IDENTITY is None:
        from hallforge.qlinalg import make_field

        TRIVIAL_IDENTITY = Matrix(make_field(2, 1), 0, 0, ())
    return TRIVIAL_IDENTITY


@dataclass
class Component:
    """One isomorphism class: a label, its |Aut|, and optionally Aut itself."""

    label: object
    aut_order: int
    group: FiniteGroup | None = None

    def require_group(self) -> FiniteGroup:
        if self.group is None:
            raise ValueError(f"component {self.label!r} carries no explicit automorphism group")
        if self.group.order > MAX_GROUP_ORDER:
            raise ValueError(f"automorphism group of {self.label!r} exceeds cap {MAX_GROUP_ORDER}")
        return self.group


class SkeletalGroupoid:
    """A finite groupoid presented by components with automorphism groups."""

    def __init__(self, components):
        self.components = tuple(sorted(components, key=lambda c: label_key(c.label)))
        self._by_label = {c.label: c for c in self.components}
        assert len(self._by_label) == len(self.components), "duplicate component labels"

    def component(self, label) -> Component:
        return self._by_label[label]

    def labels(self):
        return tuple(c.label for c in self.components)

    def __contains__(self, label):
        return label in self._by_label

    def cardinality(self) -> Fraction:
        """Groupoid cardinality: sum of 1/|Aut| over components."""
        return sum((Fraction(1, c.aut_order) for c in self.components), Fraction(0))

    def restrict(self, predicate) -> "SkeletalGroupoid":
        return SkeletalGroupoid([c for c in self.components if predicate(c.label)])

    def aut_profile(self):
        """Multiset of (label, |Aut|), for equivalence-shape comparisons."""
        return tuple(sorted(((c.label, c.aut_order) for c in self.components), key=lambda t: label_key(t[0])))

    @staticmethod
    def discrete(labels) -> "SkeletalGroupoid":
        e = trivial_identity()
        return SkeletalGroupoid([Component(l, 1, FiniteGroup.trivial(e)) for l in labels])

    @staticmethod
    def point(label=("pt",)) -> "SkeletalGroupoid":
        return SkeletalGroupoid.discrete([label])

    @staticmethod
    def product(g1: "SkeletalGroupoid", g2: "SkeletalGroupoid") -> "SkeletalGroupoid":
        comps = []
        for c1 in g1.components:
            for c2 in g2.components:
                grp = None
                if c1.group is not None and c2.group is not None and c1.aut_order * c2.aut_order <= MAX_GROUP_ORDER:
                    grp = FiniteGroup.product(c1.group, c2.group)
                comps.append(Component((c1.label, c2.label), c1.aut_order * c2.aut_order, grp))
        return SkeletalGroupoid(comps)


class GroupoidFunctor:
    """A functor between skeletal groupoids.

    ``comp`` maps source labels to target labels; ``homs`` maps each
    source label to a dict sending automorphisms to automorphisms (with
    the basepoint identification already absorbed).  ``homs`` may be
    None for component-level functors that only push/pull functions.
    """

    def __init__(self, src: SkeletalGroupoid, dst: SkeletalGroupoid, comp: dict, homs: dict | None = None):
        self.src = src
        self.dst = dst
        self.comp = dict(comp)
        self.homs = homs

    def require_homs(self) -> dict:
        if self.homs is None:
            raise ValueError("functor carries no automorphism data")
        return self.homs

    def hom(self, label) -> dict:
        return self.require_homs()[label]

    @staticmethod
    def identity(g: SkeletalGroupoid) -> "GroupoidFunctor":
        comp = {l: l for l in g.labels()}
        homs = {c.label: {e: e for e in c.group.elements} if c.group is not None else None
                for c in g.components}
        if any(v is None for v in homs.values()):
            homs = None
        return GroupoidFunctor(g, g, comp, homs)

    def then(self, other: "GroupoidFunctor") -> "GroupoidFunctor":
        """Composite self;other : src -> other.dst."""
        comp = {l: other.comp[v] for l, v in self.comp.items()}
        homs = None
        if self.homs is not None and other.homs is not None:
            homs = {}
            for l, h1 in self.homs.items():
                h2 = other.homs[self.comp[l]]
                homs[l] = {e: h2[h1[e]] for e in h1}
        return GroupoidFunctor(self.src, other.dst, comp, homs)

    def equals(self, other: "GroupoidFunctor") -> bool:
        if self.comp != other.comp:
            return False
        if self.homs is None or other.homs is None:
            return self.homs is other.homs
        return self.homs == other.homs

    def validate(self, full: bool = False) -> None:
        for l, target in self.comp.items():
            assert target in self.dst, f"label {target!r} missing from target"
        if self.homs is None:
            return
        for l, h in self.homs.items():
            src_group = self.src.component(l).require_group()
            dst_group = self.dst.component(self.comp[l]).require_group()
            assert h[src_group.identity] == dst_group.identity
            assert all(v in dst_group for v in h.values())
            pairs = itertools.product(src_group.elements, repeat=2) if full else \
                itertools.product(src_group.generators(), src_group.generators())
            for a, b in pairs:
                assert h[gmul(a, b)] == gmul(h[a], h[b]), "not a homomorphism"


def is_equivalence(f: GroupoidFunctor) -> bool:
    """True iff components biject and every automorphism map bijects."""
    labels = f.src.labels()
    image = [f.comp[l] for l in labels]
    if len(set(image)) != len(labels) or set(image) != set(f.dst.labels()):
        return False
    homs = f.require_homs()
    for l in labels:
        h = homs[l]
        dst_group = f.dst.component(f.comp[l]).require_group()
        if len(h) != dst_group.order or len(set(h.values())) != len(h):
            return False
    return True


def natural_iso_witness(f: GroupoidFunctor, g: GroupoidFunctor):
    """A natural isomorphism f => g as per-component conjugators, or None."""
    if f.src is not g.src and f.src.labels() != g.src.labels():
        return None
    if f.comp != g.comp:
        return None
    witness = {}
    for comp in f.src.components:
        l = comp.label
        hf, hg = f.hom(l), g.hom(l)
        target = f.dst.component(f.comp[l]).require_group()
        gens = comp.require_group().generators()
        eta = None
        for cand in target.sorted_elements():
            cand_inv = ginv(cand)
            if all(hg[x] == gmul(gmul(cand, hf[x]), cand_inv) for x in gens):
                eta = cand
                break
        if eta is None:
            return None
        witness[l] = eta
    return witness


class FiberProduct:
    """Strict model of the homotopy fiber product A x_C B of groupoids."""

    def __init__(self, f: GroupoidFunctor, g: GroupoidFunctor):
        assert f.dst is g.dst or f.dst.labels() == g.dst.labels(), "cospan targets differ"
        self.f = f
        self.g = g
        self._canon = {}        # (a,b,k) -> canonical coset representative
        self._coset_of = {}     # (a,b) -> {phi: k}
        self._pre_f = {}        # a -> {t: (alphas...)}
        comps = []
        pr_a_comp, pr_a_homs = {}, {}
        pr_b_comp, pr_b_homs = {}, {}
        for ca in f.src.components:
            targets_b = [cb for cb in g.src.components if g.comp[cb.label] == f.comp[ca.label]]
            if not targets_b:
                continue
            aut_c = f.dst.component(f.comp[ca.label]).require_group()
            ha = f.hom(ca.label)
            pre_f = {}
            for alpha in ca.require_group().sorted_elements():
                pre_f.setdefault(ha[alpha], []).append(alpha)
            self._pre_f[ca.label] = {t: tuple(v) for t, v in pre_f.items()}
            h_sub = interned_group(set(ha.values()), aut_c.identity)
            for cb in targets_b:
                hb = g.hom(cb.label)
                k_sub = interned_group(set(hb.values()), aut_c.identity)
                cosets = self._double_cosets(aut_c, k_sub, h_sub)
                self._coset_of[(ca.label, cb.label)] = {}
                for k, (rep, orbit) in enumerate(cosets):
                    for phi in orbit:
                        self._coset_of[(ca.label, cb.label)][phi] = k
                    label = (ca.label, cb.label, k)
                    self._canon[label] = rep
                    stab = self._stabilizer(rep, ca, cb, hb)
                    assert len(stab) * len(orbit) == ca.aut_order * cb.aut_order
                    group = FiniteGroup(stab, (ca.require_group().identity, cb.require_group().identity))
                    comps.append(Component(label, len(stab), group))
                    pr_a_comp[label] = ca.label
                    pr_a_homs[label] = {pair: pair[0] for pair in stab}
                    pr_b_comp[label] = cb.label
                    pr_b_homs[label] = {pair: pair[1] for pair in stab}
        self.groupoid = SkeletalGroupoid(comps)
        self.pr_a = GroupoidFunctor(self.groupoid, f.src, pr_a_comp, pr_a_homs)
        self.pr_b = GroupoidFunctor(self.groupoid, g.src, pr_b_comp, pr_b_homs)

    @staticmethod
    def _double_cosets(aut_c: FiniteGroup, k_sub: FiniteGroup, h_sub: FiniteGroup):
        """Orbits of phi |-> k.phi.h^{-1}; list of (canonical rep, orbit).

        Runs on integer indices with cached multiplication tables, so the
        matrix products are shared across repeated cospans into the same
        automorphism group."""
        if aut_c.order > MAX_GROUP_ORDER:
            raise ValueError(f"group of order {aut_c.order} exceeds cap {MAX_GROUP_ORDER}")
        tables = [aut_c.mult_table(kg, "left") for kg in k_sub.generators()]
        tables += [aut_c.mult_table(hg, "right") for hg in h_sub.generators()]
        order, ranks = aut_c.sorted_ranks()
        n = aut_c.order
        coset_of = [-1] * n
        cosets = []
        id_idx = aut_c.index()[aut_c.identity]
        for start in order:
            if coset_of[start] >= 0:
                continue
            k = len(cosets)
            coset_of[start] = k
            orbit = [start]
            boundary = [start]
            while boundary:
                new = []
                for i in boundary:
                    for tab in tables:
                        j = tab[i]
                        if coset_of[j] < 0:
                            coset_of[j] = k
                            orbit.append(j)
                            new.append(j)
                boundary = new
            rep_idx = id_idx if coset_of[id_idx] == k else min(orbit, key=lambda i: ranks[i])
            cosets.append((aut_c.elements[rep_idx],
                           {aut_c.elements[i] for i in orbit}))
        cosets.sort(key=lambda t: (t[0] != aut_c.identity, element_key(t[0])))
        return cosets

    def _stabilizer(self, phi0, ca: Component, cb: Component, hb: dict):
        """Pairs (alpha, beta) with G(beta).phi0 = phi0.F(alpha)."""
        phi0_inv = ginv(phi0)
        pre = self._pre_f[ca.label]
        out = []
        for beta in cb.require_group().sorted_elements():
            t = gmul(gmul(phi0_inv, hb[beta]), phi0)
            for alpha in pre.get(t, ()):
                out.append((alpha, beta))
        return out

    def transport(self, a_label, b_label, phi):
        """Component of (a, b, phi) plus the iso (alpha0, beta0) to its canonical rep."""
        k = self._coset_of[(a_label, b_label)][phi]
        label = (a_label, b_label, k)
        rep = self._canon[label]
        ids = (self.f.src.component(a_label).require_group().identity,
               self.g.src.component(b_label).require_group().identity)
        if phi == rep:
            return label, ids
        rep_inv = ginv(rep)
        hb = self.g.hom(b_label)
        pre = self._pre_f[a_label]
        for beta in self.g.src.component(b_label).require_group().sorted_elements():
            t = gmul(gmul(rep_inv, hb[beta]), phi)
            alphas = pre.get(t)
            if alphas:
                return label, (alphas[0], beta)
        raise AssertionError("transport not found; coset bookkeeping broken")


def two_fiber_product(f: GroupoidFunctor, g: GroupoidFunctor) -> FiberProduct:
    """Homotopy fiber product of the cospan F.src -F-> C <-G- G.src."""
    return FiberProduct(f, g)


def induced_into_fiber_product(fp: FiberProduct, x: SkeletalGroupoid,
                               cone_a: GroupoidFunctor, cone_b: GroupoidFunctor,
                               witness: dict | None = None) -> GroupoidFunctor:
    """Canonical comparison functor X -> A x_C B from a (witnessed) cone."""
    comp, homs = {}, {}
    for cx in x.components:
        a_label = cone_a.comp[cx.label]
        b_label = cone_b.comp[cx.label]
        if witness is None:
            phi = fp.f.dst.component(fp.f.comp[a_label]).require_group().identity
        else:
            phi = witness[cx.label]
        label, (alpha0, beta0) = fp.transport(a_label, b_label, phi)
        comp[cx.label] = label
        ha, hb = cone_a.hom(cx.label), cone_b.hom(cx.label)
        ids = (fp.f.src.component(a_label).require_group().identity,
               fp.g.src.component(b_label).require_group().identity)
        if (alpha0, beta0) == ids:
            homs[cx.label] = {e: (ha[e], hb[e]) for e in ha}
        else:
            a0i, b0i = ginv(alpha0), ginv(beta0)
            homs[cx.label] = {e: (gmul(gmul(alpha0, ha[e]), a0i), gmul(gmul(beta0, hb[e]), b0i)) for e in ha}
    return GroupoidFunctor(x, fp.groupoid, comp, homs)


@dataclass
class CommutingSquare:
    """A strictly (or witnessed) commuting square of groupoid functors.

        P --g--> B
        |f       |right
        A -bottom-> C
    """

    p: SkeletalGroupoid
    a: SkeletalGroupoid
    b: SkeletalGroupoid
    c: SkeletalGroupoid
    f: GroupoidFunctor       # P -> A
    g: GroupoidFunctor       # P -> B
    bottom: GroupoidFunctor  # A -> C
    right: GroupoidFunctor   # B -> C
    witness: dict | None = None

    def check_commutes(self):
        left = self.f.then(self.bottom)
        right = self.g.then(self.right)
        if left.equals(right):
            return {}
        w = self.witness if self.witness is not None else natural_iso_witness(left, right)
        if w is None:
            raise ValueError("square does not commute, even up to natural isomorphism")
        return w


def pullback_square_comparison(sq: CommutingSquare):
    """(comparison functor, fiber product) for the square's pullback check."""
    w = sq.check_commutes()
    fp = two_fiber_product(sq.bottom, sq.right)
    cmp = induced_into_fiber_product(fp, sq.p, sq.f, sq.g, witness=w or None)
    return cmp, fp


def is_pullback_square(sq: CommutingSquare) -> bool:
    cmp, _ = pullback_square_comparison(sq)
    return is_equivalence(cmp)


class CommutingCube:
    """A strictly commuting d-cube of groupoids, arrows away from 0...0."""

    def __init__(self, dim: int, vertices: dict, edges: dict):
        self.dim = dim
        self.vertices = dict(vertices)   # bits tuple -> SkeletalGroupoid
        self.edges = dict(edges)         # (bits, axis) -> GroupoidFunctor
        assert len(self.vertices) == 2 ** dim

    def edge(self, v, axis) -> GroupoidFunctor:
        return self.edges[(v, axis)]

    def edge_composite(self, v_from, v_to) -> GroupoidFunctor:
        """Composite along increasing axes from v_from to v_to."""
        assert all(a <= b for a, b in zip(v_from, v_to))
        out = None
        cur = v_from
        for axis in range(self.dim):
            if v_from[axis] < v_to[axis]:
                e = self.edge(cur, axis)
                out = e if out is None else out.then(e)
                cur = cur[:axis] + (1,) + cur[axis + 1:]
        return GroupoidFunctor.identity(self.vertices[v_from]) if out is None else out

    def validate_commutes(self):
        for v in self.vertices:
            for i in range(self.dim):
                for j in range(i + 1, self.dim):
                    if v[i] or v[j]:
                        continue
                    vi = v[:i] + (1,) + v[i + 1:]
                    vj = v[:j] + (1,) + v[j + 1:]
                    one = self.edge(v, i).then(self.edge(vi, j))
                    two = self.edge(v, j).then(self.edge(vj, i))
                    if not one.equals(two):
                        raise ValueError(f"cube face at {v} axes ({i},{j}) does not commute strictly")

    def subcube(self, axis: int, value: int) -> "CommutingCube":
        """The (d-1)-face with the given axis frozen."""
        verts, edges = {}, {}
        for v, g in self.vertices.items():
            if v[axis] == value:
                verts[v[:axis] + v[axis + 1:]] = g
        for (v, ax), f in self.edges.items():
            if v[axis] == value and ax != axis:
                new_ax = ax if ax < axis else ax - 1
                edges[(v[:axis] + v[axis + 1:], new_ax)] = f
        return CommutingCube(self.dim - 1, verts, edges)

    def opposite_face(self, axis: int, value: int) -> "CommutingCube":
        return self.subcube(axis, 1 - value)

    def permute_axes(self, perm) -> "CommutingCube":
        """Relabel axes by perm (new axis i = old axis perm[i])."""
        verts = {tuple(v[perm[i]] for i in range(self.dim)): g for v, g in self.vertices.items()}
        inv = [perm.index(i) for i in range(self.dim)]
        edges = {}
        for (v, ax), f in self.edges.items():
            nv = tuple(v[perm[i]] for i in range(self.dim))
            edges[(nv, inv[ax])] = f
        return CommutingCube(self.dim, verts, edges)


class PuncturedLimit:
    """Homotopy limit of a commuting cube minus its initial vertex."""

    def __init__(self, cube: CommutingCube):
        self.cube = cube
        self.dim = cube.dim
        if self.dim == 1:
            self.groupoid = cube.vertices[(1,)]
            self.projections = {(1,): GroupoidFunctor.identity(self.groupoid)}
            return
        d = self.dim
        top = cube.subcube(d - 1, 1)
        bot = cube.subcube(d - 1, 0)
        self._top_lim = PuncturedLimit(top)
        self._bot_lim = PuncturedLimit(bot)
        t_vertex = (0,) * (d - 1)
        nonzero = [v for v in top.vertices if any(v)]
        comp_t = self._top_lim.induced(top.vertices[t_vertex],
                                       {w: top.edge_composite(t_vertex, w) for w in nonzero})
        vert_cones = {w: self._bot_lim.projections[w].then(cube.edge(w + (0,), d - 1)) for w in nonzero}
        vert = self._top_lim.induced(self._bot_lim.groupoid, vert_cones)
        self._fp = two_fiber_product(comp_t, vert)
        self._comp_t = comp_t
        self.groupoid = self._fp.groupoid
        projections = {t_vertex + (1,): self._fp.pr_a}
        to_top_lim = self._fp.pr_a.then(comp_t)
        for w in nonzero:
            projections[w + (0,)] = self._fp.pr_b.then(self._bot_lim.projections[w])
            projections[w + (1,)] = to_top_lim.then(self._top_lim.projections[w])
        self.projections = projections

    def induced(self, x: SkeletalGroupoid, cones: dict) -> GroupoidFunctor:
        """Comparison functor X -> limit from a strict cone over the punctured cube."""
        if self.dim == 1:
            return cones[(1,)]
        d = self.dim
        cone_t = cones[(0,) * (d - 1) + (1,)]
        cone_bot = self._bot_lim.induced(x, {w: cones[w + (0,)] for w in self._bot_lim.projections})
        return induced_into_fiber_product(self._fp, x, cone_t, cone_bot)


def is_pullback_cube(cube: CommutingCube) -> bool:
    """True iff the initial vertex is the limit of the punctured cube."""
    cube.validate_commutes()
    lim = PuncturedLimit(cube)
    initial = (0,) * cube.dim
    cones = {v: cube.edge_composite(initial, v) for v in cube.vertices if v != initial}
    cmp = lim.induced(cube.vertices[initial], cones)
    return is_equivalence(cmp)


def square_as_cube(sq: CommutingSquare) -> CommutingCube:
    verts = {(0, 0): sq.p, (1, 0): sq.a, (0, 1): sq.b, (1, 1): sq.c}
    edges = {((0, 0), 0): sq.f, ((0, 0), 1): sq.g, ((1, 0), 1): sq.bottom, ((0, 1), 0): sq.right}
    return CommutingCube(2, verts, edges)


def cube_face_square(cube: CommutingCube, axis: int, value: int) -> CommutingSquare:
    """A 2-dimensional face of a 3-cube as a CommutingSquare."""
    face = cube.subcube(axis, value)
    assert face.dim == 2
    return CommutingSquare(
        p=face.vertices[(0, 0)], a=face.vertices[(1, 0)],
        b=face.vertices[(0, 1)], c=face.vertices[(1, 1)],
        f=face.edge((0, 0), 0), g=face.edge((0, 0), 1),
        bottom=face.edge((1, 0), 1), right=face.edge((0, 1), 0),
    )


M = "M"


class CorrespondenceCube:
    """A d-cube of correspondences: entries over {0,M,1}^d with arrows
    from every M-coordinate toward its 0- and 1-resolutions."""

    def __init__(self, dim: int, entries: dict, arrows: dict):
        self.dim = dim
        self.entries = dict(entries)  # coords in {0,M,1}^d -> SkeletalGroupoid
        self.arrows = dict(arrows)    # (coords, axis, resolved value) -> GroupoidFunctor
        assert len(self.entries) == 3 ** dim

    def corner_cube(self, corner) -> CommutingCube:
        """The 2^d subcube spanned between the all-M center and a corner."""
        verts, edges = {}, {}
        for bits in itertools.product((0, 1), repeat=self.dim):
            coords = tuple(M if b == 0 else corner[i] for i, b in enumerate(bits))
            verts[bits] = self.entries[coords]
        for bits in verts:
            for axis in range(self.dim):
                if bits[axis] == 0:
                    coords = tuple(M if b == 0 else corner[i] for i, b in enumerate(bits))
                    edges[(bits, axis)] = self.arrows[(coords, axis, corner[axis])]
        return CommutingCube(self.dim, verts, edges)


def alternating_corners(dim: int):
    c1 = tuple(1 if i % 2 == 0 else 0 for i in range(dim))
    c2 = tuple(0 if i % 2 == 0 else 1 for i in range(dim))
    return c1, c2


def is_commutative_corr_cube(cc: CorrespondenceCube) -> bool:
    """True iff the two alternating-corner subcubes are pullback cubes."""
    if cc.dim < 2:
        return True
    for corner in alternating_corners(cc.dim):
        cube = cc.corner_cube(corner)
        if cc.dim == 2:
            sq = CommutingSquare(
                p=cube.vertices[(0, 0)], a=cube.vertices[(1, 0)],
                b=cube.vertices[(0, 1)], c=cube.vertices[(1, 1)],
                f=cube.edge((0, 0), 0), g=cube.edge((0, 0), 1),
                bottom=cube.edge((1, 0), 1), right=cube.edge((0, 1), 0),
            )
            if not is_pullback_square(sq):
                return False
        else:
            if not is_pullback_cube(cube):
                return False
    return True


def discrete_functor(src: SkeletalGroupoid, dst: SkeletalGroupoid, mapping: dict) -> GroupoidFunctor:
    e = trivial_identity()
    return GroupoidFunctor(src, dst, dict(mapping), {l: {e: e} for l in src.labels()})
