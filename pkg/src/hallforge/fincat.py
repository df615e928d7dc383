"""Finitary categories at desk scale: Vect_{F_q}, acyclic quiver
representations over F_q, and the slice category over a fixed vector
space.

Each category is described by a :class:`CategorySpec`; its isomorphism
classes are :class:`IsoClass` values carrying a canonical representative
and the automorphism group.  Iso classes of quiver representations are
found by explicit orbit search under products of general linear groups;
no Krull-Schmidt machinery is needed at total dimension <= 4.

The slice category over ``V`` has objects ``(S, f: S -> V)``; its epis
are the surjections over ``V``, its monos are injections out of objects
with zero structure map, and its zero subcategory consists of the two
pseudo-zero objects ``0 -> V`` and ``V = V``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

from hallforge.qlinalg import (
    Matrix,
    Subspace,
    enumerate_subspaces,
    general_linear_group,
    general_linear_order,
    make_field,
    quotient_map,
    quotient_section,
)

VECT_BOUND = 6
QUIVER_BOUND = 4
SLICE_BOUND = 4


class BoundExceededError(ValueError):
    """An enumeration bound of the desk-scale engine was exceeded."""


@dataclass(frozen=True)
class Quiver:
    vertices: int
    arrows: tuple  # tuple of (source, target) pairs, 0-indexed

    def __post_init__(self):
        for s, t in self.arrows:
            if not (0 <= s < self.vertices and 0 <= t < self.vertices):
                raise ValueError(f"arrow ({s},{t}) out of range")
        if self.vertices > 3:
            raise BoundExceededError("quivers limited to at most 3 vertices")
        # acyclicity by repeated sink removal
        remaining = set(range(self.vertices))
        arrows = set(self.arrows)
        while remaining:
            sinks = {v for v in remaining if not any(s == v for s, t in arrows)}
            if not sinks:
                raise ValueError("quiver has an oriented cycle")
            remaining -= sinks
            arrows = {(s, t) for s, t in arrows if t not in sinks}


def load_quiver(source) -> Quiver:
    """Parse the quiver JSON format {"vertices": n, "arrows": [[s,t],...]}."""
    if isinstance(source, (str, bytes)):
        data = json.loads(source)
    else:
        data = source
    return Quiver(int(data["vertices"]), tuple((int(s), int(t)) for s, t in data["arrows"]))


A2_ARROWS = ((0, 1),)


@dataclass(frozen=True)
class CategorySpec:
    kind: str                    # "vect" | "quiver" | "slice"
    field: object
    quiver: Quiver | None = None
    slice_dim: int | None = None  # slice target V = F^slice_dim (base: vect)

    def __post_init__(self):
        assert self.kind in ("vect", "quiver", "slice")
        if self.kind == "quiver":
            assert self.quiver is not None
        if self.kind == "slice":
            assert self.slice_dim is not None

    @property
    def bound(self) -> int:
        return {"vect": VECT_BOUND, "quiver": QUIVER_BOUND, "slice": SLICE_BOUND}[self.kind]


def vect(q: int, k: int = 1) -> CategorySpec:
    return CategorySpec("vect", make_field(q, k))


def quiver_rep(q: int, quiver: Quiver) -> CategorySpec:
    return CategorySpec("quiver", make_field(q, 1), quiver=quiver)


def a2_quiver(q: int) -> CategorySpec:
    return CategorySpec("quiver", make_field(q, 1), quiver=Quiver(2, A2_ARROWS))


def slice_category(base: CategorySpec, target_dim: int) -> CategorySpec:
    """The slice category over V = F^target_dim of a Vect base."""
    if base.kind != "vect":
        raise ValueError("slice categories are supported over Vect bases only")
    return CategorySpec("slice", base.field, slice_dim=target_dim)


@dataclass(frozen=True)
class QuiverRep:
    dims: tuple
    maps: tuple  # Matrix per arrow, aligned with spec.quiver.arrows


@dataclass(frozen=True)
class SliceObj:
    dim: int
    fmap: Matrix  # slice_dim x dim structure map to V


class IsoClass:
    """An isomorphism class with a canonical representative and its Aut."""

    def __init__(self, spec: CategorySpec, label: tuple, grading, dim_total: int,
                 rep, aut_order: int, aut: tuple | None = None):
        self.spec = spec
        self.label = label
        self.grading = grading
        self.dim_total = dim_total
        self.rep = rep
        self.aut_order = aut_order
        self._aut = aut

    def __eq__(self, other):
        return isinstance(other, IsoClass) and (self.spec, self.label) == (other.spec, other.label)

    def __hash__(self):
        return hash((self.spec, self.label))

    def __repr__(self):
        return f"IsoClass({self.label})"

    def aut_elements(self) -> tuple:
        if self._aut is None:
            assert self.spec.kind == "vect"
            self._aut = general_linear_group(self.grading, self.spec.field)
        return self._aut


# ---------------------------------------------------------------------------
# quiver representation classification


def _rep_encoding(rep: QuiverRep):
    return (rep.dims, tuple(m.entries for m in rep.maps))


@lru_cache(maxsize=None)
def _product_gl(field, dims: tuple) -> tuple:
    groups = [general_linear_group(d, field) for d in dims]
    return tuple(itertools.product(*groups))


def _act(g, rep: QuiverRep, arrows) -> QuiverRep:
    maps = []
    for (s, t), m in zip(arrows, rep.maps):
        maps.append(g[t] @ m @ g[s].inverse())
    return QuiverRep(rep.dims, tuple(maps))


@lru_cache(maxsize=None)
def _quiver_orbits(spec: CategorySpec, dims: tuple):
    """Orbit classification of all reps with the given dimension vector.

    Returns (classes, lookup) where classes is a list of
    (canonical QuiverRep, stabilizer tuple) and lookup maps every rep
    encoding to its class index.
    """
    F = spec.field
    arrows = spec.quiver.arrows
    shapes = [(dims[t], dims[s]) for s, t in arrows]
    spaces = []
    for rows, cols in shapes:
        mats = [Matrix(F, rows, cols, tuple(flat[i * cols:(i + 1) * cols] for i in range(rows)))
                for flat in itertools.product(F.elements(), repeat=rows * cols)]
        spaces.append(mats)
    group = _product_gl(F, dims)
    lookup = {}
    classes = []
    for maps in itertools.product(*spaces) if spaces else [()]:
        rep = QuiverRep(dims, tuple(maps))
        enc = _rep_encoding(rep)
        if enc in lookup:
            continue
        orbit = {}
        stab = []
        for g in group:
            moved = _act(g, rep, arrows)
            orbit[_rep_encoding(moved)] = None
            if moved == rep:
                stab.append(g)
        canon_enc = min(orbit)
        idx = len(classes)
        for enc2 in orbit:
            lookup[enc2] = idx
        canon = QuiverRep(dims, tuple(
            Matrix(F, sh[0], sh[1], ent) for sh, ent in zip(shapes, canon_enc[1])))
        # store the stabilizer of the canonical representative
        canon_stab = tuple(g for g in group if _act(g, canon, arrows) == canon)
        classes.append((canon, canon_stab))
    return tuple(classes), lookup


def _quiver_class(spec: CategorySpec, rep: QuiverRep) -> IsoClass:
    classes, lookup = _quiver_orbits(spec, rep.dims)
    idx = lookup[_rep_encoding(rep)]
    canon, stab = classes[idx]
    return IsoClass(spec, ("q", rep.dims, idx), rep.dims, sum(rep.dims), canon, len(stab), stab)


# ---------------------------------------------------------------------------
# slice object classification


def _slice_fmap(field, v_dim: int, s_dim: int, image: Subspace) -> Matrix:
    """Canonical structure map F^s -> V with the given image subspace."""
    cols = []
    for i in range(s_dim):
        if i < image.dim:
            cols.append(image.basis[i])
        else:
            cols.append((0,) * v_dim)
    return Matrix.from_rows(field, cols).transpose() if cols else Matrix(field, v_dim, 0, ())


@lru_cache(maxsize=None)
def _slice_aut(spec: CategorySpec, s_dim: int, image_basis: tuple) -> tuple:
    F = spec.field
    image = Subspace(F, spec.slice_dim, image_basis)
    fmap = _slice_fmap(F, spec.slice_dim, s_dim, image)
    return tuple(g for g in general_linear_group(s_dim, F) if fmap @ g == fmap)


def _slice_class(spec: CategorySpec, obj: SliceObj) -> IsoClass:
    image = obj.fmap.column_space()
    label = ("s", obj.dim, image.basis)
    aut = _slice_aut(spec, obj.dim, image.basis)
    canon = SliceObj(obj.dim, _slice_fmap(spec.field, spec.slice_dim, obj.dim, image))
    return IsoClass(spec, label, (obj.dim, image.dim), obj.dim, canon, len(aut), aut)


# ---------------------------------------------------------------------------
# public operations


def iso_class_of(spec: CategorySpec, rep) -> IsoClass:
    """The IsoClass of a concrete object."""
    if spec.kind == "vect":
        n = rep if isinstance(rep, int) else rep.rows
        return IsoClass(spec, ("v", n), n, n, n, general_linear_order(n, spec.field))
    if spec.kind == "quiver":
        return _quiver_class(spec, rep)
    return _slice_class(spec, rep)


def objects_up_to(spec: CategorySpec, bound: int):
    """One IsoClass per isomorphism class of total grading <= bound."""
    if bound > spec.bound:
        raise BoundExceededError(f"bound {bound} exceeds {spec.kind} limit {spec.bound}")
    out = []
    if spec.kind == "vect":
        for n in range(bound + 1):
            out.append(iso_class_of(spec, n))
    elif spec.kind == "quiver":
        nv = spec.quiver.vertices
        for dims in itertools.product(range(bound + 1), repeat=nv):
            if sum(dims) > bound:
                continue
            classes, _ = _quiver_orbits(spec, dims)
            for idx, (canon, stab) in enumerate(classes):
                out.append(IsoClass(spec, ("q", dims, idx), dims, sum(dims), canon, len(stab), stab))
    else:
        F = spec.field
        for s in range(bound + 1):
            for r in range(min(s, spec.slice_dim) + 1):
                for image in enumerate_subspaces(spec.slice_dim, r, F):
                    obj = SliceObj(s, _slice_fmap(F, spec.slice_dim, s, image))
                    out.append(_slice_class(spec, obj))
    out.sort(key=lambda c: _label_sort_key(c.label))
    return out


def _label_sort_key(label):
    def key(x):
        if isinstance(x, tuple):
            return (2, tuple(key(y) for y in x))
        if isinstance(x, str):
            return (1, x)
        return (0, x)

    return key(label)


# ---------------------------------------------------------------------------
# subobjects, quotients, exact sequences


def subobjects(spec: CategorySpec, rep):
    """All subobjects of a concrete object, as canonical sub-data.

    vect: Subspace of F^n.  quiver: per-vertex Subspace tuple invariant
    under the arrow maps.  slice: Subspace contained in ker(f), the
    source of a mono in the slice category.
    """
    F = spec.field
    if spec.kind == "vect":
        n = rep if isinstance(rep, int) else rep
        for k in range(n + 1):
            yield from enumerate_subspaces(n, k, F)
        return
    if spec.kind == "quiver":
        per_vertex = []
        for d in rep.dims:
            per_vertex.append([s for k in range(d + 1) for s in enumerate_subspaces(d, k, F)])
        for combo in itertools.product(*per_vertex):
            ok = True
            for (s, t), m in zip(spec.quiver.arrows, rep.maps):
                for v in combo[s].basis:
                    if not combo[t].contains(m.apply(v)):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                yield combo
        return
    # slice: subobject sources are zero-structured, so they live in ker f
    kernel = Subspace.from_vectors(F, rep.dim, rep.fmap.kernel_basis())
    for k in range(kernel.dim + 1):
        for sub in enumerate_subspaces(rep.dim, k, F):
            if sub <= kernel:
                yield sub


def sub_quotient_classes(spec: CategorySpec, rep, sub):
    """(IsoClass of the subobject, IsoClass of the quotient)."""
    F = spec.field
    if spec.kind == "vect":
        n = rep if isinstance(rep, int) else rep
        return iso_class_of(spec, sub.dim), iso_class_of(spec, n - sub.dim)
    if spec.kind == "quiver":
        sub_maps, quot_maps = [], []
        sections = [quotient_section(s) for s in sub]
        projs = [quotient_map(s)[1] for s in sub]
        for (s, t), m in zip(spec.quiver.arrows, rep.maps):
            basis_s = sub[s].basis
            cols = []
            for v in basis_s:
                w = m.apply(v)
                cols.append(tuple(w[p] for p in sub[t].pivots()))
            if basis_s:
                sub_maps.append(Matrix.from_rows(F, cols).transpose())
            else:
                sub_maps.append(Matrix(F, sub[t].dim, 0, ()))
            quot_maps.append(projs[t] @ m @ sections[s])
        sub_rep = QuiverRep(tuple(s.dim for s in sub), tuple(sub_maps))
        quot_rep = QuiverRep(tuple(rep.dims[i] - sub[i].dim for i in range(len(sub))), tuple(quot_maps))
        return iso_class_of(spec, sub_rep), iso_class_of(spec, quot_rep)
    # slice
    sub_class = _slice_class(spec, SliceObj(sub.dim, Matrix(F, spec.slice_dim, sub.dim,
                                                            tuple((0,) * sub.dim for _ in range(spec.slice_dim)))))
    qdim, proj = quotient_map(sub)
    fbar = rep.fmap @ quotient_section(sub)
    quot_class = _slice_class(spec, SliceObj(qdim, fbar))
    return sub_class, quot_class


class ExactSequenceClass:
    """An iso class of short exact sequences 0 -> U -> V -> W -> 0.

    Carries the middle class, a representative mono/epi pair, and the
    diagram automorphism group (the stabilizer of the subobject inside
    Aut of the middle)."""

    def __init__(self, u: IsoClass, middle: IsoClass, w: IsoClass, mono, epi,
                 aut_order: int, aut=None):
        self.u = u
        self.middle = middle
        self.w = w
        self.mono = mono
        self.epi = epi
        self.aut_order = aut_order
        self._aut = aut

    def aut_elements(self):
        return self._aut

    def __repr__(self):
        return f"ExactSequence({self.u.label} -> {self.middle.label} -> {self.w.label})"


def _slice_grid_admissible(spec: CategorySpec, quot_class: IsoClass) -> bool:
    # extended proto-abelian grids end at a pseudo-zero: the final quotient's
    # structure map must be zero (ending at 0 -> V) or onto (ending at V = V)
    s, image_basis = quot_class.label[1], quot_class.label[2]
    image_dim = len(image_basis)
    return image_dim == 0 or image_dim == spec.slice_dim


def exact_sequences(spec: CategorySpec, u: IsoClass, w: IsoClass):
    """All iso classes of sequences 0 -> U -> V -> W -> 0, grouped by middle."""
    out = []
    for middle in _middle_candidates(spec, u, w):
        rep = middle.rep
        aut = middle.aut_elements()
        remaining = {}
        for sub in subobjects(spec, rep):
            sub_class, quot_class = sub_quotient_classes(spec, rep, sub)
            if sub_class == u and quot_class == w:
                remaining[_sub_key(spec, sub)] = sub
        while remaining:
            key = min(remaining)
            sub = remaining.pop(key)
            stab = []
            for g in aut:
                moved = _move_sub(spec, g, sub)
                mk = _sub_key(spec, moved)
                if mk == key:
                    stab.append(g)
                else:
                    remaining.pop(mk, None)
            mono, epi = _mono_epi_of_sub(spec, rep, sub)
            out.append(ExactSequenceClass(u, middle, w, mono, epi, len(stab), tuple(stab)))
    return out


def _middle_candidates(spec: CategorySpec, u: IsoClass, w: IsoClass):
    if spec.kind == "vect":
        return [iso_class_of(spec, u.grading + w.grading)]
    if spec.kind == "quiver":
        dims = tuple(a + b for a, b in zip(u.grading, w.grading))
        classes, _ = _quiver_orbits(spec, dims)
        return [IsoClass(spec, ("q", dims, i), dims, sum(dims), c, len(s), s)
                for i, (c, s) in enumerate(classes)]
    # slice: mono sources are zero-structured
    if len(u.label[2]) != 0:
        return []
    s_total = u.dim_total + w.dim_total
    out = []
    for cls in objects_up_to(spec, s_total):
        if cls.dim_total == s_total and _slice_grid_admissible(spec, w):
            out.append(cls)
    return out


def _sub_key(spec, sub):
    if spec.kind == "quiver":
        return tuple(s.basis for s in sub)
    return sub.basis


def _move_sub(spec, g, sub):
    F = spec.field
    if spec.kind == "quiver":
        return tuple(Subspace.from_vectors(F, s.ambient, [g[i].apply(v) for v in s.basis])
                     for i, s in enumerate(sub))
    return Subspace.from_vectors(F, sub.ambient, [g.apply(v) for v in sub.basis])


def _mono_epi_of_sub(spec, rep, sub):
    F = spec.field
    if spec.kind == "quiver":
        monos, epis = [], []
        for s in sub:
            monos.append(Matrix.from_rows(F, s.basis).transpose() if s.basis else Matrix(F, s.ambient, 0, ()))
            epis.append(quotient_map(s)[1])
        return tuple(monos), tuple(epis)
    mono = Matrix.from_rows(F, sub.basis).transpose() if sub.basis else Matrix(F, sub.ambient, 0, ())
    return mono, quotient_map(sub)[1]


def subobject_count(spec: CategorySpec, u: IsoClass, w: IsoClass, v: IsoClass) -> int:
    """#{U' <= V : U' iso U and V/U' iso W}, by direct enumeration.

    This is the independent brute-force oracle for Hall structure
    constants."""
    count = 0
    for sub in subobjects(spec, v.rep):
        sub_class, quot_class = sub_quotient_classes(spec, v.rep, sub)
        if sub_class == u and quot_class == w:
            count += 1
    return count


# ---------------------------------------------------------------------------
# bicartesian squares


@dataclass(frozen=True)
class MapSquare:
    """A commuting square with monos across and epis down.

        A --mono--> B
        |epi        |epi
        C --mono--> D
    """

    top: Matrix     # A -> B, injective
    left: Matrix    # A -> C, surjective
    bottom: Matrix  # C -> D, injective
    right: Matrix   # B -> D, surjective


def is_bicartesian(square: MapSquare) -> bool:
    """True iff the square is both a pullback and a pushout of vector spaces."""
    top, left, bottom, right = square.top, square.left, square.bottom, square.right
    if top.cols != left.cols or right.cols != top.rows or bottom.cols != left.rows \
            or right.rows != bottom.rows:
        raise ValueError("maps do not compose")
    if not (top.is_injective() and bottom.is_injective() and left.is_surjective() and right.is_surjective()):
        raise ValueError("expected monos across and epis down")
    F = top.field
    if (right @ top).entries != (bottom @ left).entries:
        raise ValueError("square does not commute")
    dim_a, dim_b, dim_c, dim_d = top.cols, top.rows, left.rows, bottom.rows
    # pullback: A -> B x_D C is an isomorphism onto the fiber product
    fiber_dim = dim_b + dim_c - Matrix.from_rows(
        F, [right.entries[i] + tuple(F.neg(x) for x in bottom.entries[i]) for i in range(dim_d)]
    ).rank() if dim_d else dim_b + dim_c
    induced_rank = Matrix.from_rows(F, list(top.entries) + list(left.entries)).rank() if dim_a else 0
    pullback = induced_rank == dim_a and dim_a == fiber_dim
    # pushout: B +_A C -> D is an isomorphism
    stacked = Matrix.from_rows(F, list(top.entries) + [tuple(F.neg(x) for x in r) for r in left.entries])
    pushout_dim = dim_b + dim_c - (stacked.rank() if dim_a else 0)
    glued = Matrix.from_rows(F, [right.entries[i] + bottom.entries[i] for i in range(dim_d)]) if dim_d \
        else Matrix(F, 0, dim_b + dim_c, ())
    pushout = glued.rank() == dim_d and pushout_dim == dim_d
    return pullback and pushout


# ---------------------------------------------------------------------------
# pseudo-zero objects of slice categories


@dataclass(frozen=True)
class PseudoZero:
    obj: SliceObj
    side: str  # "initial-like" | "terminal-like" | "both"


def slice_hom_count(spec: CategorySpec, src: SliceObj, dst: SliceObj) -> int:
    """#Hom((S,f),(T,g)) over V: maps u with g.u = f."""
    g_image = dst.fmap.column_space()
    if not all(g_image.contains(col) for col in zip(*src.fmap.entries)) and src.dim:
        return 0
    q = spec.field.q
    ker_dim = dst.dim - dst.fmap.rank()
    return q ** (src.dim * ker_dim)


def pseudo_zero_objects(spec: CategorySpec, probe_bound: int = 2):
    """The zero subcategory {0 -> V, V = V}, with the verified side marker."""
    assert spec.kind == "slice"
    F = spec.field
    v = spec.slice_dim
    zero = SliceObj(0, Matrix(F, v, 0, ()))
    ident = SliceObj(v, Matrix.identity(F, v))
    probes = [c.rep for c in objects_up_to(spec, probe_bound)]
    out = []
    for cand in (zero, ident):
        initial = all(slice_hom_count(spec, cand, x) <= 1 for x in probes)
        terminal = all(slice_hom_count(spec, x, cand) <= 1 for x in probes)
        assert initial or terminal, "not a pseudo-zero object"
        side = "both" if initial and terminal else ("initial-like" if initial else "terminal-like")
        out.append(PseudoZero(cand, side))
    return out
