"""Combinatorics of cut complexes inside a standard simplex.

An n-element ordered set has n+1 cut points (monotone maps to {0 < 1});
they are the vertices of the simplex Delta^n.  A monotone map f: X -> Y
determines, for each y in Y, a consecutive block of cut points of X,
and the union of the full faces spanned by these blocks is the cut
complex of f. For the identity this is the spine; for the surjection
onto one point it is the whole simplex.

Cubes of monotone maps produce 3^d grids of cut complexes, all embedded
in the simplex of the cube's initial object; the grid maps are simply
inclusions of subcomplexes.  The d-dimensional associativity cube
collapses adjacency gaps one at a time; its monotone paths are the ways
of bracketing a product.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


@dataclass(frozen=True)
class SubComplex:
    """A downward-closed set of nonempty faces on the vertices 0..ambient."""

    ambient: int
    faces: frozenset  # frozenset of frozensets of vertex indices

    @staticmethod
    def make(ambient: int, generating_faces) -> "SubComplex":
        faces = set()
        for face in generating_faces:
            face = tuple(sorted(face))
            assert all(0 <= v <= ambient for v in face)
            for r in range(1, len(face) + 1):
                for sub in itertools.combinations(face, r):
                    faces.add(frozenset(sub))
        return SubComplex(ambient, frozenset(faces))

    @staticmethod
    def full_simplex(ambient: int) -> "SubComplex":
        return SubComplex.make(ambient, [range(ambient + 1)])

    def vertices(self) -> tuple:
        out = set()
        for f in self.faces:
            out |= f
        return tuple(sorted(out))

    def maximal_faces(self) -> tuple:
        maximal = [f for f in self.faces if not any(f < g for g in self.faces)]
        return tuple(sorted(maximal, key=lambda f: (len(f), sorted(f))))

    def is_downward_closed(self) -> bool:
        for f in self.faces:
            for r in range(1, len(f)):
                for sub in itertools.combinations(sorted(f), r):
                    if frozenset(sub) not in self.faces:
                        return False
        return True

    def union(self, other: "SubComplex") -> "SubComplex":
        assert self.ambient == other.ambient
        return SubComplex(self.ambient, self.faces | other.faces)

    def __le__(self, other: "SubComplex") -> bool:
        return self.ambient == other.ambient and self.faces <= other.faces

    def pushforward(self, vertex_map, new_ambient: int) -> "SubComplex":
        """Relabel along an injective vertex map into a larger simplex."""
        return SubComplex.make(new_ambient, [[vertex_map[v] for v in f] for f in self.maximal_faces()])

    def render(self) -> str:
        """Sorted maximal-face list, for golden-file comparisons."""
        return " ".join("[" + " ".join(map(str, sorted(f))) + "]" for f in self.maximal_faces())


@dataclass(frozen=True)
class DeltaPlusMap:
    """A monotone map between finite ordered sets of sizes src and dst."""

    src: int
    dst: int
    values: tuple  # length src, entries in 0..dst-1, nondecreasing

    def __post_init__(self):
        assert len(self.values) == self.src
        assert all(0 <= v < self.dst for v in self.values)
        assert all(a <= b for a, b in zip(self.values, self.values[1:])), "map not monotone"

    @staticmethod
    def identity(n: int) -> "DeltaPlusMap":
        return DeltaPlusMap(n, n, tuple(range(n)))

    @staticmethod
    def gap_collapse(k: int, gap: int) -> "DeltaPlusMap":
        """The surjection ord{k} -> ord{k-1} merging elements gap-1 and gap
        (gap is 1-based, 1 <= gap <= k-1)."""
        assert 1 <= gap <= k - 1
        return DeltaPlusMap(k, k - 1, tuple(t if t < gap else t - 1 for t in range(k)))

    def then(self, other: "DeltaPlusMap") -> "DeltaPlusMap":
        assert self.dst == other.src
        return DeltaPlusMap(self.src, other.dst, tuple(other.values[v] for v in self.values))

    def is_surjective(self) -> bool:
        return set(self.values) == set(range(self.dst))

    def block_bounds(self) -> tuple:
        """Per target element y, the cut-point interval [lo_y, hi_y] of the source."""
        out = []
        for y in range(self.dst):
            lo = sum(1 for v in self.values if v < y)
            hi = sum(1 for v in self.values if v <= y)
            out.append((lo, hi))
        return tuple(out)

    def cut_embedding(self) -> tuple:
        """Vertex map aug(dst) -> aug(src): cut k goes to #{x : f(x) < k}."""
        return tuple(sum(1 for v in self.values if v < k) for k in range(self.dst + 1))


def augmentation(n: int) -> tuple:
    """The n+1 cut points of an n-element ordered set, as 0/1 tuples.

    Cut k sends the first k elements to 0 and the rest to 1."""
    return tuple(tuple(0 if i < k else 1 for i in range(n)) for k in range(n + 1))


def cut_complex(f: DeltaPlusMap) -> SubComplex:
    """The union of the full faces spanned by the cut blocks of f.

    Lives in the simplex on the cut points of the source.  The identity
    gives the spine; a constant surjection gives the full simplex; an
    empty-preimage target element contributes a single vertex."""
    if f.dst == 0:
        assert f.src == 0
        return SubComplex.make(0, [[0]])
    return SubComplex.make(f.src, [range(lo, hi + 1) for lo, hi in f.block_bounds()])


def spine(n: int) -> SubComplex:
    return cut_complex(DeltaPlusMap.identity(n))


class DeltaPlusCube:
    """A commuting d-cube of monotone maps, arrows away from the 0...0 vertex."""

    def __init__(self, dim: int, vertex_sizes: dict, edges: dict):
        self.dim = dim
        self.vertex_sizes = dict(vertex_sizes)   # bits -> ord size
        self.edges = dict(edges)                 # (bits, axis) -> DeltaPlusMap
        for (v, axis), f in self.edges.items():
            assert v[axis] == 0
            w = v[:axis] + (1,) + v[axis + 1:]
            assert f.src == self.vertex_sizes[v] and f.dst == self.vertex_sizes[w]

    def edge(self, v, axis) -> DeltaPlusMap:
        return self.edges[(v, axis)]

    def composite(self, v_from, v_to) -> DeltaPlusMap:
        assert all(a <= b for a, b in zip(v_from, v_to))
        out = DeltaPlusMap.identity(self.vertex_sizes[v_from])
        cur = v_from
        for axis in range(self.dim):
            if v_from[axis] < v_to[axis]:
                out = out.then(self.edge(cur, axis))
                cur = cur[:axis] + (1,) + cur[axis + 1:]
        return out

    def commutes(self) -> bool:
        for v in self.vertex_sizes:
            for i in range(self.dim):
                for j in range(i + 1, self.dim):
                    if v[i] or v[j]:
                        continue
                    vi = v[:i] + (1,) + v[i + 1:]
                    vj = v[:j] + (1,) + v[j + 1:]
                    if self.edge(v, i).then(self.edge(vi, j)) != self.edge(v, j).then(self.edge(vj, i)):
                        return False
        return True

    def subcube(self, axis: int, value: int) -> "DeltaPlusCube":
        sizes = {v[:axis] + v[axis + 1:]: s for v, s in self.vertex_sizes.items() if v[axis] == value}
        edges = {}
        for (v, ax), f in self.edges.items():
            if v[axis] == value and ax != axis:
                edges[(v[:axis] + v[axis + 1:], ax if ax < axis else ax - 1)] = f
        return DeltaPlusCube(self.dim - 1, sizes, edges)

    def edge_labels(self):
        """Multiset of (source size, map) pairs over all edges."""
        return [((self.vertex_sizes[v]), f) for (v, _), f in sorted(self.edges.items())]


M = "M"


@dataclass(frozen=True)
class CorrGrid:
    """The 3^d grid of cut complexes of a cube, all in one ambient simplex."""

    dim: int
    ambient: int
    entries: dict  # coords in {0, M, 1}^d -> SubComplex

    def entry(self, coords) -> SubComplex:
        return self.entries[coords]


def _resolve(coords, m_to: int) -> tuple:
    return tuple(m_to if c == M else c for c in coords)


def grid_complexes(cube: DeltaPlusCube) -> CorrGrid:
    """Entry at v in {0,M,1}^d: the cut complex of the composite from the
    all-M-to-0 resolution to the all-M-to-1 resolution, pushed into the
    simplex of the cube's initial object."""
    if not cube.commutes():
        raise ValueError("cube of monotone maps does not commute")
    initial = (0,) * cube.dim
    ambient = cube.vertex_sizes[initial]
    entries = {}
    for coords in itertools.product((0, M, 1), repeat=cube.dim):
        a = _resolve(coords, 0)
        b = _resolve(coords, 1)
        inner = cut_complex(cube.composite(a, b))
        emb = cube.composite(initial, a).cut_embedding()
        entries[coords] = inner.pushforward(emb, ambient)
    return CorrGrid(cube.dim, ambient, entries)


# ---------------------------------------------------------------------------
# associativity cubes


def _blocks(n: int, collapsed_gaps) -> list:
    """Partition of 1..n into maximal runs merged at the given gaps.

    Gap g sits between elements g and g+1 (1-based)."""
    blocks = []
    cur = [1]
    for x in range(2, n + 1):
        if (x - 1) in collapsed_gaps:
            cur.append(x)
        else:
            blocks.append(cur)
            cur = [x]
    blocks.append(cur)
    return blocks


def associativity_cube(n: int) -> DeltaPlusCube:
    """The commuting (n-1)-cube of gap collapses of an n-element set.

    Vertices are indexed by subsets S of the n-1 adjacency gaps; the
    vertex at S is the (n-|S|)-element quotient, and the edge along gap
    g collapses the image of g.  Monotone paths from the initial to the
    final vertex correspond to the ways of bracketing n letters."""
    if n < 3:
        raise ValueError("associativity cubes need n >= 3")
    dim = n - 1
    sizes = {}
    edges = {}
    for bits in itertools.product((0, 1), repeat=dim):
        gaps = {i + 1 for i, b in enumerate(bits) if b}
        sizes[bits] = n - len(gaps)
    for bits in sizes:
        gaps = {i + 1 for i, b in enumerate(bits) if b}
        blocks = _blocks(n, gaps)
        for axis in range(dim):
            if bits[axis]:
                continue
            g = axis + 1
            block_idx = next(i for i, blk in enumerate(blocks) if g in blk)
            edges[(bits, axis)] = DeltaPlusMap.gap_collapse(sizes[bits], block_idx + 1)
    cube = DeltaPlusCube(dim, sizes, edges)
    assert cube.commutes()
    return cube


def bracketing_paths(cube: DeltaPlusCube):
    """All monotone edge paths from the initial to the final vertex."""
    paths = []
    for order in itertools.permutations(range(cube.dim)):
        cur = (0,) * cube.dim
        path = []
        for axis in order:
            path.append((cur, axis))
            cur = cur[:axis] + (1,) + cur[axis + 1:]
        paths.append(tuple(path))
    return paths


def _required_labels(n: int):
    """All one-step surjections ord{j} -> ord{j-1}, 2 <= j <= n, as (j, gap)."""
    return {(j, g) for j in range(2, n + 1) for g in range(1, j)}


def _lift(a: int, c: int) -> int:
    # original gap merged by collapsing gap c after gap a has been collapsed
    return c if c < a else c + 1


def verify_associativity_cube_unique(n: int):
    """Exhaustive search for commuting (n-1)-cubes of one-step collapses
    containing every surjection ord{j} -> ord{j-1}.

    The containment requirement forces the vertex at level L to be the
    (n-L)-element set, so edges are one-step collapses and the search
    space is the choice of a gap per edge.  A face commutes iff both
    composites merge the same pair of original gaps, which pins the
    last-assigned edge of every face; the search propagates that.
    Returns (unique, witness); unique means every solution is an axis
    permutation of associativity_cube(n)."""
    if n > 5:
        raise ValueError("uniqueness search bounded at n <= 5")
    dim = n - 1
    slots = []
    for bits in itertools.product((0, 1), repeat=dim):
        level = sum(bits)
        for axis in range(dim):
            if bits[axis] == 0:
                slots.append((level, bits, axis))
    slots.sort()
    slot_order = {(bits, axis): i for i, (_lvl, bits, axis) in enumerate(slots)}
    sizes = {bits: n - sum(bits) for bits in itertools.product((0, 1), repeat=dim)}

    # faces: (e_i, e_j, f_j, f_i) with f_j completing e_i and f_i completing e_j
    checks_by_slot = {}
    for bits in sizes:
        for i in range(dim):
            for j in range(i + 1, dim):
                if bits[i] or bits[j]:
                    continue
                vi = bits[:i] + (1,) + bits[i + 1:]
                vj = bits[:j] + (1,) + bits[j + 1:]
                face = ((bits, i), (bits, j), (vi, j), (vj, i))
                last = max(face, key=lambda s: slot_order[s])
                checks_by_slot.setdefault(last, []).append(face)

    solutions = []

    def forced_values(slot, assign):
        # intersect the unique solutions of every face whose last edge is slot
        out = None
        for e_i, e_j, f_j, f_i in checks_by_slot.get(slot, ()):
            base_size = sizes[e_i[0]]
            if slot == f_i:
                a, c, b = assign[e_i], assign[f_j], assign[e_j]
            else:
                a, c, b = assign[e_j], assign[f_i], assign[e_i]
            merged = (a, _lift(a, c))
            if b not in merged:
                return set()
            x = merged[0] if merged[1] == b else merged[1]
            if x == b:  # both composites must merge two distinct gaps
                return set()
            d = x if x < b else x - 1
            if not 1 <= d <= base_size - 2:
                return set()
            out = {d} if out is None else out & {d}
            if not out:
                return out
        return out

    def dfs(idx, assign):
        if idx == len(slots):
            used = {(sizes[bits], gap) for (bits, _axis), gap in assign.items()}
            if used >= _required_labels(n):
                solutions.append(dict(assign))
            return
        _level, bits, axis = slots[idx]
        slot = (bits, axis)
        candidates = forced_values(slot, assign)
        if candidates is None:
            candidates = range(1, sizes[bits])
        for gap in candidates:
            assign[slot] = gap
            dfs(idx + 1, assign)
            del assign[slot]

    dfs(0, {})

    canonical = associativity_cube(n)
    canon_assigns = set()
    for perm in itertools.permutations(range(dim)):
        enc = []
        for bits in itertools.product((0, 1), repeat=dim):
            for axis in range(dim):
                if bits[axis] == 0:
                    # new cube edge (bits, axis) = old edge at the permuted
                    # vertex along the permuted axis
                    old_v = tuple(bits[perm.index(i)] for i in range(dim))
                    f = canonical.edge(old_v, perm[axis])
                    gap = next(t + 1 for t in range(f.src - 1) if f.values[t] == f.values[t + 1])
                    enc.append(((bits, axis), gap))
        canon_assigns.add(tuple(sorted(enc)))
    found = {tuple(sorted(sol.items())) for sol in solutions}
    unique = found == canon_assigns
    return unique, canonical
