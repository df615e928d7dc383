"""Exact linear algebra over small finite fields.

Conventions used throughout the package:

* Field elements are integers ``0..q-1``.  For prime fields they are the
  usual residues; for prime-power fields ``F_{p^k}`` the integer is the
  base-p digit encoding of a polynomial modulo a fixed irreducible
  polynomial, so ``0`` and ``1`` are always the additive and
  multiplicative units.
* Vectors in ``F^n`` are length-n tuples.  A linear map ``F^n -> F^m``
  is an ``m x n`` :class:`Matrix` acting on column vectors, composition
  is ``@``.
* A :class:`Subspace` of ``F^n`` is stored by its reduced row echelon
  basis, which is the unique canonical representative.

Everything is immutable and safe to share.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

MAX_FIELD_ORDER = 16

# One irreducible polynomial per supported prime power q = p^k, k > 1.
# The polynomial x^k + ... is encoded by the base-p digits of its lower
# coefficients, e.g. x^2 + x + 1 over F_2 -> 0b11 = 3.
_IRREDUCIBLE = {
    (2, 2): 3,   # x^2 + x + 1
    (2, 3): 3,   # x^3 + x + 1
    (2, 4): 3,   # x^4 + x + 1
    (3, 2): 1,   # x^2 + 1
}


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p ** 0.5) + 1))


def _poly_mul_mod(a: int, b: int, p: int, k: int, red: int) -> int:
    # polynomial multiplication in base-p digit encoding, reduced mod
    # the irreducible x^k + red
    da = []
    x = a
    while x:
        da.append(x % p)
        x //= p
    db = []
    x = b
    while x:
        db.append(x % p)
        x //= p
    prod = [0] * (len(da) + len(db))
    for i, ca in enumerate(da):
        for j, cb in enumerate(db):
            prod[i + j] = (prod[i + j] + ca * cb) % p
    # reduce: x^k == -red
    dr = [red // p ** i % p for i in range(k)]
    for deg in range(len(prod) - 1, k - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = 0
            for i in range(k):
                prod[deg - k + i] = (prod[deg - k + i] - c * dr[i]) % p
    return sum(c * p ** i for i, c in enumerate(prod[:k]))


class FiniteField:
    """The field with q = p^k elements, q <= 16, with table arithmetic."""

    def __init__(self, p: int, k: int):
        if not _is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        q = p ** k
        if k < 1 or q > MAX_FIELD_ORDER:
            raise ValueError(f"field order {q} out of supported range 2..{MAX_FIELD_ORDER}")
        self.p = p
        self.k = k
        self.q = q
        if k == 1:
            add = [[(a + b) % p for b in range(q)] for a in range(q)]
            mul = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            red = _IRREDUCIBLE[(p, k)]
            add = [[self._digit_add(a, b) for b in range(q)] for a in range(q)]
            mul = [[_poly_mul_mod(a, b, p, k, red) for b in range(q)] for a in range(q)]
        self._add = tuple(tuple(r) for r in add)
        self._mul = tuple(tuple(r) for r in mul)
        neg = [0] * q
        inv = [0] * q
        for a in range(q):
            for b in range(q):
                if self._add[a][b] == 0:
                    neg[a] = b
                if a and self._mul[a][b] == 1:
                    inv[a] = b
        self._neg = tuple(neg)
        self._inv = tuple(inv)

    def _digit_add(self, a: int, b: int) -> int:
        p, out, mult = self.p, 0, 1
        for _ in range(self.k):
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._inv[a]

    def elements(self) -> range:
        return range(self.q)

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self):
        return hash((FiniteField, self.p, self.k))

    def __repr__(self):
        return f"F{self.q}" if self.k == 1 else f"F{self.q}(=F{self.p}^{self.k})"


@lru_cache(maxsize=None)
def make_field(p: int, k: int = 1) -> FiniteField:
    """Return the (cached, shared) field with p^k elements."""
    return FiniteField(p, k)


@dataclass(frozen=True)
class Matrix:
    """An immutable rows x cols matrix over a FiniteField."""

    field: FiniteField
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        # canonical degenerate shapes: 0 rows -> (), 0 cols -> rows of ()
        if self.rows == 0:
            object.__setattr__(self, "entries", ())
        elif self.cols == 0:
            object.__setattr__(self, "entries", tuple(() for _ in range(self.rows)))

    @staticmethod
    def from_rows(field: FiniteField, rows) -> "Matrix":
        rows = tuple(tuple(r) for r in rows)
        ncols = len(rows[0]) if rows else 0
        assert all(len(r) == ncols for r in rows)
        return Matrix(field, len(rows), ncols, rows)

    @staticmethod
    def zero(field: FiniteField, rows: int, cols: int) -> "Matrix":
        return Matrix(field, rows, cols, tuple((0,) * cols for _ in range(rows)))

    @staticmethod
    def identity(field: FiniteField, n: int) -> "Matrix":
        return Matrix(field, n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        assert self.cols == other.rows, "shape mismatch"
        F = self.field
        if self.cols == 0:
            return Matrix.zero(F, self.rows, other.cols)
        add, mul = F._add, F._mul
        bt = tuple(zip(*other.entries)) if other.entries else ()
        out = []
        for arow in self.entries:
            orow = []
            for bcol in bt:
                s = 0
                for x, y in zip(arow, bcol):
                    s = add[s][mul[x][y]]
                orow.append(s)
            out.append(tuple(orow))
        return Matrix(F, self.rows, other.cols, tuple(out))

    def apply(self, vec) -> tuple:
        assert len(vec) == self.cols
        F = self.field
        add, mul = F._add, F._mul
        out = []
        for row in self.entries:
            s = 0
            for x, y in zip(row, vec):
                s = add[s][mul[x][y]]
            out.append(s)
        return tuple(out)

    def transpose(self) -> "Matrix":
        if self.rows == 0:
            return Matrix(self.field, self.cols, 0, tuple(() for _ in range(self.cols)))
        return Matrix(self.field, self.cols, self.rows, tuple(zip(*self.entries)))

    def hstack(self, other: "Matrix") -> "Matrix":
        assert self.rows == other.rows
        return Matrix(self.field, self.rows, self.cols + other.cols,
                      tuple(a + b for a, b in zip(self.entries, other.entries)))

    def rref(self):
        """Reduced row echelon form; returns (Matrix, pivot column tuple)."""
        F = self.field
        rows = [list(r) for r in self.entries]
        pivots = []
        r = 0
        for c in range(self.cols):
            pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
            if pr is None:
                continue
            rows[r], rows[pr] = rows[pr], rows[r]
            pinv = F.inv(rows[r][c])
            rows[r] = [F.mul(pinv, x) for x in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c]:
                    f = rows[i][c]
                    rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        return Matrix.from_rows(F, rows) if rows else self, tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def inverse(self) -> "Matrix":
        assert self.rows == self.cols
        n = self.rows
        aug = self.hstack(Matrix.identity(self.field, n))
        red, pivots = aug.rref()
        if pivots != tuple(range(n)):
            raise ValueError("matrix is singular")
        return Matrix(self.field, n, n, tuple(r[n:] for r in red.entries))

    def kernel_basis(self) -> tuple:
        """Basis (tuple of length-cols vectors) of {x : self @ x = 0}."""
        F = self.field
        red, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for fc in free:
            v = [0] * self.cols
            v[fc] = 1
            for r, pc in enumerate(pivots):
                v[pc] = F.neg(red.entries[r][fc])
            basis.append(tuple(v))
        return tuple(basis)

    def column_space(self) -> "Subspace":
        return Subspace.from_vectors(self.field, self.rows, tuple(zip(*self.entries)) if self.entries else ())

    def is_injective(self) -> bool:
        return self.rank() == self.cols

    def is_surjective(self) -> bool:
        return self.rank() == self.rows


def all_vectors(field: FiniteField, n: int):
    return itertools.product(field.elements(), repeat=n)


@dataclass(frozen=True)
class Subspace:
    """A subspace of F^n, canonically presented by its RREF row basis."""

    field: FiniteField
    ambient: int
    basis: tuple  # tuple of length-`ambient` tuples, in RREF, no zero rows

    @staticmethod
    def from_vectors(field: FiniteField, ambient: int, vectors) -> "Subspace":
        vectors = tuple(tuple(v) for v in vectors)
        if not vectors:
            return Subspace(field, ambient, ())
        m = Matrix.from_rows(field, vectors)
        red, pivots = m.rref()
        return Subspace(field, ambient, red.entries[:len(pivots)])

    @staticmethod
    def zero(field: FiniteField, ambient: int) -> "Subspace":
        return Subspace(field, ambient, ())

    @staticmethod
    def full(field: FiniteField, ambient: int) -> "Subspace":
        return Subspace(field, ambient, Matrix.identity(field, ambient).entries)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def pivots(self) -> tuple:
        out = []
        for row in self.basis:
            out.append(next(c for c, x in enumerate(row) if x))
        return tuple(out)

    def contains(self, vec) -> bool:
        F = self.field
        v = list(vec)
        for row in self.basis:
            p = next(c for c, x in enumerate(row) if x)
            if v[p]:
                f = v[p]
                v = [F.sub(x, F.mul(f, y)) for x, y in zip(v, row)]
        return not any(v)

    def reduce(self, vec) -> tuple:
        """Canonical representative of vec modulo this subspace."""
        F = self.field
        v = list(vec)
        for row in self.basis:
            p = next(c for c, x in enumerate(row) if x)
            if v[p]:
                f = v[p]
                v = [F.sub(x, F.mul(f, y)) for x, y in zip(v, row)]
        return tuple(v)

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def vectors(self):
        """All q^dim vectors of the subspace."""
        F = self.field
        for coeffs in itertools.product(F.elements(), repeat=self.dim):
            v = [0] * self.ambient
            for c, row in zip(coeffs, self.basis):
                if c:
                    v = [F.add(x, F.mul(c, y)) for x, y in zip(v, row)]
            yield tuple(v)

    def sum_with(self, other: "Subspace") -> "Subspace":
        assert self.ambient == other.ambient
        return Subspace.from_vectors(self.field, self.ambient, self.basis + other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        # x in both spans: row-reduce the stacked kernel construction
        F = self.field
        if not self.basis or not other.basis:
            return Subspace.zero(F, self.ambient)
        stacked = Matrix.from_rows(F, self.basis + other.basis).transpose()
        inter = []
        for coeffs in stacked.kernel_basis():
            v = [0] * self.ambient
            for c, row in zip(coeffs[:self.dim], self.basis):
                if c:
                    v = [F.add(x, F.mul(c, y)) for x, y in zip(v, row)]
            inter.append(tuple(v))
        return Subspace.from_vectors(F, self.ambient, inter)


def enumerate_subspaces(n: int, k: int, field: FiniteField):
    """All k-dimensional subspaces of F^n, one RREF representative each.

    Enumeration order is lexicographic on the flattened echelon matrix,
    so outputs are reproducible.
    """
    if k < 0 or k > n:
        raise ValueError(f"subspace dimension {k} out of range 0..{n}")
    if k == 0:
        return [Subspace.zero(field, n)]
    out = []
    for pivots in itertools.combinations(range(n), k):
        # free positions: to the right of each pivot, not above later pivots
        free = [(r, c) for r in range(k) for c in range(pivots[r] + 1, n) if c not in pivots]
        for vals in itertools.product(field.elements(), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for r, p in enumerate(pivots):
                rows[r][p] = 1
            for (r, c), v in zip(free, vals):
                rows[r][c] = v
            out.append(Subspace(field, n, tuple(tuple(r) for r in rows)))
    out.sort(key=lambda s: s.basis)
    return out


@dataclass(frozen=True)
class QPolynomial:
    """Integer-coefficient polynomial in the formal variable q."""

    coeffs: tuple  # ascending degree, no trailing zeros

    @staticmethod
    def of(*coeffs) -> "QPolynomial":
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        return QPolynomial(tuple(c))

    @staticmethod
    def const(n: int) -> "QPolynomial":
        return QPolynomial.of(n)

    @staticmethod
    def var() -> "QPolynomial":
        return QPolynomial.of(0, 1)

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return QPolynomial.of(*[(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    def __mul__(self, other: "QPolynomial") -> "QPolynomial":
        if not self.coeffs or not other.coeffs:
            return QPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return QPolynomial.of(*out)

    def evaluate(self, q: int) -> int:
        out = 0
        for c in reversed(self.coeffs):
            out = out * q + c
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for d in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[d]
            if not c:
                continue
            if d == 0:
                terms.append(str(c))
            else:
                head = "" if c == 1 else ("-" if c == -1 else str(c))
                terms.append(f"{head}q" if d == 1 else f"{head}q^{d}")
        return " + ".join(terms).replace("+ -", "- ")


@lru_cache(maxsize=None)
def gaussian_binomial(n: int, k: int) -> QPolynomial:
    """q-binomial coefficient via the q-Pascal recursion [n,k] = [n-1,k-1] + q^k [n-1,k]."""
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"invalid q-binomial parameters ({n},{k})")
    if k == 0 or k == n:
        return QPolynomial.of(1)
    qk = QPolynomial.of(*([0] * k + [1]))
    return gaussian_binomial(n - 1, k - 1) + qk * gaussian_binomial(n - 1, k)


def q_multinomial(parts) -> QPolynomial:
    """q-multinomial [d1+...+dm; d1,...,dm] as a product of q-binomials."""
    out = QPolynomial.of(1)
    total = 0
    for d in parts:
        total += d
        out = out * gaussian_binomial(total, d)
    return out


def general_linear_order(n: int, field: FiniteField) -> int:
    """|GL_n(F_q)| by the product formula."""
    q = field.q
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


MAX_GROUP_ORDER = 25_000


@lru_cache(maxsize=None)
def general_linear_group(n: int, field: FiniteField) -> tuple:
    """All invertible n x n matrices, in lexicographic entry order.

    Capped at MAX_GROUP_ORDER elements (GL_4(F_2) is the largest group
    needed at desk scale).
    """
    order = general_linear_order(n, field)
    if order > MAX_GROUP_ORDER:
        raise ValueError(f"|GL_{n}(F_{field.q})| = {order} exceeds cap {MAX_GROUP_ORDER}")
    if n == 0:
        return (Matrix(field, 0, 0, ()),)
    out = []
    for flat in itertools.product(field.elements(), repeat=n * n):
        m = Matrix(field, n, n, tuple(flat[i * n:(i + 1) * n] for i in range(n)))
        if m.is_invertible():
            out.append(m)
    assert len(out) == order
    return tuple(out)


def quotient_map(sub: Subspace):
    """Canonical surjection F^n -> F^(n-d) with kernel exactly `sub`.

    Coordinates of the quotient are the non-pivot coordinates of `sub`,
    so quotients by coordinate subspaces are literal coordinate drops.
    """
    F = sub.field
    n = sub.ambient
    comp = [c for c in range(n) if c not in sub.pivots()]
    rows = []
    for j in range(n):
        e = [0] * n
        e[j] = 1
        red = sub.reduce(tuple(e))
        rows.append([red[c] for c in comp])
    proj = Matrix.from_rows(F, list(zip(*rows))) if comp else Matrix(F, 0, n, ())
    return len(comp), proj


def quotient_section(sub: Subspace) -> Matrix:
    """A right inverse of quotient_map(sub)[1] (standard-vector section)."""
    F = sub.field
    n = sub.ambient
    comp = [c for c in range(n) if c not in sub.pivots()]
    cols = []
    for c in comp:
        e = [0] * n
        e[c] = 1
        cols.append(tuple(e))
    return Matrix.from_rows(F, cols).transpose() if comp else Matrix(F, n, 0, ())
