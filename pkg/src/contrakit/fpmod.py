"""Finitely presented abelian groups.

A module is the cokernel of an integer matrix whose *rows* are relations
among the generators (one generator per column)::

    >>> decompose(FPModule([[4, 2], [2, 4]]))
    (0, [2, 6])
    >>> decompose(FPModule([[2, 0], [0, 0]]))
    (1, [2])

Elements are integer row vectors in generator coordinates; a morphism is
given by the matrix whose i-th row is the image of the i-th generator.
All arithmetic uses Python integers.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd, prod
from typing import Iterable, Sequence

import numpy as np

DEFAULT_ENUM_BOUND = 10**6


class FPModError(Exception):
    pass


class IllDefinedMorphism(FPModError):
    pass


class InfiniteModule(FPModError):
    pass


class OrderBoundExceeded(FPModError):
    pass


def enumeration_bound() -> int:
    value = os.environ.get("CONTRAKIT_MAX_ENUM")
    return int(value) if value else DEFAULT_ENUM_BOUND


# ---------------------------------------------------------------------------
# integer matrices


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry count does not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols must be given for a matrix without rows")
            cols = len(rows[0])
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def diagonal(cls, diag: Sequence[int], cols: int | None = None) -> IntMatrix:
        cols = len(diag) if cols is None else cols
        return cls(len(diag), cols, tuple(
            tuple(int(diag[i]) if i == j else 0 for j in range(cols)) for i in range(len(diag))))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def transpose(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else
                         tuple(() for _ in range(self.cols)))

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols_t = other.transpose().entries
        return IntMatrix(self.rows, other.cols, tuple(
            tuple(sum(a * b for a, b in zip(r, c)) for c in cols_t) for r in self.entries))

    def scale(self, k: int) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(tuple(k * x for x in r) for r in self.entries))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def vstack(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        return IntMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def det(self) -> int:
        """Bareiss fraction-free determinant."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = [list(r) for r in self.entries]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


def block_diag(*mats: IntMatrix) -> IntMatrix:
    rows, cols = sum(m.rows for m in mats), sum(m.cols for m in mats)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for m in mats:
        for i, r in enumerate(m.entries):
            out[r0 + i][c0:c0 + m.cols] = r
        r0 += m.rows
        c0 += m.cols
    return IntMatrix(rows, cols, tuple(tuple(r) for r in out))


def _as_matrix(m) -> IntMatrix:
    if isinstance(m, IntMatrix):
        return m
    return IntMatrix.from_rows(m)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    """``left @ A @ right == diag(diagonal)`` with unimodular transforms.

    ``diagonal`` holds every nonzero diagonal entry (units included);
    ``invariant_factors`` drops the units.
    """

    source: IntMatrix
    diagonal: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix
    right_inverse: IntMatrix

    @property
    def rank(self) -> int:
        return len(self.diagonal)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.diagonal if d > 1)

    @property
    def free_rank(self) -> int:
        """Free rank of the cokernel of the source matrix."""
        return self.source.cols - self.rank

    def diagonal_matrix(self) -> IntMatrix:
        return IntMatrix.diagonal(self.diagonal + (0,) * (self.source.rows - self.rank),
                                  self.source.cols) if self.source.rows else \
            IntMatrix.zeros(0, self.source.cols)


@lru_cache(maxsize=4096)
def smith(m: IntMatrix) -> SmithForm:
    """Smith normal form with transforms.

    Pivots are the nonzero entry of least absolute value in the remaining
    block, first in row-major order.

    >>> smith(IntMatrix.from_rows([[2, 4], [6, 8]])).invariant_factors
    (2, 4)
    """
    m = _as_matrix(m)
    nr, nc = m.rows, m.cols
    a = [list(r) for r in m.entries]
    left = [[int(i == j) for j in range(nr)] for i in range(nr)]
    right = [[int(i == j) for j in range(nc)] for i in range(nc)]
    rinv = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in right:
            r[i], r[j] = r[j], r[i]
        rinv[i], rinv[j] = rinv[j], rinv[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        if q:
            a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
            left[dst] = [x + q * y for x, y in zip(left[dst], left[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        if q:
            for r in a:
                r[dst] += q * r[src]
            for r in right:
                r[dst] += q * r[src]
            rinv[src] = [x - q * y for x, y in zip(rinv[src], rinv[dst])]

    diag = []
    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            if a[t][t] < 0:
                a[t] = [-x for x in a[t]]
                left[t] = [-x for x in left[t]]
            p = a[t][t]
            for i in range(t + 1, nr):
                add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, nc):
                add_col(j, t, -(a[t][j] // p))
            # any leftover remainder in the pivot row/column is smaller than p
            cand = [(abs(a[i][t]), i, t) for i in range(t + 1, nr) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t + 1, nc) if a[t][j]]
            if cand:
                _, i, j = min(cand)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                        if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        diag.append(a[t][t])
        t += 1

    def freeze(rows, ncols):
        return IntMatrix(len(rows), ncols, tuple(tuple(r) for r in rows))

    return SmithForm(m, tuple(diag), freeze(left, nr), freeze(right, nc), freeze(rinv, nc))


def solve_in_rowspace(a: IntMatrix, v: Sequence[int]) -> list[int] | None:
    """Integer ``c`` with ``c @ a == v``, or ``None`` when ``v`` is outside the row lattice."""
    sf = smith(a)
    vr = _vecmat(v, sf.right)
    w = [0] * a.rows
    for j, x in enumerate(vr):
        if j < sf.rank:
            q, r = divmod(x, sf.diagonal[j])
            if r:
                return None
            w[j] = q
        elif x:
            return None
    return _vecmat(w, sf.left)


def left_kernel(a: IntMatrix) -> IntMatrix:
    """Basis (as rows) of the lattice ``{x : x @ a == 0}``."""
    sf = smith(a)
    return IntMatrix(a.rows - sf.rank, a.rows, sf.left.entries[sf.rank:])


def lattice_basis(a: IntMatrix) -> IntMatrix:
    """Basis of the row lattice of ``a`` in reduced Hermite form."""
    return hermite_basis(a)


@lru_cache(maxsize=4096)
def hermite_basis(a: IntMatrix) -> IntMatrix:
    rows = hermite_rows(a)
    return IntMatrix(len(rows), a.cols, tuple(tuple(r) for r in rows))


def echelon_solve(h: IntMatrix, v: Sequence[int]) -> list[int] | None:
    """``c`` with ``c @ h == v`` for an echelon ``h`` (first nonzero entries strictly move right)."""
    v = list(v)
    c = []
    for row in h.entries:
        j = next(k for k, x in enumerate(row) if x)
        if any(v[:j]):
            return None
        q, r = divmod(v[j], row[j])
        if r:
            return None
        if q:
            v = [x - q * y for x, y in zip(v, row)]
        c.append(q)
    return c if not any(v) else None


def in_lattice(a: IntMatrix, v: Sequence[int]) -> bool:
    return echelon_solve(hermite_basis(a), v) is not None


def _vecmat(v: Sequence[int], m: IntMatrix) -> list[int]:
    out = [0] * m.cols
    for x, r in zip(v, m.entries):
        if x:
            for j, y in enumerate(r):
                out[j] += x * y
    return out


# ---------------------------------------------------------------------------
# modules


class FPModule:
    """Cokernel of an integer relation matrix (rows = relations)."""

    def __init__(self, presentation, ngens: int | None = None):
        if isinstance(presentation, IntMatrix):
            mat = presentation
        else:
            rows = [list(r) for r in presentation]
            if not rows and ngens is None:
                raise ValueError("ngens is required for an empty presentation")
            mat = IntMatrix.from_rows(rows, ngens if not rows else None)
        if ngens is not None and mat.cols != ngens:
            raise ValueError("ngens disagrees with the presentation width")
        self.presentation = mat

    @classmethod
    def from_invariants(cls, rank: int = 0, torsion: Iterable[int] = ()) -> FPModule:
        torsion = [int(d) for d in torsion]
        if any(d < 2 for d in torsion):
            raise ValueError("torsion orders must be >= 2")
        n = len(torsion) + rank
        return cls(IntMatrix.diagonal(torsion, n) if torsion else IntMatrix.zeros(0, n), n)

    @classmethod
    def free(cls, rank: int) -> FPModule:
        return cls.from_invariants(rank)

    @classmethod
    def cyclic(cls, d: int) -> FPModule:
        return cls.from_invariants(0, [d]) if d != 1 else cls.zero()

    @classmethod
    def zero(cls) -> FPModule:
        return cls(IntMatrix.zeros(0, 0), 0)

    @property
    def ngens(self) -> int:
        return self.presentation.cols

    @cached_property
    def snf(self) -> SmithForm:
        return smith(self.presentation)

    @property
    def rank(self) -> int:
        return self.snf.free_rank

    @property
    def torsion(self) -> tuple[int, ...]:
        return self.snf.invariant_factors

    @property
    def invariants(self) -> tuple[int, tuple[int, ...]]:
        return self.rank, self.torsion

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def order(self) -> int | None:
        return prod(self.torsion) if self.is_finite else None

    @property
    def exponent(self) -> int:
        """Largest invariant factor (1 for a torsion-free module)."""
        return self.torsion[-1] if self.torsion else 1

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def is_isomorphic(self, other: FPModule) -> bool:
        return self.invariants == other.invariants

    def canonical(self) -> FPModule:
        return FPModule.from_invariants(self.rank, self.torsion)

    # -- canonical coordinates ------------------------------------------------
    # With L A R = D, x -> x R identifies the module with Z^n / row(D).

    @cached_property
    def _slots(self) -> list[tuple[int, int]]:
        """(column index, order) of nontrivial canonical coordinates; order 0 = free."""
        sf = self.snf
        out = [(j, d) for j, d in enumerate(sf.diagonal) if d > 1]
        out += [(j, 0) for j in range(sf.rank, self.ngens)]
        return out

    @property
    def canonical_orders(self) -> tuple[int, ...]:
        return tuple(d for _, d in self._slots)

    def coords(self, x: Sequence[int]) -> tuple[int, ...]:
        """Canonical coordinates; equal coordinates mean equal elements."""
        y = _vecmat(x, self.snf.right)
        return tuple(y[j] % d if d else y[j] for j, d in self._slots)

    def element(self, coords: Sequence[int]) -> list[int]:
        """Generator-coordinate vector of the element with the given canonical coordinates."""
        y = [0] * self.ngens
        for (j, _), c in zip(self._slots, coords):
            y[j] = c
        return _vecmat(y, self.snf.right_inverse)

    def canonical_generators(self) -> list[list[int]]:
        k = len(self._slots)
        return [self.element([int(i == j) for j in range(k)]) for i in range(k)]

    def is_zero_element(self, x: Sequence[int]) -> bool:
        return not any(self.coords(x))

    def equal(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return self.is_zero_element([a - b for a, b in zip(x, y)])

    def zero_element(self) -> list[int]:
        return [0] * self.ngens

    def add(self, x, y) -> list[int]:
        return [a + b for a, b in zip(x, y)]

    def scale(self, k: int, x) -> list[int]:
        return [k * a for a in x]

    def element_order(self, x) -> int:
        """Additive order; 0 for elements of infinite order."""
        c = self.coords(x)
        out = 1
        for v, (_, d) in zip(c, self._slots):
            if v:
                if d == 0:
                    return 0
                out = out * (d // gcd(d, v)) // gcd(out, d // gcd(d, v))
        return out

    def __repr__(self):
        return f"FPModule({self.presentation.tolist()!r}, ngens={self.ngens})"

    def __str__(self):
        parts = ["Z"] * self.rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"presentation": self.presentation.tolist(), "ngens": self.ngens}


def decompose(m: FPModule) -> tuple[int, list[int]]:
    """``(free_rank, invariant_factors)`` of ``Z^r + sum Z/d_i``."""
    return m.rank, list(m.torsion)


def direct_sum(*mods: FPModule) -> FPModule:
    if not mods:
        return FPModule.zero()
    return FPModule(block_diag(*(m.presentation for m in mods)))


def summand_offsets(*mods: FPModule) -> list[int]:
    return list(itertools.accumulate([0] + [m.ngens for m in mods]))


# ---------------------------------------------------------------------------
# morphisms


class Morphism:
    """Homomorphism given by the images of the source generators (rows)."""

    def __init__(self, source: FPModule, target: FPModule, matrix, check: bool = True):
        mat = matrix if isinstance(matrix, IntMatrix) else IntMatrix.from_rows(matrix, target.ngens)
        if (mat.rows, mat.cols) != (source.ngens, target.ngens):
            raise ValueError(f"matrix shape {mat.rows}x{mat.cols} does not match "
                             f"{source.ngens} -> {target.ngens} generators")
        self.source, self.target, self.matrix = source, target, mat
        self.lattice_closed = False
        if check:
            bad = self.ill_defined_witness()
            if bad is not None:
                raise IllDefinedMorphism(f"relation {bad} does not map to a relation")

    def ill_defined_witness(self):
        rels = self.target.presentation
        for r in self.source.presentation.entries:
            img = _vecmat(r, self.matrix)
            if any(img) and not in_lattice(rels, img):
                return list(r)
        return None

    @classmethod
    def identity(cls, m: FPModule) -> Morphism:
        return cls(m, m, IntMatrix.identity(m.ngens), check=False)

    @classmethod
    def multiplication(cls, m: FPModule, k: int) -> Morphism:
        return cls(m, m, IntMatrix.identity(m.ngens).scale(k), check=False)

    @classmethod
    def zero(cls, source: FPModule, target: FPModule) -> Morphism:
        return cls(source, target, IntMatrix.zeros(source.ngens, target.ngens), check=False)

    def __call__(self, x: Sequence[int]) -> list[int]:
        return _vecmat(x, self.matrix)

    def then(self, g: Morphism) -> Morphism:
        """Composite ``g o self``."""
        return Morphism(self.source, g.target, self.matrix @ g.matrix, check=False)

    def is_zero(self) -> bool:
        return all(self.target.is_zero_element(r) for r in self.matrix.entries)

    def equals(self, other: Morphism) -> bool:
        return all(self.target.equal(a, b) for a, b in zip(self.matrix.entries, other.matrix.entries))

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "matrix": self.matrix.tolist()}


def subgroup(m: FPModule, gens: Sequence[Sequence[int]]) -> tuple[FPModule, Morphism]:
    """The subgroup generated by ``gens`` as a module with its inclusion.

    The inclusion's rows are a Hermite basis of the lattice spanned by
    ``gens`` and the relations of ``m``.
    """
    rows = IntMatrix(len(gens), m.ngens, tuple(tuple(g) for g in gens)).vstack(m.presentation)
    basis = hermite_basis(rows)
    coords = [echelon_solve(basis, r) for r in m.presentation.entries]
    sub = FPModule(IntMatrix(len(coords), basis.rows, tuple(tuple(c) for c in coords)), basis.rows)
    incl = Morphism(sub, m, basis, check=False)
    incl.lattice_closed = True
    return sub, incl


def in_subgroup(m: FPModule, gens: Sequence[Sequence[int]], x: Sequence[int]) -> bool:
    rows = IntMatrix(len(gens), m.ngens, tuple(tuple(g) for g in gens)).vstack(m.presentation)
    return in_lattice(rows, x)


def same_subgroup(m: FPModule, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> bool:
    return all(in_subgroup(m, a, x) for x in b) and all(in_subgroup(m, b, x) for x in a)


def kernel(f: Morphism) -> tuple[FPModule, Morphism]:
    """Kernel with its inclusion; ``incl.then(f)`` is zero."""
    stacked = f.matrix.vstack(f.target.presentation)
    ker = left_kernel(stacked)
    gens = [r[:f.source.ngens] for r in ker.entries]
    return subgroup(f.source, gens)


def cokernel(f: Morphism) -> tuple[FPModule, Morphism]:
    """Cokernel with its projection; ``f.then(proj)`` is zero."""
    q = FPModule(f.target.presentation.vstack(f.matrix), f.target.ngens)
    return q, Morphism(f.target, q, IntMatrix.identity(f.target.ngens), check=False)


def image(f: Morphism) -> tuple[FPModule, Morphism]:
    return subgroup(f.target, list(f.matrix.entries))


def intersection(m: FPModule, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]):
    """Generators of the intersection of two subgroups of ``m``.

    It is the kernel of ``m -> m/A + m/B``.
    """
    def quotient(gens):
        extra = IntMatrix(len(gens), m.ngens, tuple(tuple(g) for g in gens))
        return FPModule(m.presentation.vstack(extra), m.ngens)

    both = direct_sum(quotient(a), quotient(b))
    ident = [[int(i == j) for j in range(m.ngens)] for i in range(m.ngens)]
    diag_map = Morphism(m, both, [r + r for r in ident], check=False)
    return [list(r) for r in kernel(diag_map)[1].matrix.entries]


# ---------------------------------------------------------------------------
# Hom, Ext, Tor, tensor over Z, summand by summand on the canonical form of m


def _pieces(m: FPModule, n: FPModule, op) -> FPModule:
    parts = [op(n, d) for d in m.torsion]
    return direct_sum(*parts).canonical() if parts else FPModule.zero()


def _torsion_kernel(n: FPModule, d: int) -> FPModule:
    return kernel(Morphism.multiplication(n, d))[0]


def _torsion_cokernel(n: FPModule, d: int) -> FPModule:
    return cokernel(Morphism.multiplication(n, d))[0]


def hom(m: FPModule, n: FPModule) -> FPModule:
    """``Hom(Z^r + sum Z/d_i, N) = N^r + sum N[d_i]``.

    >>> str(hom(FPModule.cyclic(6), FPModule.cyclic(4)))
    'Z/2'
    """
    return direct_sum(*([n] * m.rank), _pieces(m, n, _torsion_kernel)).canonical()


def ext1(m: FPModule, n: FPModule) -> FPModule:
    """From the resolution ``0 -> Z -d-> Z -> Z/d -> 0``: ``Ext(Z/d, N) = N/dN``."""
    return _pieces(m, n, _torsion_cokernel)


def tor1(m: FPModule, n: FPModule) -> FPModule:
    return _pieces(m, n, _torsion_kernel)


def tensor(m: FPModule, n: FPModule) -> FPModule:
    return direct_sum(*([n] * m.rank), _pieces(m, n, _torsion_cokernel)).canonical()


def kronecker_tensor_presentation(m: FPModule, n: FPModule) -> FPModule:
    """``M (x) N`` presented on the generator pairs; independent of any normal form."""
    gm, gn = m.ngens, n.ngens
    rows = []
    for r in m.presentation.entries:
        for b in range(gn):
            rows.append([r[a] if bb == b else 0 for a in range(gm) for bb in range(gn)])
    for r in n.presentation.entries:
        for a in range(gm):
            rows.append([r[bb] if aa == a else 0 for aa in range(gm) for bb in range(gn)])
    return FPModule(IntMatrix(len(rows), gm * gn, tuple(map(tuple, rows))), gm * gn)


# ---------------------------------------------------------------------------
# enumeration oracle (Hermite reduction; shares no code with the Smith path)


def hermite_rows(mat: IntMatrix) -> list[list[int]]:
    """Upper-triangular row basis with positive pivots and reduced entries above them."""
    a = [list(r) for r in mat.entries if any(r)]
    out = []
    col = 0
    ncols = mat.cols
    while a and col < ncols:
        nz = [r for r in a if r[col]]
        if not nz:
            col += 1
            continue
        rest = [r for r in a if not r[col]]
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            new = [piv]
            for r in nz[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                (new if r[col] else rest).append(r)
            nz = new
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        a = [r for r in rest if any(r)]
        col += 1
    for i, r in enumerate(out):
        c = next(j for j, x in enumerate(r) if x)
        for k in range(i):
            q = out[k][c] // r[c]
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], r)]
    return out


@dataclass
class Enumeration:
    """Every element of a finite module, as Hermite-reduced vectors.

    Elements are mixed-radix vectors ``0 <= x_i < h_ii`` for the square
    Hermite basis ``h`` of the relation lattice.
    """

    module: FPModule
    basis: list[list[int]]
    radices: list[int] = field(init=False)

    def __post_init__(self):
        self.radices = [self.basis[i][i] for i in range(len(self.basis))]

    @property
    def size(self) -> int:
        return prod(self.radices)

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        v = list(v)
        for i, row in enumerate(self.basis):
            q = v[i] // row[i]
            if q:
                v = [x - q * y for x, y in zip(v, row)]
        return tuple(v)

    def reduce_array(self, arr: np.ndarray) -> np.ndarray:
        arr = np.array(arr, dtype=np.int64, copy=True)
        for i, row in enumerate(self.basis):
            q = np.floor_divide(arr[:, i], row[i])
            arr -= np.outer(q, np.array(row, dtype=np.int64))
        return arr

    @property
    def elements(self) -> list[tuple[int, ...]]:
        return [tuple(x) for x in itertools.product(*(range(r) for r in self.radices))]

    def element_array(self) -> np.ndarray:
        if not self.radices:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.meshgrid(*(np.arange(r, dtype=np.int64) for r in self.radices), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def index(self, x: Sequence[int]) -> int:
        idx = 0
        for v, r in zip(self.reduce(x), self.radices):
            idx = idx * r + v
        return idx

    def add(self, x, y) -> tuple[int, ...]:
        return self.reduce([a + b for a, b in zip(x, y)])

    def table(self) -> list[list[int]]:
        els = self.elements
        return [[self.index(self.add(x, y)) for y in els] for x in els]

    def count_killed_by(self, k: int) -> int:
        arr = self.element_array()
        red = self.reduce_array(k * arr)
        return int(np.count_nonzero(~red.any(axis=1)))

    def exponent(self) -> int:
        arr = self.element_array()
        e = 1
        while True:
            if not self.reduce_array(e * arr).any():
                return e
            e += 1


def enumerate_module(m: FPModule, bound: int | None = None) -> Enumeration:
    bound = enumeration_bound() if bound is None else bound
    basis = hermite_rows(m.presentation)
    if len(basis) < m.ngens:
        raise InfiniteModule(f"{m!r} has infinite order")
    size = prod(basis[i][i] for i in range(len(basis)))
    if size > bound:
        raise OrderBoundExceeded(f"order {size} exceeds the enumeration bound {bound}")
    return Enumeration(m, basis)


def count_homs(m: FPModule, n: FPModule, bound: int = 2 * 10**5) -> int:
    """Brute-force count of homomorphisms: all generator assignments respecting relations."""
    en = enumerate_module(n)
    if en.size ** m.ngens > bound:
        raise OrderBoundExceeded("too many generator assignments to enumerate")
    els = en.element_array()
    count = 0
    rels = m.presentation.entries
    for choice in itertools.product(range(len(els)), repeat=m.ngens):
        imgs = els[list(choice)] if m.ngens else np.zeros((0, n.ngens), dtype=np.int64)
        ok = True
        for r in rels:
            v = np.asarray(r, dtype=np.int64) @ imgs if m.ngens else np.zeros(n.ngens, np.int64)
            if any(en.reduce(v.tolist())):
                ok = False
                break
        count += ok
    return count


def group_type_counts(m: FPModule, ks: Iterable[int]) -> dict[int, int]:
    """``k -> #{x : kx = 0}`` predicted from the invariant factors."""
    return {k: prod(gcd(k, d) for d in m.torsion) for k in ks}


# ---------------------------------------------------------------------------
# random instances


def random_unimodular(rng, n: int, steps: int = 6, spread: int = 3) -> IntMatrix:
    a = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        q = rng.randint(-spread, spread)
        a[i] = [x + q * y for x, y in zip(a[i], a[j])]
        if rng.random() < 0.3:
            a[i], a[j] = a[j], a[i]
    if n and rng.random() < 0.5:
        a[0] = [-x for x in a[0]]
    return IntMatrix.from_rows(a) if n else IntMatrix.zeros(0, 0)


def represent_randomly(m: FPModule, rng) -> FPModule:
    """Same module behind a random change of generators and of relations."""
    u = random_unimodular(rng, m.presentation.rows)
    v = random_unimodular(rng, m.ngens)
    pres = (u @ m.presentation) if m.presentation.rows else m.presentation
    return FPModule(pres @ v if m.ngens else pres, m.ngens)


def random_module(rng, max_rank: int = 2, max_cyclic: int = 3, max_order: int = 64,
                  scramble: bool = True) -> FPModule:
    """Random module ``Z^r + sum Z/d_i`` hidden behind a random presentation."""
    rank = rng.randint(0, max_rank)
    torsion = [rng.randint(2, max_order) for _ in range(rng.randint(0, max_cyclic))]
    m = FPModule.from_invariants(rank, torsion)
    return represent_randomly(m, rng) if scramble else m


def coords_in_subgroup(incl: Morphism, x: Sequence[int]) -> list[int] | None:
    """Coordinates of ``x`` over the generators of the subgroup ``incl``, or ``None``."""
    if getattr(incl, "lattice_closed", False):
        return echelon_solve(incl.matrix, x)
    rows = incl.matrix.vstack(incl.target.presentation)
    if rows.rows == 0:
        return [] if not any(x) else None
    c = solve_in_rowspace(rows, x)
    return None if c is None else c[:incl.source.ngens]


def restrict(f: Morphism, incl_src: Morphism, incl_tgt: Morphism) -> Morphism:
    """``f`` restricted to subgroups, given that it maps the first into the second."""
    rows = []
    for g in incl_src.matrix.entries:
        c = coords_in_subgroup(incl_tgt, f(g))
        if c is None:
            raise IllDefinedMorphism("image leaves the target subgroup")
        rows.append(c)
    return Morphism(incl_src.source, incl_tgt.source,
                    IntMatrix(len(rows), incl_tgt.source.ngens, tuple(map(tuple, rows))), check=False)


def multiple_subgroup(m: FPModule, k: int) -> list[list[int]]:
    """Generators of ``k m``."""
    return [[k * x for x in r] for r in IntMatrix.identity(m.ngens).entries]


def torsion_subgroup_gens(m: FPModule, k: int) -> list[list[int]]:
    """Generators of ``m[k] = {x : k x = 0}``."""
    return [list(r) for r in kernel(Morphism.multiplication(m, k))[1].matrix.entries]


def subgroup_order(m: FPModule, gens) -> int | None:
    sub, _ = subgroup(m, gens)
    return sub.order
