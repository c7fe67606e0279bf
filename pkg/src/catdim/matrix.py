"""Dense exact matrices over a Ring.

Entries are plain scalars (Fraction / int) kept in row-major lists.  All
hom-sets in the supported windows are small, so dense storage wins on
simplicity; nothing here is floating point.
"""

from __future__ import annotations

from .errors import InputError
from .rings import Ring


class Matrix:
    """Immutable-by-convention dense matrix; do not mutate .rows after build."""

    __slots__ = ("nrows", "ncols", "rows", "ring")

    def __init__(self, nrows: int, ncols: int, rows, ring: Ring):
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise InputError("matrix shape does not match entry grid")
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows
        self.ring = ring

    # -- constructors --------------------------------------------------

    @classmethod
    def zeros(cls, nrows, ncols, ring):
        z = ring.zero()
        return cls(nrows, ncols, [[z] * ncols for _ in range(nrows)], ring)

    @classmethod
    def identity(cls, n, ring):
        z, o = ring.zero(), ring.one()
        rows = [[z] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = o
        return cls(n, n, rows, ring)

    @classmethod
    def from_rows(cls, rows, ring, ncols=None):
        nrows = len(rows)
        if ncols is None:
            if nrows == 0:
                raise InputError("cannot infer column count of an empty matrix")
            ncols = len(rows[0])
        conv = [[ring.from_int(e) if isinstance(e, int) else e for e in r] for r in rows]
        return cls(nrows, ncols, conv, ring)

    def copy(self):
        return Matrix(self.nrows, self.ncols, [row[:] for row in self.rows], self.ring)

    # -- queries ---------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.shape == other.shape and self.ring == other.ring
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.shape, tuple(tuple(r) for r in self.rows)))

    def is_zero(self):
        z = self.ring.zero()
        return all(e == z for row in self.rows for e in row)

    def is_identity(self):
        if self.nrows != self.ncols:
            return False
        z, o = self.ring.zero(), self.ring.one()
        for i, row in enumerate(self.rows):
            for j, e in enumerate(row):
                if e != (o if i == j else z):
                    return False
        return True

    def column(self, j):
        return [row[j] for row in self.rows]

    # -- arithmetic --------------------------------------------------------

    def _check_same_shape(self, other):
        if self.shape != other.shape or self.ring != other.ring:
            raise InputError(f"shape/ring mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same_shape(other)
        add = self.ring.add
        rows = [[add(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        return Matrix(self.nrows, self.ncols, rows, self.ring)

    def __sub__(self, other):
        self._check_same_shape(other)
        sub = self.ring.sub
        rows = [[sub(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        return Matrix(self.nrows, self.ncols, rows, self.ring)

    def scale(self, c):
        mul = self.ring.mul
        rows = [[mul(c, e) for e in row] for row in self.rows]
        return Matrix(self.nrows, self.ncols, rows, self.ring)

    def __matmul__(self, other):
        if self.ncols != other.nrows or self.ring != other.ring:
            raise InputError(f"cannot multiply {self.shape} by {other.shape}")
        ring = self.ring
        zero = ring.zero()
        out = [[zero] * other.ncols for _ in range(self.nrows)]
        orows = other.rows
        if ring.kind == "Fp":
            p = ring.p
            for i, arow in enumerate(self.rows):
                orow = out[i]
                for k, a in enumerate(arow):
                    if a:
                        brow = orows[k]
                        for j in range(other.ncols):
                            orow[j] += a * brow[j]
                out[i] = [v % p for v in orow]
        else:
            for i, arow in enumerate(self.rows):
                orow = out[i]
                for k, a in enumerate(arow):
                    if a:
                        brow = orows[k]
                        for j in range(other.ncols):
                            b = brow[j]
                            if b:
                                orow[j] += a * b
        return Matrix(self.nrows, other.ncols, out, self.ring)

    def mat_vec(self, vec):
        if len(vec) != self.ncols:
            raise InputError("vector length mismatch")
        ring = self.ring
        out = []
        for row in self.rows:
            acc = ring.zero()
            for a, v in zip(row, vec):
                if a and v:
                    acc = ring.add(acc, ring.mul(a, v))
            out.append(acc)
        return out

    def transpose(self):
        rows = [list(col) for col in zip(*self.rows)] if self.nrows else [[] for _ in range(self.ncols)]
        if self.nrows == 0:
            rows = [[] for _ in range(self.ncols)]
            return Matrix(self.ncols, 0, rows, self.ring)
        return Matrix(self.ncols, self.nrows, rows, self.ring)

    # -- block assembly ------------------------------------------------------

    @classmethod
    def from_blocks(cls, grid, ring):
        """Assemble a matrix from a 2D grid of compatible blocks."""
        if not grid:
            return cls.zeros(0, 0, ring)
        row_heights = [blocks[0].nrows for blocks in grid]
        col_widths = [b.ncols for b in grid[0]]
        for blocks in grid:
            for j, b in enumerate(blocks):
                if b.nrows != blocks[0].nrows or b.ncols != col_widths[j]:
                    raise InputError("ragged block grid")
        rows = []
        for blocks in grid:
            for i in range(blocks[0].nrows):
                acc = []
                for b in blocks:
                    acc.extend(b.rows[i])
                rows.append(acc)
        return cls(sum(row_heights), sum(col_widths), rows, ring)

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols} over {self.ring.name})"

    def pretty(self) -> str:
        fmt = self.ring.format
        return "\n".join("[" + " ".join(fmt(e) for e in row) + "]" for row in self.rows)


def mats_to_grid(m: Matrix):
    """Row-major entry grid in JSON form (strings for Q/Z, ints for F_p)."""
    if m.ring.kind == "Fp":
        return [[int(e) for e in row] for row in m.rows]
    return [[m.ring.format(e) for e in row] for row in m.rows]


def grid_to_matrix(grid, nrows, ncols, ring) -> Matrix:
    if len(grid) != nrows or any(len(r) != ncols for r in grid):
        raise InputError(f"entry grid is not {nrows}x{ncols}")
    rows = [[ring.parse(e) for e in row] for row in grid]
    return Matrix(nrows, ncols, rows, ring)
