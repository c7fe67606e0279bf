"""Exact dense linear algebra over Q, F_p, and Z.

Every span-membership, rank, kernel, and factorization question in the
package bottoms out here.  Field systems use Gaussian elimination with a
deterministic pivot rule (leftmost nonzero column, first nonzero row);
integer systems use Hermite-style unimodular column reduction so that
solvability means solvability over Z, not merely over Q.
"""

from __future__ import annotations

from .errors import InputError
from .matrix import Matrix
from .rings import Ring, ZZ


# ---------------------------------------------------------------------------
# field elimination
# ---------------------------------------------------------------------------

def rref(rows, ncols, ring):
    """In-place reduced row echelon form; returns the pivot column list."""
    if not ring.is_field:
        raise InputError("rref requires a field")
    sub, mul, inv = ring.sub, ring.mul, ring.inv
    zero = ring.zero()
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != zero:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = inv(rows[r][c])
        row_r = rows[r]
        if pv != ring.one():
            rows[r] = row_r = [mul(pv, e) for e in row_r]
        for i in range(len(rows)):
            if i == r:
                continue
            f = rows[i][c]
            if f != zero:
                row_i = rows[i]
                rows[i] = [sub(a, mul(f, b)) for a, b in zip(row_i, row_r)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def field_rank(m: Matrix) -> int:
    rows = [row[:] for row in m.rows]
    return len(rref(rows, m.ncols, m.ring))


def solve_field(rows, b, ncols, ring):
    """One solution of the stacked system, or None; free variables are zero."""
    aug = [row[:] + [rhs] for row, rhs in zip(rows, b)]
    pivots = rref(aug, ncols + 1, ring)
    if pivots and pivots[-1] == ncols:
        return None
    x = [ring.zero()] * ncols
    for r, c in enumerate(pivots):
        x[c] = aug[r][ncols]
    return x


def nullspace_field(rows, ncols, ring):
    """Basis of the right kernel of the stacked rows."""
    work = [row[:] for row in rows]
    pivots = rref(work, ncols, ring)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [ring.zero()] * ncols
        v[free] = ring.one()
        for r, c in enumerate(pivots):
            v[c] = ring.neg(work[r][free])
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# integer (Hermite) machinery
# ---------------------------------------------------------------------------

def xgcd(a: int, b: int):
    """Extended gcd: returns (g, s, t) with s*a + t*b = g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _column_reduce_integer(rows, ncols):
    """Unimodular column reduction A*U = H with H in column echelon form.

    Returns (cols, U_cols, pivots) where cols are the columns of H, U_cols the
    columns of U, and pivots a list of (row, col) positions.  Columns past the
    last pivot are identically zero.
    """
    m = len(rows)
    cols = [[rows[i][j] for i in range(m)] for j in range(ncols)]
    ucols = [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    pivots = []
    r = 0
    for i in range(m):
        if r == ncols:
            break
        j0 = None
        for j in range(r, ncols):
            if cols[j][i] != 0:
                j0 = j
                break
        if j0 is None:
            continue
        if j0 != r:
            cols[r], cols[j0] = cols[j0], cols[r]
            ucols[r], ucols[j0] = ucols[j0], ucols[r]
        for j in range(r + 1, ncols):
            bij = cols[j][i]
            if bij == 0:
                continue
            a = cols[r][i]
            g, s, t = xgcd(a, bij)
            u, v = a // g, bij // g
            cr, cj = cols[r], cols[j]
            for k in range(i, m):
                x, y = cr[k], cj[k]
                cr[k] = s * x + t * y
                cj[k] = u * y - v * x
            ur, uj = ucols[r], ucols[j]
            for k in range(ncols):
                x, y = ur[k], uj[k]
                ur[k] = s * x + t * y
                uj[k] = u * y - v * x
        if cols[r][i] < 0:
            cols[r] = [-x for x in cols[r]]
            ucols[r] = [-x for x in ucols[r]]
        pivots.append((i, r))
        r += 1
    return cols, ucols, pivots


def solve_integer(rows, b, ncols):
    """Integer solution of the stacked system, or None (Hermite normal form)."""
    cols, ucols, pivots = _column_reduce_integer(rows, ncols)
    y = [0] * ncols
    for (i, c) in pivots:
        acc = b[i]
        for (_, c2) in pivots:
            if c2 == c:
                break
            acc -= cols[c2][i] * y[c2]
        piv = cols[c][i]
        if acc % piv != 0:
            return None
        y[c] = acc // piv
    # full residual check covers rows without pivots
    for i in range(len(rows)):
        acc = 0
        for (_, c) in pivots:
            acc += cols[c][i] * y[c]
        if acc != b[i]:
            return None
    x = [0] * ncols
    for j in range(ncols):
        yj = y[j]
        if yj:
            uj = ucols[j]
            for k in range(ncols):
                x[k] += uj[k] * yj
    return x


def integer_kernel(rows, ncols):
    """Basis of the integer kernel lattice {v : A v = 0}."""
    _, ucols, pivots = _column_reduce_integer(rows, ncols)
    return [ucols[j][:] for j in range(len(pivots), ncols)]


def row_hnf(rows, ncols):
    """Canonical row Hermite normal form of the lattice spanned by the rows.

    Pivots are positive, entries above each pivot lie in [0, pivot), zero rows
    are dropped.  Two generator lists span the same lattice iff their forms
    are identical.
    """
    work = [row[:] for row in rows if any(row)]
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(work)):
            if work[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        for i in range(r + 1, len(work)):
            if work[i][c] == 0:
                continue
            a, bb = work[r][c], work[i][c]
            g, s, t = xgcd(a, bb)
            u, v = a // g, bb // g
            wr, wi = work[r], work[i]
            new_r = [s * x + t * y for x, y in zip(wr, wi)]
            new_i = [u * y - v * x for x, y in zip(wr, wi)]
            work[r], work[i] = new_r, new_i
        if work[r][c] < 0:
            work[r] = [-x for x in work[r]]
        a = work[r][c]
        for i in range(r):
            q = work[i][c] // a
            if q:
                work[i] = [x - q * y for x, y in zip(work[i], work[r])]
        r += 1
        if r == len(work):
            break
    return [row for row in work[:r] if any(row)]


def spans_full_lattice(vectors, ncols) -> bool:
    """Whether the integer span of the vectors is all of Z^ncols."""
    if ncols == 0:
        return True
    h = row_hnf(vectors, ncols)
    if len(h) != ncols:
        return False
    return all(h[i][i] == 1 for i in range(ncols))


# ---------------------------------------------------------------------------
# the public operations
# ---------------------------------------------------------------------------

def solve_linear(a: Matrix, b):
    """Solve a x = b exactly over a.ring, or return None.

    Over Z the solution is required to be integral (Hermite normal form);
    over Q / F_p this is plain Gaussian elimination.
    """
    if a.nrows != len(b):
        raise InputError(f"system has {a.nrows} rows but rhs has {len(b)} entries")
    if a.ring.kind == "Z":
        return solve_integer(a.rows, [int(x) for x in b], a.ncols)
    return solve_field(a.rows, b, a.ncols, a.ring)


def span_membership(target: Matrix, generators):
    """Coefficients c with sum(c_i * G_i) = target, or None.

    The matrices are vectorized entrywise into one linear system which is
    handed to solve_linear.
    """
    for g in generators:
        if g.shape != target.shape or g.ring != target.ring:
            raise InputError("span generators must match the target shape and ring")
    ring = target.ring
    k = len(generators)
    rows, rhs = [], []
    for i in range(target.nrows):
        for j in range(target.ncols):
            rows.append([g.rows[i][j] for g in generators])
            rhs.append(target.rows[i][j])
    system = Matrix(len(rows), k, rows, ring)
    coeffs = solve_linear(system, rhs)
    if coeffs is None:
        return None
    # paranoia: a returned combination must reproduce the target exactly
    acc = Matrix.zeros(target.nrows, target.ncols, ring)
    for c, g in zip(coeffs, generators):
        if c != ring.zero():
            acc = acc + g.scale(c)
    assert acc == target, "span_membership produced a bad combination"
    return coeffs


def epi_mono_factor(m: Matrix):
    """Factor m = A @ B with A injective and B surjective (fields only).

    A is made of m's pivot columns, B of the nonzero rows of the reduced
    row echelon form, so the factorization is deterministic.
    """
    if not m.ring.is_field:
        raise InputError("epi_mono_factor requires a field (Q or F_p)")
    work = [row[:] for row in m.rows]
    pivots = rref(work, m.ncols, m.ring)
    r = len(pivots)
    a_rows = [[m.rows[i][c] for c in pivots] for i in range(m.nrows)]
    b_rows = [work[i][:] for i in range(r)]
    a = Matrix(m.nrows, r, a_rows, m.ring)
    b = Matrix(r, m.ncols, b_rows, m.ring)
    return a, b


def submodule_equal(gens1, gens2, ring: Ring, dim=None) -> bool:
    """Whether two generator lists span the same submodule of ring^dim.

    Fields compare reduced row echelon forms; Z compares canonical Hermite
    normal forms, so Z-spans are compared as lattices, not as Q-subspaces.
    """
    vecs = list(gens1) + list(gens2)
    if dim is None:
        if not vecs:
            return True
        dim = len(vecs[0])
    if any(len(v) != dim for v in vecs):
        raise InputError("ambient dimensions disagree")
    if ring.kind == "Z":
        h1 = row_hnf([list(map(int, v)) for v in gens1], dim)
        h2 = row_hnf([list(map(int, v)) for v in gens2], dim)
        return h1 == h2
    w1 = [list(v) for v in gens1]
    p1 = rref(w1, dim, ring)
    w2 = [list(v) for v in gens2]
    p2 = rref(w2, dim, ring)
    return w1[: len(p1)] == w2[: len(p2)]


def spans_full_module(vectors, dim, ring: Ring) -> bool:
    """Whether the vectors span all of ring^dim (lattice-exact over Z)."""
    if dim == 0:
        return True
    if ring.kind == "Z":
        return spans_full_lattice([list(map(int, v)) for v in vectors], dim)
    work = [list(v) for v in vectors]
    return len(rref(work, dim, ring)) == dim
