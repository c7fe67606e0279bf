"""Certified solving of large sparse integer linear systems.

The preorder decision procedure generates systems whose rows are sparse
integer vectors (mostly 0-1 fiber indicators) and whose unknown counts run
into the hundreds.  Dense exact elimination is hopeless at that size, so
this module solves them with modular arithmetic and then *certifies* the
outcome exactly:

* a claimed solution is verified by exact sparse substitution into every
  stored equation before it is returned;
* a claimed inconsistency is backed by an exact rational left-null vector
  u with u.A = 0 and u.b != 0 (a Fredholm certificate), verified the same
  way.

Modular steps use numpy int64 with 20-bit primes, which keeps every
intermediate product far below 2**63, so the modular arithmetic itself is
exact.  Rational answers are recovered by Dixon p-adic lifting plus
rational reconstruction.  An unlucky prime can only cause a retry with
the next prime, never a wrong answer.

Rows are deduplicated on insertion; two equal left-hand sides with
different right-hand sides short-circuit to "infeasible".
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from .errors import InputError
from .linalg import solve_field, solve_integer
from .rings import Ring

# 20-bit primes: products below 2**40 survive int64 accumulation over
# any realistic row count.
_PRIMES = (1048573, 1048571, 1048559, 1048549)

_LIFT_CHECKPOINTS = (6, 12, 24, 40, 60)


class SparseSystem:
    """Accumulates deduplicated sparse equations sum_j vals[j]*x[cols[j]] = rhs."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows = {}          # (cols tuple, vals tuple) -> rhs int
        self.infeasible = False

    def add_row(self, cols, vals, rhs: int):
        pairs = sorted((c, v) for c, v in zip(cols, vals) if v)
        key = (tuple(c for c, _ in pairs), tuple(v for _, v in pairs))
        if not key[0]:
            if rhs:
                self.infeasible = True
            return
        seen = self.rows.get(key)
        if seen is None:
            self.rows[key] = rhs
        elif seen != rhs:
            self.infeasible = True

    def add_unit_row(self, cols, rhs: int):
        self.add_row(cols, [1] * len(cols), rhs)

    def __len__(self):
        return len(self.rows)


def _verify(row_items, x):
    """Exact check of a candidate against every stored equation."""
    for (cols, vals), rhs in row_items:
        acc = 0
        for c, v in zip(cols, vals):
            xc = x[c]
            if xc:
                acc += v * xc
        if acc != rhs:
            return False
    return True


def _rational_reconstruct(a: int, m: int):
    """a mod m -> p/q with |p|, q <= sqrt(m/2), or None."""
    bound = isqrt(m // 2)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1) if s1 > 0 else Fraction(-r1, -s1)


def _eliminate_mod_p(items, ncols, p, block=512):
    """Incremental RREF mod p over the deduped rows.

    Returns (pivcols, pivrows, P, bad_row) where P is the reduced pivot
    matrix including the rhs column, pivrows are indices into items, and
    bad_row (if not None) is an item index whose reduction pivots in the
    rhs column, i.e. the system is inconsistent mod p.
    """
    width = ncols + 1
    pbuf = np.zeros((min(ncols, len(items)) + 1, width), dtype=np.int64)
    npiv = 0
    pivcols: list[int] = []
    pivrows: list[int] = []
    i = 0
    n = len(items)
    while i < n and npiv < ncols:
        hi = min(i + block, n)
        blk = np.zeros((hi - i, width), dtype=np.int64)
        for j in range(i, hi):
            (cols, vals), rhs = items[j]
            row = blk[j - i]
            row[list(cols)] = [v % p for v in vals]
            row[ncols] = rhs % p
        if npiv:
            blk = (blk - (blk[:, pivcols] @ pbuf[:npiv]) % p) % p
        for j in range(len(blk)):
            row = blk[j]
            nz = np.nonzero(row)[0]
            if nz.size == 0:
                continue
            c = int(nz[0])
            if c == ncols:
                return pivcols, pivrows, pbuf[:npiv], i + j
            row = (row * pow(int(row[c]), -1, p)) % p
            if npiv:
                colvals = pbuf[:npiv, c].copy()
                if colvals.any():
                    pbuf[:npiv] = (pbuf[:npiv] - np.outer(colvals, row)) % p
            rest = blk[j + 1:]
            if len(rest):
                cv = rest[:, c].copy()
                if cv.any():
                    blk[j + 1:] = (rest - np.outer(cv, row)) % p
            pbuf[npiv] = row
            npiv += 1
            pivcols.append(c)
            pivrows.append(i + j)
            if npiv == ncols:
                break
        i = hi
    return pivcols, pivrows, pbuf[:npiv], None


def _inverse_mod_p(a: np.ndarray, p: int):
    """Gauss-Jordan inverse of a over F_p, or None if singular mod p."""
    k = a.shape[0]
    aug = np.concatenate([a % p, np.eye(k, dtype=np.int64)], axis=1)
    for c in range(k):
        nz = np.nonzero(aug[c:, c])[0]
        if nz.size == 0:
            return None
        r = c + int(nz[0])
        if r != c:
            aug[[c, r]] = aug[[r, c]]
        aug[c] = (aug[c] * pow(int(aug[c, c]), -1, p)) % p
        col = aug[:, c].copy()
        col[c] = 0
        if col.any():
            aug = (aug - np.outer(col, aug[c])) % p
    return aug[:, k:]


def _dixon_lift(sel_rows, sel_rhs, pivcols, p, ainv):
    """p-adic lifting for the square subsystem on sel_rows x pivcols.

    Yields, at each reconstruction checkpoint, a candidate rational vector
    for the pivot variables (None entries mean reconstruction failed).
    """
    k = len(sel_rows)
    local = {c: idx for idx, c in enumerate(pivcols)}
    sparse = []
    for cols, vals in sel_rows:
        sparse.append([(local[c], v) for c, v in zip(cols, vals) if c in local])
    residual = [int(r) for r in sel_rhs]
    x = [0] * k
    pk = 1
    for step in range(1, _LIFT_CHECKPOINTS[-1] + 1):
        rv = np.array([r % p for r in residual], dtype=np.int64)
        y = (ainv @ rv) % p
        yl = [int(v) for v in y]
        for idx in range(k):
            if yl[idx]:
                x[idx] += pk * yl[idx]
        nxt = []
        for ridx in range(k):
            acc = residual[ridx]
            for (lc, v) in sparse[ridx]:
                if yl[lc]:
                    acc -= v * yl[lc]
            assert acc % p == 0
            nxt.append(acc // p)
        residual = nxt
        pk *= p
        if all(r == 0 for r in residual):
            yield [Fraction(v) for v in x]
            return
        if step in _LIFT_CHECKPOINTS:
            cand = [_rational_reconstruct(v % pk, pk) for v in x]
            yield cand if all(c is not None for c in cand) else None


def _solve_mod_p(items, ncols, ring, p, want_fredholm):
    """One modular attempt.  Returns ('ok', x) | ('no', None) | ('retry', None)."""
    pivcols, pivrows, pmat, bad = _eliminate_mod_p(items, ncols, p)

    if bad is not None:
        if not want_fredholm:
            return ("retry", None)
        sel = pivrows + [bad]
        # seek exact u with sum_i u_i row_i = 0 and sum_i u_i rhs_i = 1
        tsys = SparseSystem(len(sel))
        coord_rows = {}
        for ui, item_idx in enumerate(sel):
            (cols, vals), _ = items[item_idx]
            for c, v in zip(cols, vals):
                coord_rows.setdefault(c, []).append((ui, v))
        for c, entries in sorted(coord_rows.items()):
            tsys.add_row([u for u, _ in entries], [v for _, v in entries], 0)
        tsys.add_row(list(range(len(sel))),
                      [items[idx][1] for idx in sel], 1)
        u = solve_sparse_system(tsys, Ring("Q"), _fredholm=False)
        if u is None:
            return ("retry", None)
        # exact certificate check: u kills the selected lhs rows, not the rhs
        acc_rhs = 0
        acc_lhs = {}
        for ui, item_idx in enumerate(sel):
            (cols, vals), rhs = items[item_idx]
            cu = u[ui]
            if not cu:
                continue
            acc_rhs += cu * rhs
            for c, v in zip(cols, vals):
                acc_lhs[c] = acc_lhs.get(c, 0) + cu * v
        if acc_rhs != 0 and all(v == 0 for v in acc_lhs.values()):
            return ("no", None)
        return ("retry", None)

    k = len(pivcols)
    if k == 0:
        zero = ring.zero()
        x = [zero] * ncols
        return ("ok", x) if _verify(items, [0] * ncols) else ("retry", None)

    sel_rows = [items[i][0] for i in pivrows]
    sel_rhs = [items[i][1] for i in pivrows]
    amat = np.zeros((k, k), dtype=np.int64)
    local = {c: idx for idx, c in enumerate(pivcols)}
    for r, (cols, vals) in enumerate(sel_rows):
        for c, v in zip(cols, vals):
            lc = local.get(c)
            if lc is not None:
                amat[r, lc] = v % p
    ainv = _inverse_mod_p(amat, p)
    if ainv is None:
        return ("retry", None)

    for cand in _dixon_lift(sel_rows, sel_rhs, pivcols, p, ainv):
        if cand is None:
            continue
        x = [Fraction(0)] * ncols
        for c, v in zip(pivcols, cand):
            x[c] = v
        if not _verify(items, x):
            continue
        if ring.kind == "Z":
            if all(v.denominator == 1 for v in x):
                return ("ok", [int(v) for v in x])
            if k == ncols:
                return ("no", None)  # unique rational solution, not integral
            return ("hnf", (sel_rows, sel_rhs))
        return ("ok", x)
    return ("retry", None)


def _solve_small(items, ncols, ring):
    rows = []
    rhs = []
    for (cols, vals), r in items:
        dense = [ring.zero()] * ncols
        for c, v in zip(cols, vals):
            dense[c] = ring.from_int(v)
        rows.append(dense)
        rhs.append(ring.from_int(r))
    if ring.kind == "Z":
        return solve_integer(rows, rhs, ncols)
    return solve_field(rows, rhs, ncols, ring)


def solve_sparse_system(system: SparseSystem, ring: Ring, _fredholm=True):
    """Solve the accumulated system over the ring; None means no solution.

    All outcomes are exact: solutions are verified by substitution and
    negative answers are certified (duplicate-row conflict, exact small
    elimination, or a verified Fredholm certificate).
    """
    if system.infeasible:
        return None
    ncols = system.ncols
    items = list(system.rows.items())
    if not items:
        return [ring.zero()] * ncols

    nrows = len(items)
    dense_cost = nrows * min(nrows, ncols) * ncols
    use_numpy = dense_cost > 1_500_000 and ncols > 1
    if ring.kind == "Fp" and ring.p * ring.p * (ncols + 1) >= 2**62:
        use_numpy = False

    if not use_numpy:
        x = _solve_small(items, ncols, ring)
        if x is not None:
            assert _verify(items, x), "exact small solve returned a bad solution"
        return x

    if ring.kind == "Fp":
        pivcols, pivrows, pmat, bad = _eliminate_mod_p(items, ncols, ring.p)
        if bad is not None:
            return None  # elimination over F_p itself is exact
        x = [0] * ncols
        for r, c in enumerate(pivcols):
            x[c] = int(pmat[r, ncols]) % ring.p
        # direct modular verification
        for (cols, vals), rhs in items:
            acc = 0
            for c, v in zip(cols, vals):
                acc += v * x[c]
            if acc % ring.p != rhs % ring.p:
                raise AssertionError("F_p elimination produced a bad solution")
        return x

    for p in _PRIMES:
        status, payload = _solve_mod_p(items, ncols, ring, p, _fredholm)
        if status == "ok":
            return payload
        if status == "no":
            return None
        if status == "hnf":
            sel_rows, sel_rhs = payload
            rows = []
            for cols, vals in sel_rows:
                dense = [0] * ncols
                for c, v in zip(cols, vals):
                    dense[c] = v
                rows.append(dense)
            x = solve_integer(rows, list(sel_rhs), ncols)
            if x is not None and _verify(items, x):
                return x
            continue  # subsystem did not represent the full system; retry
    # all primes exhausted: last-resort exact dense solve
    x = _solve_small(items, ncols, ring)
    if x is not None:
        assert _verify(items, x)
    return x


# ---------------------------------------------------------------------------
# many right-hand sides over one coefficient matrix
# ---------------------------------------------------------------------------

class SharedRows:
    """Deduplicated sparse rows reused across many right-hand sides."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.index = {}
        self.keys = []

    def row(self, cols, vals) -> int:
        """Canonical index of the row, adding it if new."""
        pairs = sorted((c, v) for c, v in zip(cols, vals) if v)
        key = (tuple(c for c, _ in pairs), tuple(v for _, v in pairs))
        idx = self.index.get(key)
        if idx is None:
            idx = len(self.keys)
            self.index[key] = idx
            self.keys.append(key)
        return idx

    def unit_row(self, cols) -> int:
        return self.row(cols, [1] * len(cols))


def _transposed_pivot_rows(pivkeys, pivcols):
    """Rows of the pivot-column/pivot-row transposed square system."""
    local = {c: i for i, c in enumerate(pivcols)}
    cols_by_i = [[] for _ in pivcols]
    vals_by_i = [[] for _ in pivcols]
    for r, (pcols, pvals) in enumerate(pivkeys):
        for c, v in zip(pcols, pvals):
            lc = local.get(c)
            if lc is not None:
                cols_by_i[lc].append(r)
                vals_by_i[lc].append(v)
    return [(tuple(cs), tuple(vs)) for cs, vs in zip(cols_by_i, vals_by_i)]


def _row_combination_certificate(key, rhs_val, pivkeys, pivrhs, pivcols,
                                 tkeys, p, ainv_t):
    """Try to certify that equation (key, rhs_val) contradicts the pivot rows.

    Expresses key as an exact rational combination of the pivot rows (lifted
    from mod p on the pivot columns, then verified on every coordinate); if
    that succeeds but the right-hand sides disagree, the system is
    inconsistent over Q.  Returns True when inconsistency is certified,
    False when undecided (caller should retry another prime).
    """
    k = len(pivkeys)
    local = {c: i for i, c in enumerate(pivcols)}
    target = [0] * k
    for c, v in zip(*key):
        lc = local.get(c)
        if lc is not None:
            target[lc] = v
    for lam in _dixon_lift(tkeys, target, list(range(k)), p, ainv_t):
        if lam is None:
            continue
        # exact check: the lambda-combination of pivot rows reproduces key
        acc = {}
        for coeff, (pcols, pvals) in zip(lam, pivkeys):
            if not coeff:
                continue
            for c, v in zip(pcols, pvals):
                acc[c] = acc.get(c, 0) + coeff * v
        want = dict(zip(*key))
        if any(acc.get(c, 0) != v for c, v in want.items()):
            continue
        if any(v != 0 for c, v in acc.items() if c not in want):
            continue
        lhs_rhs = sum(c * r for c, r in zip(lam, pivrhs))
        return lhs_rhs != rhs_val
    return False


def solve_shared(shared: SharedRows, rhs_list, ring: Ring):
    """Solve the shared system against each rhs vector; exact, certified.

    rhs_list holds one dense integer rhs per query, aligned with the row
    indices handed out by SharedRows.row.  Returns one solution-or-None per
    query.  Fields only; over Z fall back to per-query solve_sparse_system.
    """
    ncols = shared.ncols
    nrows = len(shared.keys)
    if ring.kind == "Z":
        out = []
        for rhs in rhs_list:
            sys = SparseSystem(ncols)
            for key, r in zip(shared.keys, rhs):
                sys.add_row(key[0], key[1], r)
            out.append(solve_sparse_system(sys, ring))
        return out

    dense_cost = nrows * min(nrows, ncols) * ncols
    if dense_cost * max(1, len(rhs_list)) <= 1_500_000 or ncols <= 1:
        out = []
        for rhs in rhs_list:
            sys = SparseSystem(ncols)
            for key, r in zip(shared.keys, rhs):
                sys.add_row(key[0], key[1], r)
            out.append(solve_sparse_system(sys, ring))
        return out

    items = [(key, 0) for key in shared.keys]
    if ring.kind == "Fp":
        p = ring.p
        if p * p * (ncols + 1) >= 2**62:
            return [solve_sparse_system(_as_system(shared, rhs), ring) for rhs in rhs_list]
        pivcols, pivrows, _, _ = _eliminate_mod_p(items, ncols, p)
        k = len(pivcols)
        ainv = _pivot_inverse(shared, pivrows, pivcols, p)
        out = []
        for rhs in rhs_list:
            if k == 0:
                x = [0] * ncols
            else:
                bv = np.array([rhs[i] % p for i in pivrows], dtype=np.int64)
                y = (ainv @ bv) % p
                x = [0] * ncols
                for c, v in zip(pivcols, y):
                    x[c] = int(v)
            ok = all(
                sum(v * x[c] for c, v in zip(*key)) % p == r % p
                for key, r in zip(shared.keys, rhs))
            out.append(x if ok else None)
        return out

    # rationals: one elimination, Dixon per query, certified failures
    for p in _PRIMES:
        pivcols, pivrows, _, _ = _eliminate_mod_p(items, ncols, p)
        k = len(pivcols)
        ainv = _pivot_inverse(shared, pivrows, pivcols, p) if k else None
        if k and ainv is None:
            continue
        ainv_t = np.ascontiguousarray(ainv.T) if k else None
        pivkeys = [shared.keys[i] for i in pivrows]
        tkeys = _transposed_pivot_rows(pivkeys, pivcols) if k else []
        out = []
        retry = False
        for rhs in rhs_list:
            best = None
            if k == 0:
                best = [Fraction(0)] * ncols
            else:
                sel_rhs = [rhs[i] for i in pivrows]
                for cand in _dixon_lift(pivkeys, sel_rhs, pivcols, p, ainv):
                    if cand is not None:
                        best = [Fraction(0)] * ncols
                        for c, v in zip(pivcols, cand):
                            best[c] = v
                        break
            failing = []
            if best is not None:
                for key, r in zip(shared.keys, rhs):
                    acc = sum(v * best[c] for c, v in zip(*key))
                    if acc != r:
                        failing.append((key, r))
                if not failing:
                    out.append(best)
                    continue
            else:
                failing = list(zip(shared.keys, rhs))
            # candidate failed: certify infeasibility via a contradicting row
            pivrhs = [rhs[i] for i in pivrows]
            certified = False
            for key, r in failing[:16]:
                if k and _row_combination_certificate(key, r, pivkeys, pivrhs,
                                                      pivcols, tkeys, p, ainv_t):
                    certified = True
                    break
            if certified:
                out.append(None)
            else:
                retry = True
                break
        if not retry:
            return out
    # all primes exhausted: per-query exact fallback
    return [solve_sparse_system(_as_system(shared, rhs), ring) for rhs in rhs_list]


def _as_system(shared: SharedRows, rhs) -> SparseSystem:
    sys = SparseSystem(shared.ncols)
    for key, r in zip(shared.keys, rhs):
        sys.add_row(key[0], key[1], r)
    return sys


def _pivot_inverse(shared: SharedRows, pivrows, pivcols, p):
    k = len(pivcols)
    if k == 0:
        return None
    local = {c: i for i, c in enumerate(pivcols)}
    amat = np.zeros((k, k), dtype=np.int64)
    for r, idx in enumerate(pivrows):
        cols, vals = shared.keys[idx]
        for c, v in zip(cols, vals):
            lc = local.get(c)
            if lc is not None:
                amat[r, lc] = v % p
    return _inverse_mod_p(amat, p)
