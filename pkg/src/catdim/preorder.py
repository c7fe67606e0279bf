"""Deciders for the representation-theoretic preorder x <=_d y.

For s a self-map of x factoring through y, the action matrix M_s records
post-composition by s on the canonical basis Hom(d, x); x <=_d y holds when
the identity matrix lies in the coefficient-ring span of the M_s.  Three
independent routes are provided: the span test itself (with a certificate),
the annihilator characterization, and a randomized invertibility screen
that is sound but may return false negatives.

Orientation convention: columns of M_s are indexed by f, rows by g = s o f,
so action matrices compose covariantly: M_{s'} @ M_s = M_{s' o s}.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .category import Category
from .errors import InputError, SoundnessError
from .linalg import integer_kernel, nullspace_field, rref, spans_full_module
from .matrix import Matrix
from .rings import Ring, ring_from_name
from .systems import SharedRows, SparseSystem, solve_shared, solve_sparse_system

# generator counts below this size skip the idempotent pre-pass in leq
_LADDER_MIN = 24
# leq_alt uses the literal kernel + submodule test below these sizes
_ALT_LITERAL_MAX = 40


@dataclass(frozen=True)
class FactorSet:
    """Self-maps of x factoring through y, with all factorization witnesses."""

    x: int
    y: int
    members: tuple  # ((s, ((p, q), ...)), ...) ordered by arrow id

    def member_ids(self):
        return [s for s, _ in self.members]

    def witnesses(self, s):
        for m, w in self.members:
            if m == s:
                return w
        raise InputError(f"arrow {s} does not factor through the target")


def factor_set(c: Category, x, y) -> FactorSet:
    x, y = c.obj(x), c.obj(y)
    buckets = {}
    for p in c.hom_ids(x, y):
        for q in c.hom_ids(y, x):
            s = c.compose_ids(p, q)
            buckets.setdefault(s, []).append((p, q))
    members = tuple((s, tuple(sorted(buckets[s]))) for s in sorted(buckets))
    return FactorSet(x, y, members)


def action_array(c: Category, d, s) -> list:
    """Positions: entry at index_of(f) is index_of(s o f) in Hom(d, x)."""
    d = c.obj(d)
    arrow = c.arrows[s]
    if arrow.src != arrow.tgt:
        raise InputError(f"arrow {s} is not an endomorphism")
    hom = c.hom_ids(d, arrow.src)
    pos = {f: i for i, f in enumerate(hom)}
    return [pos[c.compose_ids(f, s)] for f in hom]


def action_matrix(c: Category, d, s, ring: Ring) -> Matrix:
    """The 0-1 matrix of post-composition by s on Hom(d, x)."""
    act = action_array(c, d, s)
    n = len(act)
    m = Matrix.zeros(n, n, ring)
    one = ring.one()
    for col, row in enumerate(act):
        m.rows[row][col] = one
    return m


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass
class PreorderCertificate:
    """Coefficients witnessing sum_s coeffs[s] * M_s = identity on Hom(d, x)."""

    d: int
    x: int
    y: int
    ring: Ring
    coeffs: dict  # arrow id -> scalar, zeros omitted
    seed: int | None = None

    def recheck(self, c: Category) -> bool:
        ring = self.ring
        hom = c.hom_ids(self.d, self.x)
        pos = {f: i for i, f in enumerate(hom)}
        zero, one = ring.zero(), ring.one()
        for s in self.coeffs:
            a = c.arrows[s]
            if a.src != self.x or a.tgt != self.x:
                return False
        for fi, f in enumerate(hom):
            acc = {}
            for s, coeff in self.coeffs.items():
                gi = pos[c.compose_ids(f, s)]
                acc[gi] = ring.add(acc.get(gi, zero), coeff)
            for gi, val in acc.items():
                if val != (one if gi == fi else zero):
                    return False
            if fi not in acc:
                return False
        return True

    def to_json(self, c: Category) -> dict:
        data = {
            "d": c.objects[self.d],
            "x": c.objects[self.x],
            "y": c.objects[self.y],
            "ring": self.ring.name,
            "coeffs": [[s, self.ring.format(v)]
                       for s, v in sorted(self.coeffs.items())],
        }
        if self.seed is not None:
            data["seed"] = self.seed
        return data

    @classmethod
    def from_json(cls, c: Category, data) -> "PreorderCertificate":
        ring = ring_from_name(data["ring"])
        coeffs = {int(s): ring.parse(v) for s, v in data["coeffs"]}
        return cls(c.obj(data["d"]), c.obj(data["x"]), c.obj(data["y"]),
                   ring, coeffs, data.get("seed"))


def _solve_action_span(acts, n, ring):
    """Coefficients c with sum c_i M_i = identity, from action arrays."""
    sys = SparseSystem(len(acts))
    for fi in range(n):
        buckets = {}
        for si, act in enumerate(acts):
            buckets.setdefault(act[fi], []).append(si)
        if fi not in buckets:
            return None  # no generator fixes f: the (f, f) equation is 0 = 1
        for gi, lst in sorted(buckets.items()):
            sys.add_unit_row(lst, 1 if gi == fi else 0)
    return solve_sparse_system(sys, ring)


def leq(c: Category, d, x, y, ring: Ring):
    """Certificate for x <=_d y, or None.

    Fast path: when x is a retract of y the identity self-map factors
    through y and M_1 is already the identity matrix, so the certificate is
    the singleton {1_x: 1}.  Otherwise the identity is searched for in the
    span of the action matrices, first over the idempotent generators only
    (a cheap and frequently sufficient subset), then over all of them.
    """
    d, x, y = c.obj(d), c.obj(x), c.obj(y)
    fs = factor_set(c, x, y)
    hom = c.hom_ids(d, x)
    n = len(hom)
    members = fs.member_ids()
    id_x = c.identity[x]
    if id_x in members:
        cert = PreorderCertificate(d, x, y, ring, {id_x: ring.one()})
    elif n == 0:
        cert = PreorderCertificate(d, x, y, ring, {})
    elif not members:
        return None
    else:
        acts = [action_array(c, d, s) for s in members]
        coeffs = None
        idem = [i for i, s in enumerate(members) if c.compose_ids(s, s) == s]
        if len(members) >= _LADDER_MIN and 0 < len(idem) < len(members):
            sub = _solve_action_span([acts[i] for i in idem], n, ring)
            if sub is not None:
                coeffs = {members[idem[i]]: v for i, v in enumerate(sub) if v}
        if coeffs is None:
            full = _solve_action_span(acts, n, ring)
            if full is None:
                return None
            coeffs = {members[i]: v for i, v in enumerate(full) if v}
        cert = PreorderCertificate(d, x, y, ring, coeffs)
    if not cert.recheck(c):
        raise SoundnessError(
            f"certificate for {c.objects[x]} <=_{c.objects[d]} {c.objects[y]} "
            "failed its recheck")
    return cert


# ---------------------------------------------------------------------------
# the annihilator characterization
# ---------------------------------------------------------------------------

def _precomposition_buckets(c: Category, d, x):
    """For each h in Hom(d, x): fibers of s -> s o h over End(x)."""
    endos = c.endo_ids(x)
    pos = {s: i for i, s in enumerate(endos)}
    out = []
    for h in c.hom_ids(d, x):
        buckets = {}
        for s in endos:
            buckets.setdefault(c.compose_ids(h, s), []).append(pos[s])
        out.append((h, buckets))
    return endos, out


def leq_alt(c: Category, d, x, y, ring: Ring) -> bool:
    """Decide x <=_d y via r_d((x,x)) + (x,y,x) = (x,x).

    Small windows compute the right-annihilator kernel literally and test
    submodule equality; larger ones use the equivalent membership form:
    the sum is everything iff every basis self-map t outside S(x, y) is an
    S-combination modulo the kernel, i.e. A_S w = A e_t is solvable, where
    A stacks the pre-composition action of Hom(d, x) on End(x).
    """
    d, x, y = c.obj(d), c.obj(x), c.obj(y)
    s_ids = set(factor_set(c, x, y).member_ids())
    endos = c.endo_ids(x)
    homdx = c.hom_ids(d, x)
    missing = [s for s in endos if s not in s_ids]
    if not missing:
        return True  # (x, y, x) already spans all of (x, x)
    ne = len(endos)

    if ne <= _ALT_LITERAL_MAX and len(homdx) <= _ALT_LITERAL_MAX:
        rows = set()
        for h in homdx:
            buckets = {}
            for i, s in enumerate(endos):
                buckets.setdefault(c.compose_ids(h, s), []).append(i)
            for _, lst in sorted(buckets.items()):
                row = [0] * ne
                for i in lst:
                    row[i] = 1
                rows.add(tuple(row))
        dense = [list(map(ring.from_int, row)) for row in sorted(rows)]
        if ring.kind == "Z":
            kernel = integer_kernel([list(map(int, r)) for r in dense], ne)
        else:
            kernel = nullspace_field(dense, ne, ring)
        units = []
        pos = {s: i for i, s in enumerate(endos)}
        for s in sorted(s_ids):
            v = [ring.zero()] * ne
            v[pos[s]] = ring.one()
            units.append(v)
        return spans_full_module(kernel + units, ne, ring)

    # membership form with one shared elimination across all queries
    pos = {s: i for i, s in enumerate(endos)}
    s_positions = sorted(pos[s] for s in s_ids)
    s_local = {p: i for i, p in enumerate(s_positions)}
    shared = SharedRows(len(s_positions))
    equations = []  # (row index, h, g) in canonical order
    for h in homdx:
        buckets = {}
        for s in endos:
            buckets.setdefault(c.compose_ids(h, s), []).append(pos[s])
        for g, lst in sorted(buckets.items()):
            support = [s_local[p] for p in lst if p in s_local]
            equations.append((shared.unit_row(support), h, g))

    nrows = len(shared.keys)
    queries = []
    for t in missing:
        act_t = {h: c.compose_ids(h, t) for h in homdx}
        rhs = [None] * nrows
        ok = True
        for idx, h, g in equations:
            want = 1 if act_t[h] == g else 0
            if rhs[idx] is None:
                rhs[idx] = want
            elif rhs[idx] != want:
                ok = False  # same S-support, conflicting targets: infeasible
                break
        queries.append([v or 0 for v in rhs] if ok else None)

    solvable = solve_shared(shared, [q for q in queries if q is not None], ring)
    it = iter(solvable)
    for q in queries:
        if q is not None and next(it) is None:
            return False
        if q is None:
            return False
    return True


# ---------------------------------------------------------------------------
# annihilators
# ---------------------------------------------------------------------------

@dataclass
class AnnihilatorBasis:
    x: int
    y: int
    side: str       # "right" or "left"
    anchor: int     # the object d
    vectors: list   # coefficient vectors over the canonical basis Hom(x, y)


def right_annihilator(c: Category, d, x, y, ring: Ring) -> AnnihilatorBasis:
    """Basis of {v in k.Hom(x, y) : v o h = 0 for all h in Hom(d, x)}."""
    d, x, y = c.obj(d), c.obj(x), c.obj(y)
    homxy = c.hom_ids(x, y)
    rows = set()
    for h in c.hom_ids(d, x):
        buckets = {}
        for i, w in enumerate(homxy):
            buckets.setdefault(c.compose_ids(h, w), []).append(i)
        for _, lst in sorted(buckets.items()):
            row = [0] * len(homxy)
            for i in lst:
                row[i] = 1
            rows.add(tuple(row))
    return AnnihilatorBasis(x, y, "right", d, _kernel(sorted(rows), len(homxy), ring))


def left_annihilator(c: Category, x, y, d, ring: Ring) -> AnnihilatorBasis:
    """Basis of {v in k.Hom(x, y) : h o v = 0 for all h in Hom(y, d)}."""
    d, x, y = c.obj(d), c.obj(x), c.obj(y)
    homxy = c.hom_ids(x, y)
    rows = set()
    for h in c.hom_ids(y, d):
        buckets = {}
        for i, w in enumerate(homxy):
            buckets.setdefault(c.compose_ids(w, h), []).append(i)
        for _, lst in sorted(buckets.items()):
            row = [0] * len(homxy)
            for i in lst:
                row[i] = 1
            rows.add(tuple(row))
    return AnnihilatorBasis(x, y, "left", d, _kernel(sorted(rows), len(homxy), ring))


def _kernel(rows, ncols, ring):
    dense = [list(map(ring.from_int, row)) for row in rows]
    if ring.kind == "Z":
        return integer_kernel([list(map(int, r)) for r in dense], ncols)
    return nullspace_field(dense, ncols, ring)


# ---------------------------------------------------------------------------
# randomized screen
# ---------------------------------------------------------------------------

@dataclass
class ProbeResult:
    """Outcome of the randomized invertibility screen, with its seed."""

    result: bool
    seed: int | None
    trials: int
    hit_trial: int | None = None

    def __bool__(self):
        return self.result


def _det_nonzero_int(rows, n) -> bool:
    """Exact nonvanishing of the determinant of an integer matrix (Bareiss)."""
    if n == 0:
        return True
    m = [row[:] for row in rows]
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return False
            m[k], m[swap] = m[swap], m[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return m[n - 1][n - 1] != 0


def leq_probabilistic(c: Category, d, x, y, ring: Ring,
                      sample_bound: int = 1000, trials: int = 5,
                      seed: int = 0) -> ProbeResult:
    """Randomized screen for x <=_d y: sound, with bounded false negatives.

    Draws coefficients from a size-sample_bound sample space and accepts as
    soon as one random combination of the M_s is invertible; by the span's
    closure under multiplication this certifies x <=_d y.  After all trials
    fail it reports False, wrong with probability at most
    (|Hom(d,x)| / sample_bound) ** trials on true instances (Schwartz-Zippel
    applied to the determinant).  The seed travels with the result.
    """
    if not ring.is_field:
        raise InputError("the probabilistic screen needs a field; "
                         "over Z use the exact decider")
    d, x, y = c.obj(d), c.obj(x), c.obj(y)
    rng = random.Random(seed)
    hom = c.hom_ids(d, x)
    n = len(hom)
    members = factor_set(c, x, y).member_ids()
    if n == 0:
        return ProbeResult(True, seed, 0, 0)
    if not members:
        return ProbeResult(False, seed, 0, None)
    acts = [action_array(c, d, s) for s in members]
    space = sample_bound if ring.kind == "Q" else min(sample_bound, ring.p)
    for t in range(trials):
        draws = [rng.randrange(space) for _ in members]
        grid = [[0] * n for _ in range(n)]
        for coeff, act in zip(draws, acts):
            if coeff:
                for col, row in enumerate(act):
                    grid[row][col] += coeff
        if ring.kind == "Q":
            invertible = _det_nonzero_int(grid, n)
        else:
            work = [[v % ring.p for v in row] for row in grid]
            invertible = len(rref(work, n, ring)) == n
        if invertible:
            return ProbeResult(True, seed, t + 1, t)
    return ProbeResult(False, seed, trials, None)
