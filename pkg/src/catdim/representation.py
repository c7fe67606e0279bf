"""Representations of a finite category window.

A representation assigns an exact matrix to every arrow, functorially:
identities go to identity matrices and composition goes to matrix product
(in reverse order, V(g o f) = V(g) V(f)).  Generation is evaluated inside
the window only; arrows leaving the window are invisible, which is the
faithful notion for the full-subcategory restrictions used throughout.
"""

from __future__ import annotations

from .category import Category
from .errors import InputError
from .linalg import rref, spans_full_module
from .matrix import Matrix, grid_to_matrix, mats_to_grid
from .rings import Ring, ring_from_name


class Representation:
    def __init__(self, category: Category, ring: Ring, dims, mats):
        if len(dims) != category.n_objects or len(mats) != category.n_arrows:
            raise InputError("dims/mats do not cover the category")
        self.category = category
        self.ring = ring
        self.dims = list(dims)
        self.mats = list(mats)

    def dim(self, x: int) -> int:
        return self.dims[x]

    def mat(self, f: int) -> Matrix:
        return self.mats[f]

    def to_json(self) -> dict:
        c = self.category
        return {
            "ring": self.ring.name,
            "dims": {c.objects[x]: self.dims[x] for x in range(c.n_objects)},
            "mats": {str(a.id): mats_to_grid(self.mats[a.id]) for a in c.arrows},
        }

    @classmethod
    def from_json(cls, category: Category, data) -> "Representation":
        ring = ring_from_name(data["ring"])
        dims = [None] * category.n_objects
        for lab, n in data["dims"].items():
            dims[category.obj(lab)] = int(n)
        if any(v is None for v in dims):
            raise InputError("dims must cover every object")
        mats = [None] * category.n_arrows
        for key, grid in data["mats"].items():
            fid = int(key)
            a = category.arrows[fid]
            mats[fid] = grid_to_matrix(grid, dims[a.tgt], dims[a.src], ring)
        if any(m is None for m in mats):
            raise InputError("mats must cover every arrow")
        return cls(category, ring, dims, mats)


class Restriction:
    """Matrices of a representation on the full subcategory of some objects."""

    def __init__(self, category, ring, objects, dims, mats):
        self.category = category
        self.ring = ring
        self.objects = frozenset(objects)
        self._dims = dict(dims)
        self._mats = dict(mats)

    def dim(self, x: int) -> int:
        if x not in self.objects:
            raise InputError(
                f"object {self.category.objects[x]} is outside the restriction")
        return self._dims[x]

    def mat(self, f: int) -> Matrix:
        m = self._mats.get(f)
        if m is None:
            raise InputError(f"missing restricted matrix for arrow {f}")
        return m


def restrict(v: Representation, objects) -> Restriction:
    """Restriction of v to the full subcategory spanned by the given objects."""
    objs = {v.category.obj(o) for o in objects}
    dims = {x: v.dims[x] for x in objs}
    mats = {a.id: v.mats[a.id] for a in v.category.arrows
            if a.src in objs and a.tgt in objs}
    return Restriction(v.category, v.ring, objs, dims, mats)


# ---------------------------------------------------------------------------
# functoriality and generation
# ---------------------------------------------------------------------------

def check_functoriality(v) -> list:
    """Violated representation laws; empty list means v is a representation.

    Checks shapes, identity matrices, and V(g o f) = V(g) V(f) over every
    composable pair of the window.
    """
    c = v.category
    report = []
    for a in c.arrows:
        m = v.mat(a.id)
        if m.shape != (v.dim(a.tgt), v.dim(a.src)):
            report.append(f"arrow {a.id}: matrix is {m.shape}, "
                          f"expected {(v.dim(a.tgt), v.dim(a.src))}")
    if report:
        return report
    for x in range(c.n_objects):
        if not v.mat(c.identity[x]).is_identity():
            report.append(f"identity of {c.objects[x]} is not an identity matrix")
    mats = [v.mat(a.id) for a in c.arrows]
    for f, g in c.composable_pairs():
        h = c.compose_ids(f, g)
        if not _product_equals(mats[g], mats[f], mats[h], v.ring):
            report.append(f"composition law fails on pair ({f}, {g})")
    return report


def _product_equals(a: Matrix, b: Matrix, target: Matrix, ring) -> bool:
    """Whether a @ b == target, without allocating the product matrix."""
    if a.ncols != b.nrows or target.shape != (a.nrows, b.ncols):
        return False
    arows, brows, trows = a.rows, b.rows, target.rows
    p = ring.p if ring.kind == "Fp" else 0
    for i in range(a.nrows):
        arow = arows[i]
        trow = trows[i]
        for j in range(b.ncols):
            acc = 0
            for k in range(a.ncols):
                av = arow[k]
                if av:
                    acc += av * brows[k][j]
            if p:
                if acc % p != trow[j]:
                    return False
            elif acc != trow[j]:
                return False
    return True


def basic_projective(category: Category, d, ring: Ring) -> Representation:
    """The representation freely generated by one vector at d.

    Its value at x is the free module on Hom(d, x) in canonical arrow order,
    and an arrow f acts by post-composition on that basis.
    """
    d = category.obj(d)
    dims = [len(category.hom_ids(d, x)) for x in range(category.n_objects)]
    positions = {}
    for x in range(category.n_objects):
        positions[x] = {fid: k for k, fid in enumerate(category.hom_ids(d, x))}
    mats = []
    for a in category.arrows:
        src_hom = category.hom_ids(d, a.src)
        tgt_pos = positions[a.tgt]
        m = Matrix.zeros(dims[a.tgt], dims[a.src], ring)
        one = ring.one()
        for col, g in enumerate(src_hom):
            row = tgt_pos[category.compose_ids(g, a.id)]
            m.rows[row][col] = one
        mats.append(m)
    return Representation(category, ring, dims, mats)


def is_generated(v: Representation, degrees) -> bool:
    """Whether the images of arrows out of the degree objects span everywhere.

    Over a field this asks that the columns span each V(z); over Z that they
    generate the full lattice Z^dim (checked by Hermite normal form), which
    matches module generation rather than vector-space generation.
    """
    c = v.category
    degs = [c.obj(o) for o in degrees]
    for z in range(c.n_objects):
        nz = v.dims[z]
        if nz == 0:
            continue
        vectors = []
        for d in degs:
            for h in c.hom_ids(d, z):
                m = v.mats[h]
                for j in range(m.ncols):
                    vectors.append([m.rows[i][j] for i in range(nz)])
        if not spans_full_module(vectors, nz, v.ring):
            return False
    return True


# ---------------------------------------------------------------------------
# direct sums, subrepresentations, quotients (random instances for testing)
# ---------------------------------------------------------------------------

def direct_sum(reps) -> Representation:
    reps = list(reps)
    if not reps:
        raise InputError("direct sum of nothing")
    c, ring = reps[0].category, reps[0].ring
    if any(r.category is not c or r.ring != ring for r in reps):
        raise InputError("direct sum needs a common category and ring")
    dims = [sum(r.dims[x] for r in reps) for x in range(c.n_objects)]
    mats = []
    for a in c.arrows:
        m = Matrix.zeros(dims[a.tgt], dims[a.src], ring)
        roff = coff = 0
        for r in reps:
            block = r.mats[a.id]
            for i in range(block.nrows):
                m.rows[roff + i][coff:coff + block.ncols] = block.rows[i]
            roff += block.nrows
            coff += block.ncols
        mats.append(m)
    return Representation(c, ring, dims, mats)


def _closed_subspace_bases(v: Representation, seeds):
    """RREF bases, per object, of the subrepresentation generated by seeds.

    seeds is a list of (object index, vector).  Only fields are supported.
    """
    c, ring = v.category, v.ring
    bases = {z: [] for z in range(c.n_objects)}

    def insert(z, vec):
        rows = bases[z] + [list(vec)]
        pivots = rref(rows, v.dims[z], ring)
        new = rows[: len(pivots)]
        if new != bases[z]:
            bases[z] = new
            return True
        return False

    work = []
    for z, vec in seeds:
        if insert(z, vec):
            work.append(z)
    while work:
        z = work.pop()
        for a in c.arrows:
            if a.src != z:
                continue
            m = v.mats[a.id]
            changed = False
            for row in list(bases[z]):
                img = m.mat_vec(row)
                if any(e != ring.zero() for e in img):
                    changed |= insert(a.tgt, img)
            if changed and a.tgt not in work:
                work.append(a.tgt)
    return bases


def subrep_from_bases(v: Representation, bases) -> Representation:
    """The subrepresentation with the given RREF bases, in those coordinates."""
    c, ring = v.category, v.ring
    dims = [len(bases[z]) for z in range(c.n_objects)]
    pivot_cols = {}
    for z in range(c.n_objects):
        rows = [row[:] for row in bases[z]]
        pivot_cols[z] = rref(rows, v.dims[z], ring)
    mats = []
    for a in c.arrows:
        m = v.mats[a.id]
        out = Matrix.zeros(dims[a.tgt], dims[a.src], ring)
        tgt_rows = bases[a.tgt]
        tgt_piv = pivot_cols[a.tgt]
        for col, row in enumerate(bases[a.src]):
            img = m.mat_vec(row)
            coords = [img[pc] for pc in tgt_piv]
            # confirm the image really lies in the target subspace
            check = list(img)
            for coeff, brow in zip(coords, tgt_rows):
                if coeff != ring.zero():
                    check = [ring.sub(u, ring.mul(coeff, w)) for u, w in zip(check, brow)]
            if any(e != ring.zero() for e in check):
                raise InputError("bases are not closed under the category action")
            for i, coeff in enumerate(coords):
                out.rows[i][col] = coeff
        mats.append(out)
    return Representation(c, ring, dims, mats)


def quotient_by_bases(v: Representation, bases) -> Representation:
    """The quotient of v by the subrepresentation with the given RREF bases."""
    c, ring = v.category, v.ring
    zero, one = ring.zero(), ring.one()
    proj, incl, dims = {}, {}, []
    for z in range(c.n_objects):
        n = v.dims[z]
        rows = [row[:] for row in bases[z]]
        pivots = rref(rows, n, ring)
        pivot_set = set(pivots)
        free = [j for j in range(n) if j not in pivot_set]
        q = len(free)
        pz = Matrix.zeros(q, n, ring)
        for k, j in enumerate(free):
            pz.rows[k][j] = one
        for r, pc in enumerate(pivots):
            for k, j in enumerate(free):
                val = rows[r][j]
                if val != zero:
                    pz.rows[k][pc] = ring.neg(val)
        iz = Matrix.zeros(n, q, ring)
        for k, j in enumerate(free):
            iz.rows[j][k] = one
        proj[z], incl[z] = pz, iz
        dims.append(q)
    mats = [proj[a.tgt] @ v.mats[a.id] @ incl[a.src] for a in c.arrows]
    return Representation(c, ring, dims, mats)


def random_seed_vectors(v: Representation, rng, count):
    """Random (object, vector) pairs with small exact entries."""
    c, ring = v.category, v.ring
    candidates = [z for z in range(c.n_objects) if v.dims[z] > 0]
    seeds = []
    for _ in range(count):
        z = rng.choice(candidates) if candidates else 0
        if ring.kind == "Fp":
            vec = [rng.randrange(ring.p) for _ in range(v.dims[z])]
        else:
            vec = [ring.from_int(rng.randint(-2, 2)) for _ in range(v.dims[z])]
        seeds.append((z, vec))
    return seeds


def random_generated_representation(category, gens, ring, rng):
    """A random representation generated in the given degrees (fields only).

    Built as a quotient of the direct sum of the basic projectives at the
    generator degrees by the subrepresentation generated by a few random
    vectors, so generation in the given degrees holds by construction.
    """
    if not ring.is_field:
        raise InputError("random representations require a field")
    p = direct_sum([basic_projective(category, d, ring) for d in gens])
    seeds = random_seed_vectors(p, rng, rng.randint(1, 3))
    bases = _closed_subspace_bases(p, seeds)
    return quotient_by_bases(p, bases)


def random_subrepresentation(v: Representation, rng, count=2) -> Representation:
    """A random subrepresentation of v, as a representation in its own right."""
    seeds = random_seed_vectors(v, rng, count)
    bases = _closed_subspace_bases(v, seeds)
    return subrep_from_bases(v, bases)
