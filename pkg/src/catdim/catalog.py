"""Generators for finite windows of the example categories.

Arrows are enumerated by lexicographic order on their function (or matrix)
representation, so ids are stable across runs and platforms; each arrow's
label is the JSON rendering of that representation, which makes the raw
function recoverable from any serialized window.

Conventions: simplex-window objects are labeled by their chain size n
(elements 1..n); pointed-set objects by "<n>_*" where n counts the
non-basepoint elements and 0 encodes the basepoint in function tuples;
matrix-category objects by their dimension.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations_with_replacement, product

from .category import Arrow, Category
from .errors import InputError, SoundnessError
from .preorder import PreorderCertificate, action_array, factor_set
from .rings import ZZ

# composition tables beyond this many composable pairs stay lazy
_MATERIALIZE_LIMIT = 3_000_000


def _build(labels, family, hom_keys, compose_key, identity_key):
    arrows = []
    keys = []
    index = {}
    n = len(labels)
    for s in range(n):
        for t in range(n):
            for key in hom_keys(s, t):
                aid = len(arrows)
                arrows.append(Arrow(aid, s, t,
                                    json.dumps(key, separators=(",", ":"))))
                keys.append(key)
                index[(s, t, key)] = aid
    identity = [index[(z, z, identity_key(z))] for z in range(n)]

    def compose_fn(f, g):
        af, ag = arrows[f], arrows[g]
        key = compose_key(keys[f], keys[g], af.src, af.tgt, ag.tgt)
        return index[(af.src, ag.tgt, key)]

    hom_count = {}
    for a in arrows:
        hom_count[(a.src, a.tgt)] = hom_count.get((a.src, a.tgt), 0) + 1
    pairs = 0
    for (a, b), nf in hom_count.items():
        for (b2, _), ng in hom_count.items():
            if b == b2:
                pairs += nf * ng

    if pairs <= _MATERIALIZE_LIMIT:
        na = len(arrows)
        table = [[-1] * na for _ in range(na)]
        out_of = {}
        for a in arrows:
            out_of.setdefault(a.src, []).append(a.id)
        for f in range(na):
            tgt = arrows[f].tgt
            row = table[f]
            for g in out_of.get(tgt, []):
                row[g] = compose_fn(f, g)
        cat = Category(labels, arrows, identity, table=table)
    else:
        cat = Category(labels, arrows, identity, compose_fn=compose_fn)
    cat.family = family
    cat.arrow_keys = keys
    cat.key_index = index
    return cat


def arrow_by_key(c: Category, src: int, tgt: int, key):
    """Arrow id from its function representation, for catalog windows."""
    index = getattr(c, "key_index", None)
    if index is None:
        index = {}
        for a in c.arrows:
            k = json.loads(a.label)
            k = _freeze(k)
            index[(a.src, a.tgt, k)] = a.id
        c.key_index = index
    try:
        return index[(src, tgt, _freeze(key))]
    except KeyError:
        raise InputError(f"no arrow {key} from object {src} to {tgt}") from None


def _freeze(k):
    if isinstance(k, list):
        return tuple(_freeze(v) for v in k)
    return k


# ---------------------------------------------------------------------------
# the families
# ---------------------------------------------------------------------------

def gen_delta(n_max: int) -> Category:
    """Window of the simplex category: chains 1..n_max, weakly monotone maps."""
    if n_max < 1:
        raise InputError("the simplex window needs at least one object")
    labels = [str(i) for i in range(1, n_max + 1)]

    def hom_keys(s, t):
        return list(combinations_with_replacement(range(1, t + 2), s + 1))

    def compose_key(kf, kg, *_):
        return tuple(kg[v - 1] for v in kf)

    def identity_key(z):
        return tuple(range(1, z + 2))

    return _build(labels, "delta", hom_keys, compose_key, identity_key)


def gen_finset_star(n_max: int) -> Category:
    """Window of pointed finite sets 0_*..n_max_* with all pointed maps."""
    if n_max < 0:
        raise InputError("the pointed-set window needs n_max >= 0")
    labels = [f"{i}_*" for i in range(n_max + 1)]

    def hom_keys(s, t):
        return list(product(range(t + 1), repeat=s))

    def compose_key(kf, kg, *_):
        return tuple(0 if v == 0 else kg[v - 1] for v in kf)

    def identity_key(z):
        return tuple(range(1, z + 1))

    return _build(labels, "finset", hom_keys, compose_key, identity_key)


def gen_fi_sharp(n_max: int) -> Category:
    """Pointed maps injective away from the basepoint (a FinSet_* subcategory)."""
    if n_max < 0:
        raise InputError("the FI# window needs n_max >= 0")
    labels = [f"{i}_*" for i in range(n_max + 1)]

    def hom_keys(s, t):
        keys = []
        for key in product(range(t + 1), repeat=s):
            nonzero = [v for v in key if v]
            if len(nonzero) == len(set(nonzero)):
                keys.append(key)
        return keys

    def compose_key(kf, kg, *_):
        return tuple(0 if v == 0 else kg[v - 1] for v in kf)

    def identity_key(z):
        return tuple(range(1, z + 1))

    return _build(labels, "fisharp", hom_keys, compose_key, identity_key)


def gen_vect_fq(q: int, n_max: int) -> Category:
    """Window of F_q vector spaces: objects 0..n_max, arrows all matrices.

    v1 supports prime q only; Hom(m, n) holds all n x m matrices over F_q
    as tuples of row tuples, composed by exact matrix product mod q.
    """
    from .rings import _is_prime
    if not _is_prime(q):
        raise InputError("only prime q is supported")
    if n_max < 0:
        raise InputError("the matrix window needs n_max >= 0")
    labels = [str(i) for i in range(n_max + 1)]

    def hom_keys(s, t):
        m, n = s, t
        keys = []
        for entries in product(range(q), repeat=m * n):
            keys.append(tuple(entries[r * m:(r + 1) * m] for r in range(n)))
        return keys

    def compose_key(kf, kg, src, mid, tgt):
        # kf: mid x src, kg: tgt x mid; the product is tgt x src
        return tuple(
            tuple(sum(grow[j] * kf[j][i] for j in range(mid)) % q
                  for i in range(src))
            for grow in kg)

    def identity_key(z):
        return tuple(tuple(1 if i == j else 0 for j in range(z)) for i in range(z))

    return _build(labels, f"vect{q}", hom_keys, compose_key, identity_key)


def gen_rel(n_max: int) -> Category:
    """Finite sets with relations; hom-sets blow up as 2^(mn), so keep tiny."""
    if n_max < 0:
        raise InputError("the relation window needs n_max >= 0")
    labels = [str(i) for i in range(n_max + 1)]

    def hom_keys(s, t):
        pairs = [(i, j) for i in range(1, s + 1) for j in range(1, t + 1)]
        keys = []
        for mask in range(1 << len(pairs)):
            keys.append(tuple(p for k, p in enumerate(pairs) if mask >> k & 1))
        return keys

    def compose_key(kf, kg, *_):
        out = set()
        for (i, j) in kf:
            for (j2, k) in kg:
                if j == j2:
                    out.add((i, k))
        return tuple(sorted(out))

    def identity_key(z):
        return tuple((i, i) for i in range(1, z + 1))

    return _build(labels, "rel", hom_keys, compose_key, identity_key)


def generate(family: str, n_max: int, q: int | None = None) -> Category:
    """CLI entry: one window by family name."""
    if family == "delta":
        return gen_delta(n_max)
    if family == "finset":
        return gen_finset_star(n_max)
    if family == "fisharp":
        return gen_fi_sharp(n_max)
    if family == "vect":
        if q is None:
            raise InputError("the vect family needs --q")
        return gen_vect_fq(q, n_max)
    if family == "rel":
        return gen_rel(n_max)
    raise InputError(f"unknown family {family!r} "
                     "(expected delta, finset, fisharp, vect, or rel)")


# ---------------------------------------------------------------------------
# moduli of the examples
# ---------------------------------------------------------------------------

def delta_modulus(n_max: int) -> dict:
    """mu(d) = {d+1} on the simplex window (the top object points outside)."""
    return {str(d): [str(d + 1)] for d in range(1, n_max + 1)}


def finset_modulus(n_max: int) -> dict:
    """mu(d_*) = {0_*, ..., d_*} on the pointed-set window."""
    return {f"{d}_*": [f"{k}_*" for k in range(d + 1)] for d in range(n_max + 1)}


def vect_modulus(n_max: int) -> dict:
    """mu(n) = {n} on the matrix window."""
    return {str(n): [str(n)] for n in range(n_max + 1)}


# ---------------------------------------------------------------------------
# the signed witness family for the simplex window
# ---------------------------------------------------------------------------

@dataclass
class DeltaWitness:
    """The signed family proving n+2 <=_n n+1 on a simplex window.

    H holds the self-maps h of the chain n+2 with i <= h(i) <= i+1; rho is
    the parity sign prod (-1)^(h(i)-i); iota[k] is the involution flipping
    the value at k between k and k+1, which negates rho.  The certificate
    carries -rho(h) on every non-identity member of H.
    """

    n: int
    h_ids: list
    rho: dict
    iota: dict
    certificate: PreorderCertificate


def delta_witness(c: Category, n: int) -> DeltaWitness:
    if getattr(c, "family", None) != "delta":
        raise InputError("delta_witness needs a simplex window from the catalog")
    try:
        d = c.obj(str(n))
        y = c.obj(str(n + 1))
        x = c.obj(str(n + 2))
    except InputError:
        raise InputError(
            f"window must contain objects {n}, {n + 1}, {n + 2}") from None
    size = n + 2

    h_keys = []
    for choices in product(*[(i, i + 1) for i in range(1, size)]):
        h_keys.append(tuple(choices) + (size,))
    h_ids = [arrow_by_key(c, x, x, k) for k in h_keys]
    rho = {}
    for hid, key in zip(h_ids, h_keys):
        defect = sum(v - i for i, v in enumerate(key, start=1))
        rho[hid] = -1 if defect % 2 else 1

    # the signed action matrices must cancel exactly
    hom = c.hom_ids(d, x)
    acc = {}
    for hid in h_ids:
        act = action_array(c, d, hid)
        sign = rho[hid]
        for col, row in enumerate(act):
            acc[(row, col)] = acc.get((row, col), 0) + sign
    if any(v != 0 for v in acc.values()):
        raise SoundnessError("signed action matrices of H do not sum to zero")

    # every non-identity member factors through the middle object
    members = set(factor_set(c, x, y).member_ids())
    id_x = c.identity[x]
    for hid in h_ids:
        if hid != id_x and hid not in members:
            raise SoundnessError(
                f"witness member {hid} does not factor through {n + 1}")
    if id_x not in h_ids:
        raise SoundnessError("the identity is missing from H")

    iota = {}
    key_of = dict(zip(h_ids, h_keys))
    for k in range(1, size):
        flip = {}
        for hid, key in key_of.items():
            flipped = list(key)
            flipped[k - 1] = 2 * k + 1 - key[k - 1]
            flip[hid] = arrow_by_key(c, x, x, tuple(flipped))
        iota[k] = flip

    coeffs = {hid: -rho[hid] for hid in h_ids if hid != id_x}
    cert = PreorderCertificate(d, x, y, ZZ, coeffs)
    if not cert.recheck(c):
        raise SoundnessError("delta witness certificate failed its recheck")
    return DeltaWitness(n, h_ids, rho, iota, cert)
