"""Finite-category data model: objects, arrows, composition, validation.

A Category is immutable after construction.  Composition is stored either
as a dense table indexed by arrow-id pairs (the default, and the JSON
wire format) or as a memoized composition callback for windows whose full
table would be impractically large; both present the same interface.
Arrow ids are canonical: file order / generator order defines them, and
every matrix in the package is indexed by ascending arrow id.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError


@dataclass(frozen=True)
class Arrow:
    id: int
    src: int
    tgt: int
    label: str


class Category:
    def __init__(self, objects, arrows, identity, table=None, compose_fn=None):
        if table is None and compose_fn is None:
            raise InputError("category needs a composition table or callback")
        if len(set(objects)) != len(objects):
            raise InputError("duplicate object labels")
        self.objects = list(objects)
        self.arrows = list(arrows)
        self.identity = list(identity)
        self._table = table
        self._compose_fn = compose_fn
        self._memo = {} if compose_fn is not None else None
        self._obj_index = {lab: i for i, lab in enumerate(self.objects)}
        for i, a in enumerate(self.arrows):
            if a.id != i:
                raise InputError(f"arrow ids must be 0..n-1 in order (saw {a.id} at {i})")
            if not (0 <= a.src < len(objects) and 0 <= a.tgt < len(objects)):
                raise InputError(f"arrow {a.id} has an out-of-range endpoint")
        if len(self.identity) != len(self.objects):
            raise InputError("one identity arrow per object is required")
        for x, aid in enumerate(self.identity):
            a = self.arrows[aid]
            if a.src != x or a.tgt != x:
                raise InputError(f"identity of object {self.objects[x]} is not an endomorphism")
        self._hom = {}
        self._out_of = [[] for _ in self.objects]
        self._into = [[] for _ in self.objects]
        for a in self.arrows:
            self._hom.setdefault((a.src, a.tgt), []).append(a.id)
            self._out_of[a.src].append(a.id)
            self._into[a.tgt].append(a.id)

    # -- lookups -----------------------------------------------------------

    def obj(self, x) -> int:
        """Resolve an object given as a label or an index."""
        if isinstance(x, str):
            try:
                return self._obj_index[x]
            except KeyError:
                raise InputError(f"unknown object label {x!r}") from None
        if not 0 <= x < len(self.objects):
            raise InputError(f"object index {x} out of range")
        return x

    @property
    def n_objects(self):
        return len(self.objects)

    @property
    def n_arrows(self):
        return len(self.arrows)

    def hom_ids(self, x, y):
        """Arrow ids x -> y in ascending order (the canonical basis order)."""
        return self._hom.get((self.obj(x), self.obj(y)), [])

    def hom_set(self, x, y):
        return [self.arrows[i] for i in self.hom_ids(x, y)]

    def endo_ids(self, x):
        return self.hom_ids(x, x)

    def compose_ids(self, f: int, g: int) -> int:
        """Id of g o f ("first f, then g"); f and g must be composable."""
        af, ag = self.arrows[f], self.arrows[g]
        if af.tgt != ag.src:
            raise InputError(f"arrows {f} and {g} are not composable")
        if self._table is not None:
            h = self._table[f][g]
            if h < 0:
                raise InputError(f"composition table has no entry for ({f}, {g})")
            return h
        key = f * len(self.arrows) + g
        h = self._memo.get(key)
        if h is None:
            h = self._compose_fn(f, g)
            self._memo[key] = h
        return h

    def composable_pairs(self):
        """All (f, g) with tgt(f) = src(g), grouped by middle object."""
        for mid in range(len(self.objects)):
            for f in self._into[mid]:
                for g in self._out_of[mid]:
                    yield f, g

    # -- structural operations ----------------------------------------------

    def validate(self):
        """Report of violated category laws; empty list means valid."""
        report = []
        arrows = self.arrows
        if self._table is not None:
            for f in range(len(arrows)):
                for g in range(len(arrows)):
                    entry = self._table[f][g]
                    composable = arrows[f].tgt == arrows[g].src
                    if composable and entry < 0:
                        report.append(f"missing composition entry for ({f}, {g})")
                    if not composable and entry >= 0:
                        report.append(f"composition entry for non-composable pair ({f}, {g})")
        for f, g in self.composable_pairs():
            try:
                h = self.compose_ids(f, g)
            except InputError as e:
                report.append(str(e))
                continue
            if arrows[h].src != arrows[f].src or arrows[h].tgt != arrows[g].tgt:
                report.append(f"compose({f}, {g}) = {h} has wrong endpoints")
        for a in arrows:
            if self.compose_ids(self.identity[a.src], a.id) != a.id:
                report.append(f"left identity law fails for arrow {a.id}")
            if self.compose_ids(a.id, self.identity[a.tgt]) != a.id:
                report.append(f"right identity law fails for arrow {a.id}")
        for f, g in self.composable_pairs():
            fg = self.compose_ids(f, g)
            for h in self._out_of[arrows[g].tgt]:
                if self.compose_ids(fg, h) != self.compose_ids(f, self.compose_ids(g, h)):
                    report.append(f"associativity fails on ({f}, {g}, {h})")
        return report

    def opposite(self) -> "Category":
        """Same arrows with sources and targets swapped, composition reversed."""
        arrows = [Arrow(a.id, a.tgt, a.src, a.label) for a in self.arrows]
        if self._table is not None:
            n = len(arrows)
            table = [[self._table[g][f] for g in range(n)] for f in range(n)]
            return Category(self.objects, arrows, self.identity, table=table)
        return Category(self.objects, arrows, self.identity,
                        compose_fn=lambda f, g: self.compose_ids(g, f))

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        triples = []
        for f, g in self.composable_pairs():
            triples.append([f, g, self.compose_ids(f, g)])
        triples.sort()
        return {
            "objects": self.objects,
            "arrows": [
                {"id": a.id, "src": self.objects[a.src], "tgt": self.objects[a.tgt],
                 "label": a.label}
                for a in self.arrows
            ],
            "identities": {self.objects[x]: aid for x, aid in enumerate(self.identity)},
            "compose": triples,
        }

    @classmethod
    def from_json(cls, data) -> "Category":
        try:
            objects = list(data["objects"])
            raw_arrows = data["arrows"]
            identities = data["identities"]
            triples = data["compose"]
        except (KeyError, TypeError) as e:
            raise InputError(f"category JSON is missing field {e}") from None
        index = {lab: i for i, lab in enumerate(objects)}
        arrows = []
        for k, spec in enumerate(raw_arrows):
            if spec["id"] != k:
                raise InputError(f"arrow ids must appear in order; saw {spec['id']} at {k}")
            if spec["src"] not in index or spec["tgt"] not in index:
                raise InputError(f"arrow {k} references an unknown object")
            arrows.append(Arrow(k, index[spec["src"]], index[spec["tgt"]],
                                str(spec.get("label", k))))
        identity = [None] * len(objects)
        for lab, aid in identities.items():
            if lab not in index:
                raise InputError(f"identity listed for unknown object {lab!r}")
            identity[index[lab]] = aid
        if any(v is None for v in identity):
            raise InputError("identities must cover every object")
        n = len(arrows)
        table = [[-1] * n for _ in range(n)]
        for f, g, h in triples:
            if not (0 <= f < n and 0 <= g < n and 0 <= h < n):
                raise InputError(f"compose triple [{f}, {g}, {h}] out of range")
            if arrows[f].tgt != arrows[g].src:
                raise InputError(f"compose triple for non-composable pair ({f}, {g})")
            if table[f][g] != -1:
                raise InputError(f"duplicate compose triple for ({f}, {g})")
            table[f][g] = h
        for a in arrows:
            for b in arrows:
                if a.tgt == b.src and table[a.id][b.id] == -1:
                    raise InputError(f"missing compose triple for ({a.id}, {b.id})")
        return cls(objects, arrows, identity, table=table)
