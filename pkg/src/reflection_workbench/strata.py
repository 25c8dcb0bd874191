"""Intersection lattice of a reflection arrangement and isotropy data per flat.

A flat is identified with its saturated hyperplane set B (every mirror
containing it).  For each flat we record the isotropy type and the numbers
d_z (mirror count), h_z (largest component Coxeter number, 1 if trivial)
and s_z = d_z - h_z + 1, then check the flatness of the Jacobian minors and
the monotonicity of h_z along closure chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .coxeter import CoxeterTypeSpec, classify
from .errors import ClassificationFailure, FlatnessViolation, LatticeTooLarge
from .fields import is_zero
from .polyalg import Flat, vanishing_order

MAX_HYPERPLANES = 30


@dataclass
class StratumData:
    flat: Flat
    codim: int
    hyperplanes: tuple
    isotropy_type: list
    d_z: int
    s_z: int
    h_z: int
    degrees: tuple = ()

    def label(self):
        if not self.isotropy_type:
            return "1"
        return "x".join(str(t) for t in self.isotropy_type)

    def to_json(self):
        return {
            "hyperplanes": list(self.hyperplanes),
            "codim": self.codim,
            "dim": self.flat.dim,
            "isotropy": self.label(),
            "degrees": list(self.degrees),
            "d_z": self.d_z,
            "s_z": self.s_z,
            "h_z": self.h_z,
        }


@dataclass
class LatticeReport:
    group: object
    strata: list
    closure: list = field(default_factory=list)  # (i, j): flat i strictly contains flat j

    def by_codim(self, p):
        return [s for s in self.strata if s.codim == p]

    def find(self, hyperplanes):
        key = tuple(sorted(hyperplanes))
        for s in self.strata:
            if s.hyperplanes == key:
                return s
        return None

    def to_json(self):
        return {
            "group": str(self.group.spec),
            "n_flats": len(self.strata),
            "strata": [s.to_json() for s in self.strata],
            "closure": [list(pair) for pair in self.closure],
        }


def _contained(G, flat):
    """Ids of every mirror containing the flat."""
    tol = G.tol
    out = []
    for r in G.reflections:
        if all(is_zero(linalg.dot(r.form, v), tol) for v in flat.direction):
            out.append(r.hyperplane_id)
    return frozenset(out)


def _flat_of(G, ids):
    return Flat.from_forms([G.reflections[i].form for i in sorted(ids)], G.n)


def _saturate_geometric(G, ids):
    return _contained(G, _flat_of(G, ids))


def isotropy(G, flat_or_ids):
    """Isotropy data of a flat (given as a Flat or as a set of hyperplane ids)."""
    if isinstance(flat_or_ids, Flat):
        flat = flat_or_ids
        ids = _contained(G, flat)
    else:
        ids = _saturate_geometric(G, flat_or_ids)
        flat = _flat_of(G, ids)
    if ids:
        try:
            types = classify(G.coxeter_graph(ids))
        except Exception as exc:
            raise ClassificationFailure(f"cannot classify isotropy of mirrors {sorted(ids)}") from exc
    else:
        types = []
    degrees = tuple(sorted(k for t in types for k in t.degrees))
    d_z = len(ids)
    if d_z != sum(k - 1 for k in degrees):
        raise ClassificationFailure(f"mirror count {d_z} disagrees with isotropy degrees {degrees}")
    h_z = max((t.coxeter_number for t in types), default=1)
    if degrees:
        rest = list(degrees)
        rest.remove(max(rest))
        s_z = sum(k - 1 for k in rest)
    else:
        s_z = 0
    if s_z != d_z - h_z + 1:
        raise ClassificationFailure(f"s_z = {s_z} but d_z - h_z + 1 = {d_z - h_z + 1}")
    rank_b = linalg.rank([G.reflections[i].form for i in ids], G.tol or None) if ids else 0
    if flat.codim != rank_b or flat.dim != G.n - rank_b:
        raise ClassificationFailure("flat dimension disagrees with the rank of its forms")
    return StratumData(flat, flat.codim, tuple(sorted(ids)), types, d_z, s_z, h_z, degrees)


def intersection_lattice(G, max_hyperplanes=MAX_HYPERPLANES):
    """All flats of the arrangement, saturated, ordered by codimension."""
    m = len(G.reflections)
    if G.n > 4 and m > max_hyperplanes:
        raise LatticeTooLarge(f"{m} hyperplanes in rank {G.n} exceeds the cap")
    seen = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for ids in frontier:
            for h in range(m):
                if h in ids:
                    continue
                new = _saturate_geometric(G, ids | {h})
                if new not in seen:
                    seen.add(new)
                    nxt.append(new)
        frontier = nxt
    strata = [isotropy(G, ids) for ids in seen]
    strata.sort(key=lambda s: (s.codim, len(s.hyperplanes), s.hyperplanes))
    sets = [set(s.hyperplanes) for s in strata]
    closure = [(i, j) for i in range(len(strata)) for j in range(len(strata)) if sets[i] < sets[j]]
    return LatticeReport(G, strata, closure)


@dataclass
class CheckReport:
    name: str
    entries: list
    violations: list

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {"check": self.name, "ok": self.ok, "n_checked": len(self.entries), "violations": self.violations}


def minor_flatness_check(C, L, strict=False):
    """vanishing_order(M_ij, flat) >= s_z for every flat and every minor."""
    M = C.minors()
    n = C.n
    entries, violations = [], []
    for idx, st in enumerate(L.strata):
        for i in range(n):
            for j in range(n):
                order = vanishing_order(M[i][j], st.flat)
                row = {"flat": list(st.hyperplanes), "i": i + 1, "j": j + 1, "order": _order_json(order), "s_z": st.s_z}
                entries.append(row)
                if order < st.s_z:
                    violations.append(row)
    if strict and violations:
        raise FlatnessViolation(f"{len(violations)} minors are not flat enough: {violations[:3]}")
    return CheckReport("flatness", entries, violations)


def _order_json(order):
    return order if isinstance(order, int) else "inf"


def monotonicity_check(L):
    """h_z <= h_z' and d_z - s_z <= d_z' - s_z' whenever flat z contains flat z'."""
    entries, violations = [], []
    for i, j in L.closure:
        a, b = L.strata[i], L.strata[j]
        row = {"outer": list(a.hyperplanes), "inner": list(b.hyperplanes), "h": [a.h_z, b.h_z]}
        entries.append(row)
        if a.h_z > b.h_z or a.d_z - a.s_z > b.d_z - b.s_z:
            violations.append(row)
    return CheckReport("monotonicity", entries, violations)


def isotropy_types_by_codim(L):
    """{codim: sorted list of isotropy labels} (distinct labels)."""
    out = {}
    for s in L.strata:
        out.setdefault(s.codim, set()).add(s.label())
    return {p: sorted(v) for p, v in sorted(out.items())}


def trivial_type():
    return CoxeterTypeSpec("A", 1)
