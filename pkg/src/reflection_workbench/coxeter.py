"""Finite reflection groups as explicit arrangements and matrix groups.

Supported families: A_n, B_n, D_n (n >= 3), I2(k) and H3.  Every group acts
on R^n in coordinates where its matrices are orthogonal for the group's Gram
matrix (the identity except for A_n, see :func:`_roots_A`).
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import linalg
from .errors import (
    GroupTooLarge,
    NotFiniteType,
    UnsupportedFamily,
    UnsupportedFieldExact,
    UnsupportedRank,
)
from .fields import (
    NUMERIC,
    RATIONAL,
    QuadExt,
    canon,
    coef_to_json,
    fdiv,
    sign,
    tag_to_str,
)

DEFAULT_ELEMENT_CAP = 10_000
NUMERIC_TOL = 1e-9
FAMILIES = ("A", "B", "D", "I2", "H3")


@dataclass(frozen=True, order=True)
class CoxeterTypeSpec:
    family: str
    rank: int
    k: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedFamily(f"unknown family {self.family!r}")
        if self.rank < 1:
            raise UnsupportedRank("rank must be >= 1")
        if self.family == "D" and self.rank < 3:
            raise UnsupportedRank(f"D_{self.rank} is not a valid type (D requires rank >= 3)")
        if self.family == "H3" and self.rank != 3:
            raise UnsupportedRank("H3 has rank 3")
        if self.family == "I2":
            if self.rank != 2:
                raise UnsupportedRank("I2(k) has rank 2")
            if self.k is None or self.k < 3:
                raise UnsupportedRank("I2(k) requires k >= 3")
        elif self.k is not None:
            raise ValueError("dihedral order only applies to I2")

    @classmethod
    def parse(cls, text):
        t = text.strip().upper().replace(" ", "")
        m = re.fullmatch(r"I2\((\d+)\)", t) or re.fullmatch(r"I2_(\d+)", t)
        if m:
            return cls("I2", 2, int(m.group(1)))
        if t == "H3":
            return cls("H3", 3)
        m = re.fullmatch(r"([ABD])_?(\d+)", t)
        if not m:
            raise UnsupportedFamily(f"cannot parse group spec {text!r}")
        return cls(m.group(1), int(m.group(2)))

    def __str__(self):
        if self.family == "I2":
            return f"I2({self.k})"
        if self.family == "H3":
            return "H3"
        return f"{self.family}{self.rank}"

    def canonical(self):
        """Identify isomorphic labels: I2(3)=A2, I2(4)=B2, B1=A1, D3=A3."""
        if self.family == "I2" and self.k == 3:
            return CoxeterTypeSpec("A", 2)
        if self.family == "I2" and self.k == 4:
            return CoxeterTypeSpec("B", 2)
        if self.family == "B" and self.rank == 1:
            return CoxeterTypeSpec("A", 1)
        if self.family == "D" and self.rank == 3:
            return CoxeterTypeSpec("A", 3)
        return self

    @property
    def degrees(self):
        n = self.rank
        if self.family == "A":
            return tuple(range(2, n + 2))
        if self.family == "B":
            return tuple(range(2, 2 * n + 1, 2))
        if self.family == "D":
            return tuple(sorted(list(range(2, 2 * n - 1, 2)) + [n]))
        if self.family == "I2":
            return (2, self.k)
        return (2, 6, 10)

    @property
    def order(self):
        return math.prod(self.degrees)

    @property
    def coxeter_number(self):
        return max(self.degrees)

    @property
    def reflection_count(self):
        return sum(k - 1 for k in self.degrees)

    def exact_field(self):
        """Field tag of the exact model, or None if only the numeric model exists."""
        if self.family == "H3":
            return ("QuadExt", 5)
        if self.family == "I2":
            if self.k == 4:
                return RATIONAL
            if self.k in (3, 6):
                return ("QuadExt", 3)
            return None
        return RATIONAL


@dataclass(frozen=True)
class Reflection:
    form: tuple
    matrix: tuple
    hyperplane_id: int
    root: tuple = field(repr=False)


@dataclass
class CoxeterGraph:
    roots: list
    labels: dict  # (i, j) with i < j -> m(s_i, s_j) for m >= 3

    @property
    def nodes(self):
        return list(range(len(self.roots)))

    def components(self):
        adj = {i: set() for i in self.nodes}
        for (i, j) in self.labels:
            adj[i].add(j)
            adj[j].add(i)
        seen, comps = set(), []
        for i in self.nodes:
            if i in seen:
                continue
            stack, comp = [i], []
            seen.add(i)
            while stack:
                a = stack.pop()
                comp.append(a)
                for b in adj[a]:
                    if b not in seen:
                        seen.add(b)
                        stack.append(b)
            comps.append(sorted(comp))
        return comps


# ---------------------------------------------------------------------------
# root data per family

_SQRT3 = QuadExt(0, 1, 3)
_TAU = QuadExt(Fraction(1, 2), Fraction(1, 2), 5)


def _unit(n, i):
    return [1 if j == i else 0 for j in range(n)]


def _roots_A(n):
    # essential model: permutation action of S_{n+1} on sum(x) = 0 with basis
    # b_i = e_i - e_{n+1}; x_{n+1} = -(y_1 + ... + y_n), Gram = I + J
    gram = [[2 if i == j else 1 for j in range(n)] for i in range(n)]
    roots = []
    for i in range(n):
        for j in range(i + 1, n):
            v = [0] * n
            v[i], v[j] = 1, -1
            roots.append(v)
    roots.extend(_unit(n, i) for i in range(n))
    return roots, gram


def _roots_B(n):
    roots = [_unit(n, i) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = [0] * n
            v[i], v[j] = 1, -1
            roots.append(v)
            w = [0] * n
            w[i], w[j] = 1, 1
            roots.append(w)
    return roots, linalg.identity(n)


def _roots_D(n):
    roots = []
    for i in range(n):
        for j in range(i + 1, n):
            v = [0] * n
            v[i], v[j] = 1, -1
            roots.append(v)
            w = [0] * n
            w[i], w[j] = 1, 1
            roots.append(w)
    return roots, linalg.identity(n)


_EXACT_COT = {
    # cot(j*pi/k) for the exactly supported dihedral orders
    (3, 1): _SQRT3 / 3, (3, 2): -_SQRT3 / 3,
    (4, 1): 1, (4, 2): 0, (4, 3): -1,
    (6, 1): _SQRT3, (6, 2): _SQRT3 / 3, (6, 3): 0, (6, 4): -_SQRT3 / 3, (6, 5): -_SQRT3,
}


def _roots_I2(k, exact):
    # mirror lines at angles j*pi/k; normal of the line at angle phi is
    # (-sin phi, cos phi), rescaled to (1, -cot phi) for phi != 0
    roots = [[0, 1]]
    for j in range(1, k):
        if exact:
            roots.append([1, canon(-_EXACT_COT[(k, j)])])
        else:
            phi = j * math.pi / k
            roots.append([1.0, -math.cos(phi) / math.sin(phi)])
    if not exact:
        roots[0] = [0.0, 1.0]
    return roots, linalg.identity(2)


def _roots_H3():
    t, ti = _TAU, _TAU - 1  # tau^-1 = tau - 1
    roots = [_unit(3, i) for i in range(3)]
    for base in ((t, 1, ti), (1, ti, t), (ti, t, 1)):
        for s1 in (1, -1):
            for s2 in (1, -1):
                roots.append([base[0], s1 * base[1], s2 * base[2]])
    return [[canon(x) for x in r] for r in roots], linalg.identity(3)


def icosahedral_axes():
    """One vertex per antipodal pair of the icosahedron dual to :func:`_roots_H3`."""
    t = _TAU
    return [[0, 1, t], [0, 1, -t], [1, t, 0], [1, -t, 0], [t, 0, 1], [-t, 0, 1]]


# ---------------------------------------------------------------------------


def _normalize_form(v, tol=0.0):
    for x in v:
        if isinstance(x, float):
            if abs(x) > tol:
                return tuple(canon(y / x) for y in v)
        elif x != 0:
            return tuple(canon(fdiv(y, x)) for y in v)
    raise ValueError("zero form")


def reflection_matrix(root, gram):
    lam = linalg.matvec(gram, root)
    nn = linalg.dot(root, lam)
    n = len(root)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            val = 1 if i == j else 0
            if root[i] != 0 and lam[j] != 0:
                val = val - fdiv(2 * root[i] * lam[j], nn)
            row.append(canon(val))
        rows.append(tuple(row))
    return tuple(rows)


def _freeze(m):
    return tuple(tuple(canon(x) for x in row) for row in m)


class ReflectionGroup:
    """An irreducible finite reflection group with explicit data.

    Elements are enumerated lazily by closing the reflections under
    multiplication.  The object is treated as immutable after construction.
    """

    def __init__(self, spec, roots, gram, backend, field_tag, element_cap=DEFAULT_ELEMENT_CAP):
        self.spec = spec
        self.n = len(gram)
        self.gram = _freeze(gram)
        self.backend = backend
        self.field_tag = field_tag
        self.tol = NUMERIC_TOL if backend == "numeric" else 0.0
        self.element_cap = element_cap
        refl = []
        seen = []
        for root in roots:
            form = _normalize_form(linalg.matvec(self.gram, root), self.tol)
            if any(_forms_equal(form, f, self.tol) for f in seen):
                raise ValueError(f"duplicate hyperplane {form}")
            seen.append(form)
            refl.append(Reflection(form, reflection_matrix(list(root), self.gram), len(refl), tuple(root)))
        self.reflections = tuple(refl)
        self._elements = None

    def __repr__(self):
        return f"ReflectionGroup({self.spec}, backend={self.backend})"

    @property
    def is_exact(self):
        return self.backend == "exact"

    @property
    def identity(self):
        z = 0.0 if not self.is_exact else 0
        one = 1.0 if not self.is_exact else 1
        return tuple(tuple(one if i == j else z for j in range(self.n)) for i in range(self.n))

    @property
    def forms(self):
        return [list(r.form) for r in self.reflections]

    # -- enumeration ------------------------------------------------------

    def _key(self, m):
        if self.is_exact:
            return m
        return tuple(round(x * 1e7) + 0 for row in m for x in row)

    def elements(self):
        """All group elements; closure of the reflections under multiplication."""
        if self._elements is not None:
            return self._elements
        expected = self.spec.order
        if expected > self.element_cap:
            raise GroupTooLarge(f"|W| = {expected} exceeds the cap {self.element_cap}")
        ident = self.identity
        found = {self._key(ident): ident}
        frontier = [ident]
        gens = [r.matrix for r in self.reflections]
        while frontier:
            nxt = []
            for m in frontier:
                for g in gens:
                    p = _freeze(linalg.matmul(g, m))
                    if not self.is_exact:
                        p = tuple(tuple(float(x) for x in row) for row in p)
                    k = self._key(p)
                    if k not in found:
                        found[k] = p
                        nxt.append(p)
                        if len(found) > self.element_cap:
                            raise GroupTooLarge(f"closure exceeded the cap {self.element_cap}")
            frontier = nxt
        self._elements = list(found.values())
        return self._elements

    def involutions(self):
        ident = self.identity
        return [w for w in self.elements() if linalg.mat_equal(linalg.matmul(w, w), ident, self.tol)]

    def act(self, w, x):
        return tuple(linalg.matvec(w, list(x)))

    def orbit(self, x):
        pts = {}
        for w in self.elements():
            y = self.act(w, x)
            pts.setdefault(self._point_key(y), y)
        return list(pts.values())

    def _point_key(self, y):
        if self.is_exact and not any(isinstance(v, float) for v in y):
            return tuple(y)
        return tuple(round(float(v) * 1e7) + 0 for v in y)

    def stabilizer_order(self, x):
        x = tuple(x)
        tol = self.tol if self.is_exact else NUMERIC_TOL
        count = 0
        for w in self.elements():
            y = self.act(w, x)
            if all(_close(a, b, tol) for a, b in zip(y, x)):
                count += 1
        return count

    def is_orthogonal(self, w):
        lhs = linalg.matmul(linalg.matmul(linalg.transpose(w), self.gram), w)
        return linalg.mat_equal(lhs, self.gram, 1e-12 if not self.is_exact else 0.0)

    # -- roots and simple systems ------------------------------------------

    def inner(self, u, v):
        return linalg.dot(u, linalg.matvec(self.gram, v))

    def hyperplane_index(self, form):
        for r in self.reflections:
            if _forms_equal(r.form, form, self.tol):
                return r.hyperplane_id
        return None

    def saturate(self, ids):
        """Hyperplane ids of all reflections in the subgroup generated by ``ids``."""
        current = set(ids)
        changed = True
        while changed:
            changed = False
            for a in list(current):
                ma = self.reflections[a].matrix
                for b in list(current):
                    img = linalg.matvec(ma, list(self.reflections[b].root))
                    form = _normalize_form(linalg.matvec(self.gram, img), self.tol)
                    idx = self.hyperplane_index(form)
                    if idx is None:
                        raise NotFiniteType("reflection image is not a reflection of the group")
                    if idx not in current:
                        current.add(idx)
                        changed = True
        return frozenset(current)

    def simple_roots(self, ids=None):
        """Simple roots (positive w.r.t. a generic vector) of the reflection subgroup."""
        ids = sorted(self.saturate(range(len(self.reflections)) if ids is None else ids))
        if not ids:
            return []
        roots = [list(self.reflections[i].root) for i in ids]
        v = self._generic_vector(roots)
        pos = []
        for r in roots:
            s = sign(self.inner(r, v), self.tol)
            pos.append(r if s > 0 else [canon(-x) for x in r])
        heights = [self.inner(r, v) for r in pos]
        norms = [self.inner(r, r) for r in pos]
        simple = []
        for a, ra in enumerate(pos):
            ok = True
            for b, rb in enumerate(pos):
                if a == b:
                    continue
                # <s_a(b), v> = <b,v> - 2<a,b>/<a,a> <a,v>
                val = heights[b] - fdiv(2 * self.inner(ra, rb), norms[a]) * heights[a]
                if sign(val, self.tol) <= 0:
                    ok = False
                    break
            if ok:
                simple.append(ra)
        return simple

    def _generic_vector(self, roots):
        for c in (7, 11, 13, 17, 19, 23, 29, 31):
            v = [c ** i for i in range(self.n)]
            if self.backend == "numeric":
                v = [float(x) for x in v]
            if all(sign(self.inner(r, v), self.tol) != 0 for r in roots):
                return v
        raise NotFiniteType("no generic vector found")

    @cached_property
    def generators(self):
        """Simple reflections of the whole group."""
        out = []
        for r in self.simple_roots():
            out.append(reflection_matrix(r, self.gram))
        return out

    def coxeter_graph(self, ids=None):
        simple = self.simple_roots(ids)
        mats = [reflection_matrix(r, self.gram) for r in simple]
        labels = {}
        for i in range(len(simple)):
            for j in range(i + 1, len(simple)):
                m = _product_order(mats[i], mats[j], self.identity, self.tol)
                if m >= 3:
                    labels[(i, j)] = m
        return CoxeterGraph(simple, labels)

    def to_json(self):
        return {
            "spec": str(self.spec),
            "field": tag_to_str(self.field_tag),
            "reflections": [{"lambda": [coef_to_json(c) for c in r.form]} for r in self.reflections],
        }


def _close(a, b, tol):
    d = a - b
    if isinstance(d, float):
        return abs(d) <= tol
    return d == 0


def _forms_equal(f, g, tol):
    return all(_close(a, b, tol) for a, b in zip(f, g))


def _product_order(a, b, ident, tol, cap=200):
    p = _freeze(linalg.matmul(a, b))
    cur = p
    for m in range(1, cap + 1):
        if linalg.mat_equal(cur, ident, max(tol, 1e-9) if tol else 0.0):
            return m
        cur = _freeze(linalg.matmul(cur, p))
    raise NotFiniteType("product of reflections has infinite order")


def build_group(spec, backend="auto", element_cap=DEFAULT_ELEMENT_CAP):
    """Construct the canonical reflection group for a type spec.

    ``backend`` is 'exact', 'numeric' or 'auto' (exact whenever possible).
    """
    if isinstance(spec, str):
        spec = CoxeterTypeSpec.parse(spec)
    exact_tag = spec.exact_field()
    if backend == "exact" and exact_tag is None:
        raise UnsupportedFieldExact(f"{spec} has no exact model (cos(pi/{spec.k}) is irrational of high degree)")
    if backend not in ("auto", "exact", "numeric"):
        raise ValueError(f"unknown backend {backend!r}")
    use_exact = exact_tag is not None and backend != "numeric"
    if spec.family == "A":
        roots, gram = _roots_A(spec.rank)
    elif spec.family == "B":
        roots, gram = _roots_B(spec.rank)
    elif spec.family == "D":
        roots, gram = _roots_D(spec.rank)
    elif spec.family == "I2":
        roots, gram = _roots_I2(spec.k, exact_tag is not None)
    else:
        roots, gram = _roots_H3()
    if use_exact:
        return ReflectionGroup(spec, roots, gram, "exact", exact_tag, element_cap)
    roots = [[float(x) for x in r] for r in roots]
    gram = [[float(x) for x in row] for row in gram]
    return ReflectionGroup(spec, roots, gram, "numeric", NUMERIC, element_cap)


def classify(graph):
    """Multiset (sorted list) of canonical type specs, one per connected component."""
    out = []
    for comp in graph.components():
        out.append(_classify_component(comp, graph.labels))
    return sorted(out)


def _classify_component(comp, labels):
    r = len(comp)
    edges = {(i, j): m for (i, j), m in labels.items() if i in comp}
    if r == 1:
        return CoxeterTypeSpec("A", 1)
    if r == 2:
        m = next(iter(edges.values()))
        return CoxeterTypeSpec("I2", 2, m).canonical()
    if len(edges) != r - 1:
        raise NotFiniteType("Coxeter graph component is not a tree")
    deg = {i: 0 for i in comp}
    for (i, j) in edges:
        deg[i] += 1
        deg[j] += 1
    values = sorted(edges.values())
    branch = [i for i in comp if deg[i] >= 3]
    if branch:
        if len(branch) != 1 or deg[branch[0]] != 3 or any(m != 3 for m in values):
            raise NotFiniteType("unsupported branched Coxeter graph")
        arms = _arm_lengths(branch[0], comp, edges)
        if sorted(arms)[:2] == [1, 1]:
            return CoxeterTypeSpec("D", r).canonical()
        raise NotFiniteType(f"branched graph with arms {sorted(arms)} (E-type) is unsupported")
    # path
    ends = [i for i in comp if deg[i] == 1]
    order = _path_order(ends[0], edges)
    path_labels = [_edge(edges, order[i], order[i + 1]) for i in range(r - 1)]
    if all(m == 3 for m in path_labels):
        return CoxeterTypeSpec("A", r)
    if path_labels.count(4) == 1 and set(path_labels) <= {3, 4} and 4 in (path_labels[0], path_labels[-1]):
        return CoxeterTypeSpec("B", r)
    if r == 3 and sorted(path_labels) == [3, 5]:
        return CoxeterTypeSpec("H3", 3)
    raise NotFiniteType(f"unsupported path labels {path_labels}")


def _edge(edges, a, b):
    return edges.get((a, b)) or edges.get((b, a))


def _neighbors(a, edges):
    return [j if i == a else i for (i, j) in edges if a in (i, j)]


def _path_order(start, edges):
    order, prev = [start], None
    while True:
        nxt = [b for b in _neighbors(order[-1], edges) if b != prev]
        if not nxt:
            return order
        prev = order[-1]
        order.append(nxt[0])


def _arm_lengths(center, comp, edges):
    arms = []
    for nb in _neighbors(center, edges):
        length, prev, cur = 1, center, nb
        while True:
            nxt = [b for b in _neighbors(cur, edges) if b != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    return arms


def coxeter_graph(G, ids=None):
    return G.coxeter_graph(ids)


def enumerate_elements(G):
    return G.elements()


def involutions(G):
    return G.involutions()


def orbit(G, x):
    return G.orbit(x)


def group_to_json(G):
    return json.dumps(G.to_json(), sort_keys=False)
