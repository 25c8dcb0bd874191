import itertools

import pytest

from reflection_workbench import linalg
from reflection_workbench.chevalley import basic_invariants
from reflection_workbench.coxeter import build_group
from reflection_workbench.errors import LatticeTooLarge
from reflection_workbench.polyalg import Flat
from reflection_workbench.strata import (
    intersection_lattice,
    isotropy,
    isotropy_types_by_codim,
    minor_flatness_check,
    monotonicity_check,
)


def brute_force_flats(G):
    """Distinct row spaces over all subsets of mirror forms."""
    spans = set()
    forms = G.forms
    for r in range(len(forms) + 1):
        for sub in itertools.combinations(range(len(forms)), r):
            rows = [forms[i] for i in sub]
            if rows:
                R, piv = linalg.rref(rows)
                spans.add(tuple(tuple(row) for row in R[: len(piv)]))
            else:
                spans.add(())
    return spans


@pytest.mark.parametrize("spec,count", [("A1", 2), ("A2", 5), ("B2", 6), ("A3", 15), ("B3", 24), ("I2(6)", 8)])
def test_lattice_size_matches_brute_force(spec, count):
    G = build_group(spec)
    L = intersection_lattice(G)
    assert len(L.strata) == count == len(brute_force_flats(G))


def test_a3_isotropy_types():
    L = intersection_lattice(build_group("A3"))
    assert isotropy_types_by_codim(L) == {0: ["1"], 1: ["A1"], 2: ["A1xA1", "A2"], 3: ["A3"]}


def test_b2_isotropy_examples():
    G = build_group("B2")
    diag = isotropy(G, Flat.from_forms([[1, -1]], 2))
    assert ([str(t) for t in diag.isotropy_type], diag.d_z, diag.s_z, diag.h_z) == (["A1"], 1, 0, 2)
    origin = isotropy(G, Flat.from_forms([[1, 0], [0, 1]], 2))
    assert ([str(t) for t in origin.isotropy_type], origin.d_z, origin.s_z, origin.h_z) == (["B2"], 4, 1, 4)
    # saturation: two perpendicular mirrors meet in the origin, which lies on all four
    assert origin.hyperplanes == (0, 1, 2, 3)
    whole = isotropy(G, Flat.from_forms([], 2))
    assert (whole.d_z, whole.s_z, whole.h_z, whole.isotropy_type) == (0, 0, 1, [])


@pytest.mark.parametrize("spec", ["A2", "A3", "B3", "D4", "H3", "B4", "I2(6)"])
def test_origin_matches_global_data(spec):
    G = build_group(spec)
    C = basic_invariants(G)
    L = intersection_lattice(G)
    first, last = L.strata[0], L.strata[-1]
    assert first.codim == 0 and last.flat.dim == 0
    assert (last.d_z, last.s_z, last.h_z) == (C.d, C.s, C.h)
    for st in L.strata:
        assert st.h_z == 1 + st.d_z - st.s_z
        rank = linalg.rank([G.forms[i] for i in st.hyperplanes]) if st.hyperplanes else 0
        assert st.flat.dim == G.n - rank


def test_b2_minor_orders_at_origin():
    G = build_group("B2")
    C = basic_invariants(G)
    L = intersection_lattice(G)
    rep = minor_flatness_check(C, L)
    at_origin = sorted(e["order"] for e in rep.entries if e["flat"] == [0, 1, 2, 3])
    assert at_origin == [1, 1, 3, 3]
    on_diag = [e for e in rep.entries if len(e["flat"]) == 1]
    assert all(e["s_z"] == 0 for e in on_diag)
    assert rep.ok


def test_a3_codim2_a2_flat():
    G = build_group("A3")
    C = basic_invariants(G)
    L = intersection_lattice(G)
    a2 = [s for s in L.strata if s.label() == "A2"]
    assert a2 and all(s.s_z == 1 for s in a2)
    rep = minor_flatness_check(C, L)
    for s in a2:
        orders = [e["order"] for e in rep.entries if e["flat"] == list(s.hyperplanes)]
        assert min(o for o in orders if o != "inf") >= 1


@pytest.mark.parametrize("spec", ["B2", "A3", "B3", "D4"])
def test_flatness_and_monotonicity(spec):
    G = build_group(spec)
    C = basic_invariants(G)
    L = intersection_lattice(G)
    assert minor_flatness_check(C, L, strict=True).ok
    assert monotonicity_check(L).ok


def test_monotonicity_chain_a3():
    L = intersection_lattice(build_group("A3"))
    by_label = {s.label(): s.h_z for s in L.strata}
    assert [by_label[k] for k in ("1", "A1", "A2", "A3")] == [1, 2, 3, 4]


def test_lattice_cap():
    with pytest.raises(LatticeTooLarge):
        intersection_lattice(build_group("A5"), max_hyperplanes=10)


def test_json():
    data = intersection_lattice(build_group("B2")).to_json()
    assert data["n_flats"] == 6
    assert data["strata"][-1]["isotropy"] == "B2"
