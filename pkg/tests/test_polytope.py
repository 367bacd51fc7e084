import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from boxworld import correlations as C
from boxworld import polytope as P
from boxworld.boxes import TSIRELSON_SETTINGS, quantum_array, quantum_array_rational
from boxworld.errors import InexactInput, OutsideHull, SignalingInput

M1 = {"00;00", "00;11", "11;00", "11;11"}
M2 = {"01;01", "01;10", "10;01", "10;10"}


def test_vertex_sets():
    assert len(P.vertex_set("all")) == 256
    assert len(P.vertex_set("local")) == 16
    ns = P.vertex_set("nosignaling")
    assert len(ns) == 24
    assert sum(i.startswith("pr") for i in ns.ids) == 8
    assert ns.array("pr0") == C.TABLE4


def test_dimensions():
    assert P.affine_dimension(P.vertex_set("all")) == 12
    assert P.affine_dimension(P.vertex_set("local")) == 8
    assert P.affine_dimension(P.vertex_set("nosignaling")) == 8
    assert P.affine_dimension([C.TABLE3]) == 0


@pytest.mark.parametrize("op", C.relabeling_group()[::9])
def test_dimension_invariant_under_relabeling(op):
    arrays = [C.apply_relabeling(a, op) for a in P.vertex_set("local").arrays]
    assert P.affine_dimension(arrays) == 8


# --- local membership --------------------------------------------------------

def test_uniform_inside():
    v = P.membership_local(C.UNIFORM)
    assert v.inside
    assert v.certificate.reproduces(C.UNIFORM, P.vertex_set("local"))


def test_pr_outside_with_chsh_certificate():
    v = P.membership_local(C.TABLE4)
    assert not v.inside
    ineq = v.certificate
    assert ineq.label.startswith("chsh")
    assert ineq.bound == 2 and ineq.value_at_target == 4
    assert ineq.separates(C.TABLE4, P.vertex_set("local"))


def test_half_half_mixture_inside():
    other = C.apply_relabeling(C.TABLE3, C.LocalRelabeling(0, 0, 0, 1, 0, 1))
    arr = C.mixture([C.TABLE3, other], [F(1, 2), F(1, 2)])
    v = P.membership_local(arr)
    assert v.inside
    assert v.certificate.reproduces(arr, P.vertex_set("local"))


def test_local_rejects_signaling_and_float_input():
    with pytest.raises(SignalingInput):
        P.membership_local(C.TABLE2)
    with pytest.raises(InexactInput):
        P.membership_local(quantum_array(TSIRELSON_SETTINGS))


def test_tsirelson_array_is_nonlocal():
    arr = quantum_array_rational(TSIRELSON_SETTINGS)
    v = P.membership_local(arr)
    assert not v.inside
    assert v.certificate.value_at_target > 2


# --- no-signaling membership -------------------------------------------------

def test_pr_is_a_nosignaling_vertex():
    v = P.membership_nosignaling(C.TABLE4)
    assert v.inside
    assert v.certificate.as_dict() == {"pr0": 1}


def test_signaling_table_outside():
    v = P.membership_nosignaling(C.TABLE2)
    assert not v.inside
    assert v.certificate.separates(C.TABLE2, P.vertex_set("nosignaling"))


def test_tsirelson_inside_nosignaling():
    v = P.membership_nosignaling(quantum_array_rational(TSIRELSON_SETTINGS))
    assert v.inside


# --- decompositions ----------------------------------------------------------

def test_uniform_has_the_two_printed_mixtures():
    first, second = P.two_decompositions(C.UNIFORM, "local")
    assert first.support == M2 and second.support == M1
    for d in (first, second):
        assert set(d.as_dict().values()) == {F(1, 4)}


def test_vertex_decomposition_is_unique():
    res = P.two_decompositions(C.TABLE3, "local")
    assert isinstance(res, P.Unique)
    assert res.decomposition.as_dict() == {"00;00": 1}
    for _, lo, hi in res.weight_ranges:
        assert lo == hi


def test_uniform_over_24_vertices_not_unique():
    first, second = P.two_decompositions(C.UNIFORM, "nosignaling")
    assert first.as_dict() != second.as_dict()
    vset = P.vertex_set("nosignaling")
    assert first.reproduces(C.UNIFORM, vset) and second.reproduces(C.UNIFORM, vset)


def test_decompose_outside_raises():
    with pytest.raises(OutsideHull):
        P.decompose(C.TABLE4, "local")


def test_decompose_is_deterministic():
    assert P.decompose(C.UNIFORM).as_dict() == P.decompose(C.UNIFORM).as_dict()


# --- CHSH facets -------------------------------------------------------------

def test_facets_on_pr():
    rows = P.chsh_facet_check(C.TABLE4)
    assert len(rows) == 8
    violated = [r for r in rows if not r[2]]
    assert len(violated) == 1 and violated[0][1] == 4


def test_facets_on_uniform_and_vertices():
    assert all(v == 0 and ok for _, v, ok in P.chsh_facet_check(C.UNIFORM))
    for vert in C.local_vertices():
        assert all(abs(v) <= 2 and ok for _, v, ok in P.chsh_facet_check(vert.array()))


# --- properties --------------------------------------------------------------

def random_array(seed):
    rng = random.Random(seed)
    base = P.random_nosignaling_array(rng, den=24)
    if rng.random() < 0.5:
        # pull towards a PR vertex so both verdicts occur
        pr = rng.choice(C.pr_orbit())
        t = F(rng.randint(1, 12), 12)
        return C.mixture([base, pr], [1 - t, t])
    return base


@given(st.integers(0, 10**9))
@settings(max_examples=120, deadline=None)
def test_lp_agrees_with_chsh_facets(seed):
    arr = random_array(seed)
    verdict = P.membership_local(arr)
    all_ok = all(ok for _, _, ok in P.chsh_facet_check(arr))
    assert verdict.inside == all_ok
    vset = P.vertex_set("local")
    if verdict.inside:
        assert verdict.certificate.reproduces(arr, vset)
    else:
        assert verdict.certificate.separates(arr, vset)


@given(st.lists(st.integers(0, 10), min_size=16, max_size=16).filter(any))
@settings(max_examples=40, deadline=None)
def test_random_local_mixtures_are_inside(ws):
    total = sum(ws)
    arr = C.mixture(P.vertex_set("local").arrays, [F(w, total) for w in ws])
    v = P.membership_local(arr)
    assert v.inside
    assert v.certificate.reproduces(arr, P.vertex_set("local"))


@given(st.integers(0, 10**9))
@settings(max_examples=25, deadline=None)
def test_two_decompositions_differ_or_unique(seed):
    rng = random.Random(seed)
    verts = P.vertex_set("local").arrays
    picks = rng.sample(range(16), rng.randint(1, 4))
    arr = C.mixture([verts[i] for i in picks], [F(1, len(picks))] * len(picks))
    res = P.two_decompositions(arr, "local")
    if isinstance(res, P.Unique):
        assert all(lo == hi for _, lo, hi in res.weight_ranges)
    else:
        first, second = res
        assert first.as_dict() != second.as_dict()
