import itertools

import pytest
import sympy
from hypothesis import given, strategies as st

from cechain.chainbundle import (
    GluedBundle,
    bundle_cohomology,
    deformation_is_nontrivial,
    difference_map,
    end_cohomology,
    h0_end,
    h0_end_component,
    h1_end,
    is_balanced_criteria,
    is_balanced_direct,
    separating_endomorphism,
)
from cechain.errors import SubspacesMeetProperly
from cechain.exactmath import FieldSpec, Matrix, Subspace, dual_intersect_flat, meets_properly, rank
from cechain.flags import SplittingType, is_balanced_type
from cechain.rng import make_rng

QQ = FieldSpec.rational()
BIG = FieldSpec.prime()
F5 = FieldSpec.prime(5)


def endomorphism_oracle(components, gluings):
    """h^0(End V) by solving M_{i+1}(0) g_i = g_i M_i(oo) with sympy over Q."""
    comps = [sorted(c, reverse=True) for c in components]
    r = len(comps[0])
    var = {}
    for i, e in enumerate(comps):
        for a in range(r):
            for b in range(r):
                for m in range(e[a] - e[b] + 1):
                    var[i, a, b, m] = len(var)

    def value(i, a, b, at_zero):
        top = comps[i][a] - comps[i][b]
        if top < 0:
            return None
        return var[i, a, b, 0 if at_zero else top]

    eqs = []
    for i, g in enumerate(gluings):
        g = sympy.Matrix(g)
        for x in range(r):
            for y in range(r):
                row = [0] * len(var)
                # (M_{i+1}(0) g)[x, y] - (g M_i(oo))[x, y]
                for z in range(r):
                    v = value(i + 1, x, z, True)
                    if v is not None:
                        row[v] += g[z, y]
                    v = value(i, z, y, False)
                    if v is not None:
                        row[v] -= g[x, z]
                eqs.append(row)
    n = len(var)
    if not eqs:
        return n
    return n - sympy.Matrix(eqs).rank()


def small_bundles(max_k=3, max_r=3):
    return st.tuples(st.integers(1, max_k), st.integers(1, max_r), st.integers(0, 10_000))


def random_small_q_bundle(k, r, seed, spread=2):
    rng = make_rng(seed)
    comps = [[int(x) for x in rng.integers(0, spread + 1, size=r)] for _ in range(k)]
    gluings = []
    for _ in range(k - 1):
        while True:
            g = [[int(x) for x in rng.integers(-2, 3, size=r)] for _ in range(r)]
            if sympy.Matrix(g).det() != 0:
                break
        gluings.append(g)
    return comps, gluings


# -- sections and difference map ------------------------------------------------

@pytest.mark.parametrize("exps, count", [([3, 3], 4), ([4, 5], 4), ([0, 2], 5), ([1, 1, 2], 9)])
def test_end_section_counts(exps, count):
    assert len(h0_end_component(SplittingType(exps))) == count


def test_difference_map_examples():
    assert difference_map(GluedBundle(QQ, [[0, 1]])).ncols == 0
    rng = make_rng(1)
    b = GluedBundle.random(BIG, [[0, 0, 0]] * 4, rng)
    assert rank(difference_map(b)) == 3 * 9
    aligned = GluedBundle(QQ, [[0, 1], [0, 1]], [Matrix.identity(QQ, 2)])
    assert rank(difference_map(aligned)) == 3


def test_h1_examples():
    rng = make_rng(2)
    assert h1_end(GluedBundle.random(BIG, [[3], [-1], [7]], rng)) == 0
    generic = GluedBundle(QQ, [[0, 1], [0, 1]], [Matrix(QQ, [[1, 2], [3, 5]])])
    assert (h1_end(generic), h0_end(generic)) == (0, 4)
    aligned = GluedBundle(QQ, [[0, 1], [0, 1]], [Matrix.identity(QQ, 2)])
    assert (h1_end(aligned), h0_end(aligned)) == (1, 5)


def test_verdict_examples():
    trivial = GluedBundle(QQ, [[0, 0]] * 3, [Matrix.identity(QQ, 2)] * 2)
    assert is_balanced_direct(trivial) and is_balanced_criteria(trivial)
    aligned = GluedBundle(QQ, [[0, 1], [0, 1]], [Matrix.identity(QQ, 2)])
    assert not is_balanced_direct(aligned) and not is_balanced_criteria(aligned)


@given(small_bundles())
def test_h0_end_matches_sympy_oracle(params):
    k, r, seed = params
    comps, gluings = random_small_q_bundle(k, r, seed)
    b = GluedBundle(QQ, comps, gluings)
    h0 = endomorphism_oracle(comps, gluings)
    assert h0_end(b) == h0
    # End V has degree 0, so chi(End V) = r^2 on the nodal chain
    assert h1_end(b) == h0 - r * r


@given(small_bundles(4, 3))
def test_euler_identity(params):
    k, r, seed = params
    comps, gluings = random_small_q_bundle(k, r, seed, spread=3)
    coh = end_cohomology(GluedBundle(QQ, comps, gluings))
    assert coh.h0 - coh.h1 == coh.sum_h0_components - coh.sum_h1_components - (k - 1) * r * r
    if all(is_balanced_type(SplittingType(c)) for c in comps):
        assert coh.h0 - coh.h1 == r * r
        assert coh.h0 - coh.h1 == coh.sum_h0_components - (k - 1) * r * r


@given(small_bundles(4, 3), st.integers(1, 4))
def test_gluing_scaling_invariance(params, c):
    k, r, seed = params
    comps, gluings = random_small_q_bundle(k, r, seed, spread=1)
    b = GluedBundle(QQ, comps, gluings)
    scaled = GluedBundle(QQ, comps, [Matrix(QQ, g).scale(c) for g in gluings])
    assert h1_end(b) == h1_end(scaled)
    assert is_balanced_direct(b) == is_balanced_direct(scaled)
    assert is_balanced_criteria(b) == is_balanced_criteria(scaled)


@given(st.integers(1, 4), st.integers(2, 4), st.integers(0, 10_000))
def test_unbalanced_component_forces_h1(k, r, seed):
    rng = make_rng(seed)
    comps = [[0] * r for _ in range(k)]
    comps[int(rng.integers(k))][0] = 2
    b = GluedBundle.random(BIG, comps, rng)
    assert h1_end(b) > 0
    assert not is_balanced_criteria(b)


@given(st.integers(2, 5), st.integers(1, 5), st.integers(0, 10_000))
def test_criteria_agree_on_random_bundles(k, r, seed):
    rng = make_rng(seed)
    comps = []
    for _ in range(k):
        m = int(rng.integers(-2, 3))
        a = int(rng.integers(0, r + 1))
        comps.append([m + 1] * a + [m] * (r - a))
    b = GluedBundle.random(F5, comps, rng)
    assert is_balanced_direct(b) == is_balanced_criteria(b)


# -- separation and deformations ----------------------------------------------

def test_separation_instance():
    A = Subspace.coordinate(QQ, 3, [0, 1])
    B = Subspace.coordinate(QQ, 3, [0])
    M = separating_endomorphism(A, B)
    assert M == Matrix(QQ, [[0, 0, 0], [0, 0, 0], [1, 0, 0]])
    assert not dual_intersect_flat(A, B, M)[1]
    with pytest.raises(SubspacesMeetProperly):
        separating_endomorphism(Subspace.coordinate(QQ, 3, [0]), Subspace.coordinate(QQ, 3, [1]))


def test_separation_degenerate_equal_subspaces():
    A = Subspace.coordinate(QQ, 4, [0, 1])
    M = separating_endomorphism(A, A)
    assert not dual_intersect_flat(A, A, M)[1]


@given(st.integers(0, 10_000))
def test_random_improper_pair_separated(seed):
    rng = make_rng(seed)
    r = 5
    common = BIG.random_vector(rng, r)
    A = Subspace.span(BIG, r, [common, BIG.random_vector(rng, r)])
    B = Subspace.span(BIG, r, [common])
    assert not meets_properly(A, B)
    assert not dual_intersect_flat(A, B, separating_endomorphism(A, B, rng))[1]
    assert not dual_intersect_flat(A, B, Matrix.random(BIG, rng, r, r))[1]


def test_deformations():
    rng = make_rng(4)
    balanced = GluedBundle.random(BIG, [[0, 1], [1, 1], [1, 2]], rng)
    for _ in range(5):
        assert not deformation_is_nontrivial(balanced, 1, Matrix.random(BIG, rng, 2, 2))
    aligned = GluedBundle(QQ, [[0, 1], [0, 1]], [Matrix.identity(QQ, 2)])
    # the common line is e_0; move it towards e_1
    assert deformation_is_nontrivial(aligned, 0, Matrix(QQ, [[0, 0], [1, 0]]))
    # a coboundary: the value of a constant endomorphism at the node
    assert not deformation_is_nontrivial(aligned, 0, Matrix(QQ, [[1, 0], [0, 0]]))
    with pytest.raises(IndexError):
        deformation_is_nontrivial(aligned, 1, Matrix.zeros(QQ, 2, 2))


@given(small_bundles(3, 2))
def test_deformation_exists_iff_h1(params):
    k, r, seed = params
    comps, gluings = random_small_q_bundle(k, r, seed, spread=1)
    b = GluedBundle(QQ, comps, gluings)
    if k == 1:
        return
    units = [Matrix(QQ, [[int(x == i and y == j) for y in range(r)] for x in range(r)])
             for i, j in itertools.product(range(r), repeat=2)]
    some = any(deformation_is_nontrivial(b, node, M) for node in range(k - 1) for M in units)
    # only the node part of h^1 comes from first-order changes of the gluings
    coh = end_cohomology(b)
    assert some == (coh.h1 > coh.sum_h1_components)
    if all(is_balanced_type(SplittingType(c)) for c in comps):
        assert some == (coh.h1 > 0)


# -- sections of V ----------------------------------------------------------------

def test_bundle_cohomology_examples():
    assert (bundle_cohomology(GluedBundle(QQ, [[1, 1]])).h0, bundle_cohomology(GluedBundle(QQ, [[1, 1]])).h1) == (4, 0)
    neg = bundle_cohomology(GluedBundle(QQ, [[-1], [-1]], [[[1]]]))
    assert (neg.h0, neg.h1) == (0, 1)
    rng = make_rng(6)
    triv = bundle_cohomology(GluedBundle.random(BIG, [[0, 0, 0]] * 4, rng))
    assert (triv.h0, triv.h1) == (3, 0)


@given(small_bundles(4, 3))
def test_bundle_euler(params):
    k, r, seed = params
    rng = make_rng(seed)
    comps = [[int(x) for x in rng.integers(-3, 3, size=r)] for _ in range(k)]
    b = GluedBundle.random(BIG, comps, rng)
    coh = bundle_cohomology(b)
    assert coh.h0 - coh.h1 == sum(sum(c) + r for c in comps) - (k - 1) * r
