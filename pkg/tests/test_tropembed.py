"""Valued points, Kapranov membership, and embedding refinement."""

from fractions import Fraction

import pytest

from prevtrop.cone import Cone, hilbert_basis
from prevtrop.exactla import AbelianGroup, IntMatrix
from prevtrop.extreal import INF
from prevtrop.multiproj import Grading, proj_system_of_fans
from prevtrop.sysfan import SystemOfFans, morphism_from_lattice_map
from prevtrop.troppre import (
    FiniteLocusNotAFace, chart_polynomial, compare_to_trop, induced_map,
    trop_eval)
from prevtrop.troppre import trop_point as stratum_point
from prevtrop.tropembed import (
    NotBounded, NotHomogeneous, NotSeparating, ValuedScalar, apply_morphism,
    classical_point, coordinate_point, evaluate_polynomial, forget_refinement,
    hypersurface, hypersurface_from_data, hypersurface_to_data,
    kapranov_membership, nonneg_trop_point, refine_embedding,
    refined_classical, refined_trop, restrict_to_chart, scalar,
    separation_witness, trop_point, valued_scalar_from_data,
    valued_scalar_to_data)

from conftest import fresh_rng
from systems import affine_line, affine_plane, line_two_origins

ONE = scalar(1)
T = ValuedScalar.t_power(1)


def quadrant():
    return Cone.from_rays([(1, 0), (0, 1)], 2)


def plane_chart(system):
    return system.omega().class_of(quadrant(), "1")


def slanted_system():
    """One chart whose dual monoid needs three generators."""
    sigma = Cone.from_rays([(1, 0), (1, 2)], 2)
    system = SystemOfFans(2, ["1"], {("1", "1"): [sigma]})
    return system, system.omega().class_of(sigma, "1")


def free_plane():
    """The trivially graded plane: one chart, ambient rank two."""
    grading = Grading(AbelianGroup(0), [(), ()])
    proj = proj_system_of_fans(grading)
    chart = proj.system.omega().class_of(
        proj.poset.cone_of(frozenset()), "1")
    return proj, chart


def random_scalar(rng):
    num = [rng.randint(-3, 3) for _ in range(rng.randint(1, 4))]
    if not any(num):
        num[0] = 1
    den = [rng.randint(-3, 3) for _ in range(rng.randint(1, 4))]
    if not any(den):
        den[-1] = 2
    return ValuedScalar.from_polys(num, den)


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

def test_valuation_is_a_homomorphism():
    rng = fresh_rng(61)
    assert scalar(1).valuation == 0
    assert scalar(0).valuation is INF
    for _ in range(120):
        a = random_scalar(rng)
        b = random_scalar(rng)
        assert (a * b).valuation == a.valuation + b.valuation
        assert (a / b).valuation == a.valuation - b.valuation
        low = min(a.valuation, b.valuation)
        total = (a + b).valuation
        assert total >= low
        if a.valuation != b.valuation:
            assert total == low


def test_equality_ignores_common_factors():
    assert T / T == ONE
    assert ValuedScalar.from_polys([0, 1, 1], [1, 1]) == T
    assert scalar(Fraction(1, 2)) + scalar(Fraction(1, 2)) == 1
    assert T != ONE
    with pytest.raises(TypeError):
        hash(T)


def test_powers_and_division():
    v = ONE + T
    assert v ** 0 == ONE
    assert v ** -2 == (ONE / v) * (ONE / v)
    assert ValuedScalar.t_power(-3) * T ** 3 == ONE
    with pytest.raises(ZeroDivisionError):
        v / scalar(0)
    with pytest.raises(ZeroDivisionError):
        scalar(0) ** -1


# ---------------------------------------------------------------------------
# classical chart points
# ---------------------------------------------------------------------------

def test_points_need_values_on_exactly_the_generators():
    system = affine_plane()
    chart = plane_chart(system)
    with pytest.raises(ValueError):
        classical_point(system, chart, {(1, 0): T})
    with pytest.raises(ValueError):
        classical_point(system, chart,
                        {(1, 0): T, (0, 1): T, (1, 1): T})


def test_values_must_be_multiplicative():
    system, chart = slanted_system()
    good = classical_point(system, chart,
                           {(0, 1): T, (1, 0): T, (2, -1): T})
    assert good.eval((1, 1)) == T * T
    with pytest.raises(ValueError, match="multiplicative"):
        classical_point(system, chart,
                        {(0, 1): ONE, (1, 0): ONE, (2, -1): T})


def test_zero_locus_must_be_a_face():
    system, chart = slanted_system()
    with pytest.raises(FiniteLocusNotAFace):
        classical_point(system, chart,
                        {(0, 1): ONE, (1, 0): 0, (2, -1): ONE})
    origin = classical_point(affine_plane(), plane_chart(affine_plane()),
                             {(1, 0): 0, (0, 1): 0})
    assert origin.zero_face.rays == quadrant().rays


def test_coordinate_points_evaluate_monomials():
    system = affine_plane()
    chart = plane_chart(system)
    p = coordinate_point(system, chart, (T, ONE + T))
    assert p.eval((2, 3)) == T * T * (ONE + T) ** 3
    with pytest.raises(ValueError, match="outside the chart"):
        p.eval((-1, 0))
    edge = coordinate_point(system, chart, (T, ONE),
                            zero_face=Cone.from_rays([(0, 1)], 2))
    assert edge.values[(0, 1)].is_zero
    assert edge.values[(1, 0)] == T


# ---------------------------------------------------------------------------
# tropicalization of points
# ---------------------------------------------------------------------------

def test_frozen_plane_tropicalizations():
    system = affine_plane()
    chart = plane_chart(system)
    p = trop_point(coordinate_point(system, chart, (T, -ONE - T)))
    assert p.stratum.cone.dim == 0
    assert p.coords == (Fraction(1), Fraction(0))
    q = trop_point(coordinate_point(system, chart, (ONE, ONE)))
    assert q.coords == (Fraction(0), Fraction(0))


def test_zero_coordinates_reach_boundary_strata():
    system = affine_plane()
    chart = plane_chart(system)
    p = trop_point(coordinate_point(system, chart, (T, ONE),
                                    zero_face=Cone.from_rays([(0, 1)], 2)))
    assert p.stratum.cone == Cone.from_rays([(0, 1)], 2)
    assert p.coords == (Fraction(1),)
    assert trop_eval(p, (0, 1)) is INF


def test_frozen_nonneg_points():
    system = affine_plane()
    chart = plane_chart(system)
    bounded = nonneg_trop_point(
        coordinate_point(system, chart, (T, scalar(2) + T)))
    assert bounded.face.rays == ()
    assert bounded.coords == (Fraction(1), Fraction(0))
    assert bounded.chart.cone.rays == ((1, 0),)
    onto_axis = nonneg_trop_point(
        coordinate_point(system, chart, (T, ONE),
                         zero_face=Cone.from_rays([(0, 1)], 2)))
    assert onto_axis.face.rays == ((0, 1),)
    assert onto_axis.coords == (Fraction(1),)
    assert onto_axis.chart.cone == quadrant()


def test_unbounded_points_are_rejected():
    system = affine_plane()
    chart = plane_chart(system)
    stretched = coordinate_point(system, chart,
                                 (ValuedScalar.t_power(-1), ONE))
    with pytest.raises(NotBounded, match="valuation -1"):
        nonneg_trop_point(stretched)


def bounded_sample(rng, system, chart):
    """A classical point with nonnegative valuations on the chart."""
    sigma = chart.cone
    u = [0] * sigma.ambient_rank
    for ray in sigma.rays:
        load = rng.randint(0, 3)
        u = [a + load * r for a, r in zip(u, ray)]
    units = [ValuedScalar.from_polys([rng.choice([1, 2, -1]),
                                      rng.randint(-2, 2)])
             for _ in u]
    coords = [ValuedScalar.t_power(a) * c for a, c in zip(u, units)]
    face = rng.choice(sigma.faces())
    return coordinate_point(system, chart, coords, zero_face=face)


def test_comparison_square_commutes():
    rng = fresh_rng(62)
    cases = [(affine_plane(), plane_chart(affine_plane()))]
    cases.append(slanted_system())
    line = affine_line()
    cases.append((line, line.omega().class_of(Cone.from_rays([(1,)], 1), "1")))
    for system, chart in cases:
        for _ in range(40):
            p = bounded_sample(rng, system, chart)
            assert compare_to_trop(system, nonneg_trop_point(p)) \
                == trop_point(p)


def test_tropicalization_commutes_with_morphisms():
    rng = fresh_rng(63)
    plane = affine_plane()
    chart = plane_chart(plane)
    doubled = line_two_origins()
    line = affine_line()
    fold = morphism_from_lattice_map(doubled, line, IntMatrix.identity(1),
                                     {"1": "1", "2": "1"})
    diagonal = morphism_from_lattice_map(line, plane,
                                         IntMatrix.from_rows([[1], [1]]),
                                         {"1": "1"})
    ray = Cone.from_rays([(1,)], 1)
    origin = classical_point(doubled, doubled.omega().class_of(ray, "2"),
                             {(1,): 0})
    dense = coordinate_point(doubled, doubled.omega().class_of(ray, "1"),
                             (T * T,))
    for morphism, p in [(fold, origin), (fold, dense),
                        (diagonal, coordinate_point(
                            line, line.omega().class_of(ray, "1"), (T,)))]:
        assert trop_point(apply_morphism(morphism, p)) \
            == induced_map(morphism, trop_point(p))
    for _ in range(10):
        rows = [[rng.randint(0, 2), rng.randint(0, 2)] for _ in range(2)]
        squeeze = morphism_from_lattice_map(plane, plane,
                                            IntMatrix.from_rows(rows),
                                            {"1": "1"})
        for _ in range(10):
            p = bounded_sample(rng, plane, chart)
            assert trop_point(apply_morphism(squeeze, p)) \
                == induced_map(squeeze, trop_point(p))


# ---------------------------------------------------------------------------
# Kapranov membership
# ---------------------------------------------------------------------------

def tropical_line(system, chart):
    return chart_polynomial(system, chart,
                            [((1, 0), 0), ((0, 1), 0), ((0, 0), 0)])


def test_frozen_line_membership():
    system = affine_plane()
    chart = plane_chart(system)
    poly = tropical_line(system, chart)
    omega = system.omega()
    dense = omega.class_of(Cone.from_rays([], 2), "1")
    assert kapranov_membership(poly, stratum_point(system, dense, (0, 0)))
    assert not kapranov_membership(poly, stratum_point(system, dense, (1, 2)))
    no_x = omega.class_of(Cone.from_rays([(1, 0)], 2), "1")
    assert kapranov_membership(poly, stratum_point(system, no_x, (0,)))
    deep = omega.class_of(quadrant(), "1")
    assert not kapranov_membership(poly, stratum_point(system, deep, ()))
    # without the constant term every term dies at the deep point, and the
    # identically-zero restriction counts as membership
    axes = chart_polynomial(system, chart, [((1, 0), 0), ((0, 1), 0)])
    assert kapranov_membership(axes, stratum_point(system, deep, ()))


def test_line_membership_region():
    system = affine_plane()
    chart = plane_chart(system)
    poly = tropical_line(system, chart)
    dense = system.omega().class_of(Cone.from_rays([], 2), "1")
    grid = [Fraction(k, 2) for k in range(-6, 7)]
    for a in grid:
        for b in grid:
            onto = (a == b <= 0) or (a == 0 <= b) or (b == 0 <= a)
            w = stratum_point(system, dense, (a, b))
            assert kapranov_membership(poly, w) == onto


def test_constructed_roots_lie_on_the_tropical_hypersurface():
    rng = fresh_rng(64)
    system = affine_plane()
    chart = plane_chart(system)

    def unit(power):
        return ValuedScalar.t_power(power, Fraction(rng.choice([1, 2, 3, -1]),
                                                    rng.choice([1, 2])))

    for _ in range(18):
        a, b = unit(rng.randint(-2, 2)), unit(rng.randint(-2, 2))
        x0, y0 = unit(rng.randint(0, 2)), unit(rng.randint(0, 2))
        c = -(a * x0 + b * y0)
        line = chart_polynomial(system, chart,
                                [((1, 0), a.valuation),
                                 ((0, 1), b.valuation),
                                 ((0, 0), c.valuation)])
        root = coordinate_point(system, chart, (x0, y0))
        assert kapranov_membership(line, trop_point(root))
    for _ in range(12):
        alpha, beta = unit(rng.randint(0, 2)), unit(rng.randint(0, 2))
        conic = chart_polynomial(system, chart,
                                 [((1, 1), 0),
                                  ((1, 0), (-beta).valuation),
                                  ((0, 1), (-alpha).valuation),
                                  ((0, 0), (alpha * beta).valuation)])
        for root in [(alpha, beta), (alpha, unit(1)), (unit(1), beta)]:
            p = coordinate_point(system, chart, root)
            assert kapranov_membership(conic, trop_point(p))
    # f = x*(y - beta) vanishes on the whole axis x = 0, where both of its
    # terms are discarded
    beta = unit(1)
    axis_poly = chart_polynomial(system, chart,
                                 [((1, 1), 0), ((1, 0), (-beta).valuation)])
    on_axis = coordinate_point(system, chart, (ONE, unit(0)),
                               zero_face=Cone.from_rays([(1, 0)], 2))
    assert kapranov_membership(axis_poly, trop_point(on_axis))


# ---------------------------------------------------------------------------
# graded hypersurfaces
# ---------------------------------------------------------------------------

def test_hypersurface_validation():
    grading = Grading(AbelianGroup(0), [(), ()])
    with pytest.raises(ValueError, match="nonnegative"):
        hypersurface(grading, [((-1, 0), ONE)])
    with pytest.raises(ValueError, match="duplicate"):
        hypersurface(grading, [((1, 0), ONE), ((1, 0), T)])
    with pytest.raises(ValueError, match="nonzero"):
        hypersurface(grading, [((1, 0), scalar(0))])


def test_chart_restriction_of_a_hypersurface():
    proj, chart = free_plane()
    f = hypersurface(proj.grading,
                     [((1, 0), ONE), ((0, 1), T), ((0, 0), ONE)])
    poly = restrict_to_chart(proj, f, "1")
    assert poly.terms == (((0, 0), Fraction(0)), ((0, 1), Fraction(1)),
                          ((1, 0), Fraction(0)))
    with pytest.raises(ValueError, match="no chart"):
        restrict_to_chart(proj, f, "T1")
    line_grading = Grading(AbelianGroup(1), [(1,), (1,)])
    with pytest.raises(ValueError, match="gradings differ"):
        restrict_to_chart(proj, hypersurface(line_grading, [((1, 0), ONE)]),
                          "1")
    homogeneous = hypersurface(line_grading, [((1, 0), ONE), ((0, 1), ONE)])
    with pytest.raises(ValueError, match="does not descend"):
        restrict_to_chart(proj_system_of_fans(line_grading), homogeneous,
                          "T1")


# ---------------------------------------------------------------------------
# embedding refinement
# ---------------------------------------------------------------------------

def test_refine_embedding_degree_bookkeeping():
    flat = Grading(AbelianGroup(0), [(), ()])
    ref = refine_embedding(flat, [((1, 0), ONE), ((0, 1), ONE),
                                  ((0, 0), ONE)])
    assert ref.x_degree == ()
    assert ref.new_grading.n == 3
    assert ref.clearing == (0, 0)
    line = Grading(AbelianGroup(1), [(1,), (1,)])
    lifted = refine_embedding(line, [((1, 0), ONE), ((0, 1), ONE)],
                              clearing=(1, 0))
    assert lifted.x_degree == (1,)
    assert lifted.new_grading.degrees == ((1,), (1,), (1,))
    with pytest.raises(NotHomogeneous):
        refine_embedding(line, [((1, 0), ONE), ((0, 2), ONE)])
    with pytest.raises(ValueError, match="nonzero"):
        refine_embedding(flat, [((1, 0), scalar(0))])
    with pytest.raises(ValueError, match="clearing"):
        refine_embedding(flat, [((1, 0), ONE)], clearing=(-1, 0))


def test_new_chart_poset_restricts_to_the_old_one():
    for grading, terms in [
            (Grading(AbelianGroup(1), [(1,), (1,)]),
             [((1, 0), ONE), ((0, 1), ONE)]),
            (Grading(AbelianGroup(1), [(1,), (1,), (2,)]),
             [((1, 1, 0), ONE), ((0, 0, 1), scalar(3))]),
            (Grading(AbelianGroup(0), [(), ()]),
             [((2, 1), ONE), ((0, 0), T)])]:
        ref = refine_embedding(grading, terms)
        old = set(ref.old_proj.poset.subsets)
        new = {s for s in ref.new_proj.poset.subsets if grading.n + 1 not in s}
        assert old == new


def test_refinement_separates_the_frozen_fixture():
    proj, chart = free_plane()
    p = coordinate_point(proj.system, chart, (T, -ONE - T))
    q = coordinate_point(proj.system, chart, (T, -ONE + T))
    tp, tq = trop_point(p), trop_point(q)
    assert tp == tq
    assert tp.coords == (Fraction(1), Fraction(0))

    terms = [((1, 0), ONE), ((0, 1), ONE), ((0, 0), ONE)]
    ref = refine_embedding(proj.grading, terms)
    rp = refined_trop(ref, p)
    rq = refined_trop(ref, q)
    # on the hypersurface the new coordinate vanishes: an infinite stratum
    assert rp.stratum.cone.rays == ((0, 0, 1),)
    assert trop_eval(rp, (1, 0, 0)) == 1
    assert trop_eval(rp, (0, 1, 0)) == 0
    assert trop_eval(rp, (0, 0, 1)) is INF
    # off the hypersurface the new coordinate has valuation 1
    assert rq.stratum.cone.rays == ()
    assert rq.coords == (Fraction(1), Fraction(0), Fraction(1))
    assert rp != rq
    assert forget_refinement(ref, rp) == tp
    assert forget_refinement(ref, rq) == tq

    witness = separation_witness(proj, p, q, terms)
    assert witness.clearing == (0, 0)
    assert witness.x_degree == ()
    assert refined_trop(witness, p) != refined_trop(witness, q)


def test_witness_guards():
    proj, chart = free_plane()
    p = coordinate_point(proj.system, chart, (T, -ONE - T))
    q = coordinate_point(proj.system, chart, (T, -ONE + T))
    with pytest.raises(NotSeparating, match="valuation 0 at both"):
        separation_witness(proj, p, q, [((1, 0), ONE), ((0, 1), ONE)])
    with pytest.raises(NotSeparating):
        separation_witness(proj, p, p,
                           [((1, 0), ONE), ((0, 1), ONE), ((0, 0), ONE)])
    with pytest.raises(NotSeparating, match="zero function"):
        separation_witness(proj, p, q, [((1, 0), scalar(0))])
    line = proj_system_of_fans(Grading(AbelianGroup(1), [(1,), (1,)]))
    omega = line.system.omega()
    a = classical_point(line.system,
                        omega.class_of(line.poset.cone_of(frozenset({1})),
                                       "T1"), {(-1,): T})
    b = classical_point(line.system,
                        omega.class_of(line.poset.cone_of(frozenset({2})),
                                       "T2"), {(1,): T})
    with pytest.raises(ValueError, match="share a chart"):
        separation_witness(line, a, b, [((1, -1), ONE)])


def test_projective_refinement_and_forgetting():
    line = Grading(AbelianGroup(1), [(1,), (1,)])
    ref = refine_embedding(line, [((1, 0), ONE), ((0, 1), ONE)],
                           clearing=(1, 0))
    old = ref.old_proj
    chart = old.system.omega().class_of(old.poset.cone_of(frozenset({1})),
                                        "T1")
    # generic point [1 : t]: the new coordinate pulls back to 1 + t
    p = classical_point(old.system, chart, {(-1,): T})
    rp = refined_classical(ref, p)
    assert any(v == ONE + T for v in rp.values.values())
    assert forget_refinement(ref, refined_trop(ref, p)) == trop_point(p)
    # the point [1 : -1] kills the new coordinate entirely
    zero = classical_point(old.system, chart, {(-1,): -ONE})
    rz = refined_trop(ref, zero)
    assert rz.stratum.cone.dim == 1
    assert forget_refinement(ref, rz) == trop_point(zero)
    # strata that need the new variable have no image
    new = ref.new_proj
    deep = new.system.omega().class_of(new.poset.cone_of(frozenset({3})),
                                       "T3")
    orphan = stratum_point(new.system, deep, ())
    with pytest.raises(ValueError, match="undefined"):
        forget_refinement(ref, orphan)


def test_refined_evaluation_expands_powers():
    # deg x = 2 forces genuine multinomial expansion of x's powers
    grading = Grading(AbelianGroup(1), [(1,), (1,)])
    ref = refine_embedding(grading, [((2, 0), ONE), ((1, 1), scalar(2)),
                                     ((0, 2), ONE)], clearing=(2, 0))
    old = ref.old_proj
    chart = old.system.omega().class_of(old.poset.cone_of(frozenset({1})),
                                        "T1")
    p = classical_point(old.system, chart, {(-1,): T})
    rp = refined_classical(ref, p)
    expected = (ONE + T) * (ONE + T)
    assert any(v == expected for v in rp.values.values())
    assert forget_refinement(ref, refined_trop(ref, p)) == trop_point(p)


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def test_scalar_round_trip():
    v = (T + ONE) / (ONE - T - T)
    data = valued_scalar_to_data(v)
    assert valued_scalar_from_data(data) == v
    assert valued_scalar_from_data("3/2") == scalar(Fraction(3, 2))
    assert valued_scalar_from_data({"num": []}).is_zero
    with pytest.raises(ValueError, match="nonnegative"):
        valued_scalar_from_data({"num": [["1", -1]]})


def test_hypersurface_round_trip():
    grading = Grading(AbelianGroup(0), [(), ()])
    f = hypersurface(grading, [((1, 0), ONE), ((0, 1), T / (ONE + T))])
    data = hypersurface_to_data(f)
    back = hypersurface_from_data(grading, data)
    assert back.terms == f.terms


def test_polynomial_evaluation_matches_hand_expansion():
    proj, chart = free_plane()
    p = coordinate_point(proj.system, chart, (T, ONE + T))
    terms = [((2, 1), ONE), ((0, 0), -T)]
    direct = T * T * (ONE + T) - T
    assert evaluate_polynomial(proj, p, terms) == direct
