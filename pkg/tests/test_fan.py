import random
from fractions import Fraction

import pytest

from conesum.errors import (
    ConeNotInFan,
    NotTotallyPositive,
    RayOnExistingFace,
    UnitDoesNotPreserveM,
)
from conesum.field import (
    det_scaled,
    fundamental_unit_quadratic,
    make_field,
)
from conesum.fan import (
    FanDescription,
    TruncatedFan,
    build_quadratic_fan,
    truncate,
    validate_good_fan,
    refine_insert_ray,
)
from conesum.geometry import Cone, solve_in_basis


def sqrt3_setup():
    F = make_field([-3, 0, 1])
    M = (F.one, F.theta / 3)
    eps = fundamental_unit_quadratic(3)
    return F, M, eps


def sqrt2_setup():
    F = make_field([-2, 0, 1])
    return F, (F.one, F.theta), fundamental_unit_quadratic(2)


def sqrt5_setup():
    F = make_field([-5, 0, 1])
    phi = F.element([Fraction(1, 2), Fraction(1, 2)])
    return F, (F.one, phi), fundamental_unit_quadratic(5)


class TestQuadraticHull:
    def test_sqrt3_period_and_b_cycle(self):
        F, M, eps = sqrt3_setup()
        _, vs = build_quadratic_fan(M, eps)
        assert vs.period == 2
        assert vs.b_cycle == (2, 3)
        assert vs.base_points[0] == F.one
        assert vs.base_points[1] == F.one + F.theta / 3

    def test_sqrt2_period_and_b_cycle(self):
        F, M, eps = sqrt2_setup()
        _, vs = build_quadratic_fan(M, eps)
        assert vs.period == 2
        assert vs.b_cycle == (2, 4)

    def test_sqrt5_period_one(self):
        F, M, eps = sqrt5_setup()
        _, vs = build_quadratic_fan(M, eps)
        assert vs.period == 1
        assert vs.b_cycle == (3,)

    def test_three_term_relation_window(self):
        _, M, eps = sqrt3_setup()
        _, vs = build_quadratic_fan(M, eps)
        for k in range(-6, 7):
            lhs = vs.point(k - 1) + vs.point(k + 1)
            rel = solve_in_basis([vs.point(k)], lhs)
            assert rel is not None and rel[0] == vs.b(k)

    def test_unit_translates_sequence(self):
        _, M, eps = sqrt3_setup()
        _, vs = build_quadratic_fan(M, eps)
        for k in range(-4, 5):
            assert vs.point(k + vs.period) == vs.point(k) * vs.unit

    def test_points_are_primitive(self):
        from conesum.geometry import primitive_generator

        _, M, eps = sqrt3_setup()
        _, vs = build_quadratic_fan(M, eps)
        for k in range(-4, 5):
            p = vs.point(k)
            assert primitive_generator(p, list(M)) == p

    def test_consecutive_pairs_positively_oriented(self):
        _, M, eps = sqrt3_setup()
        _, vs = build_quadratic_fan(M, eps)
        for k in range(-5, 6):
            assert det_scaled([vs.point(k), vs.point(k + 1)]).q > 0

    def test_hull_property_no_point_below_polyline(self):
        # exact oracle: every totally positive lattice point lies weakly on
        # the far side of every boundary edge within the window
        from conesum.fan import _tp_points_in_box, _cross_sign

        F, M, eps = sqrt3_setup()
        _, vs = build_quadratic_fan(M, eps)
        hi = vs.point(6)
        lo = vs.point(-6)
        pts = _tp_points_in_box(M, lo * 2, hi * 2)
        for k in range(-4, 5):
            a, b = vs.point(k), vs.point(k + 1)
            step = b - a
            for mu in pts:
                if mu == a or mu == b:
                    continue
                assert _cross_sign(step, mu - a) <= 0

    def test_unit_must_preserve_lattice(self):
        F, M, eps = sqrt3_setup()
        bad_basis = (F.one, F.theta / 5)
        with pytest.raises(UnitDoesNotPreserveM):
            build_quadratic_fan(bad_basis, eps)

    def test_unit_must_be_totally_positive(self):
        F, M, _ = sqrt3_setup()
        with pytest.raises(NotTotallyPositive):
            build_quadratic_fan(M, F.theta)  # not a TP unit


class TestTruncate:
    def test_window_one_has_two_periods_of_cones(self):
        _, M, eps = sqrt3_setup()
        desc, vs = build_quadratic_fan(M, eps)
        tf = truncate(desc, 1)
        assert len(tf.top_cones) == 4 * vs.period // 2  # k in [-m, m)
        assert sorted(tf.labels.values()) == list(range(-vs.period, vs.period))

    def test_window_zero_orbit_reps(self):
        _, M, eps = sqrt3_setup()
        desc, vs = build_quadratic_fan(M, eps)
        tf = truncate(desc, 0)
        assert sorted(tf.labels.values()) == list(range(vs.period))

    def test_truncations_nest(self):
        _, M, eps = sqrt3_setup()
        desc, _ = build_quadratic_fan(M, eps)
        small = {t.key() for t in truncate(desc, 1).top_cones}
        large = {t.key() for t in truncate(desc, 2).top_cones}
        assert small < large

    def test_explicit_description_matches_auto(self):
        F, M, eps = sqrt3_setup()
        desc, vs = build_quadratic_fan(M, eps)
        reps = [
            Cone(F, [vs.point(k), vs.point(k + 1)]) for k in range(vs.period)
        ]
        explicit = FanDescription(
            kind="explicit", module_basis=M, units=(vs.unit,), orbit_cones=tuple(reps)
        )
        auto_keys = {t.key() for t in truncate(desc, 2).top_cones}
        expl_keys = {t.key() for t in truncate(explicit, 2).top_cones}
        assert auto_keys <= expl_keys  # explicit window translates both reps


class TestValidation:
    def test_auto_fan_passes(self):
        for setup in (sqrt3_setup, sqrt2_setup, sqrt5_setup):
            _, M, eps = setup()
            desc, _ = build_quadratic_fan(M, eps)
            report = validate_good_fan(truncate(desc, 2))
            assert report.passed, report.as_dict()

    def test_overlapping_cones_fail(self):
        F, M, eps = sqrt3_setup()
        a = Cone(F, [F.element([1, 0]), F.element([1, 1])])
        b = Cone(F, [F.element([2, 1]), F.element([0, 1])])  # overlaps a
        desc = FanDescription(
            kind="explicit", module_basis=M, units=(), orbit_cones=(a, b)
        )
        report = validate_good_fan(truncate(desc, 0))
        names = {c.name: c.passed for c in report.conditions}
        assert not names["common-faces"]

    def test_negative_generator_fails_chamber_check(self):
        F, M, eps = sqrt3_setup()
        bad = Cone(F, [F.element([1, 0]), F.theta])  # theta is not TP
        desc = FanDescription(
            kind="explicit", module_basis=M, units=(), orbit_cones=(bad,)
        )
        report = validate_good_fan(truncate(desc, 0))
        names = {c.name: c.passed for c in report.conditions}
        assert not names["positive-chamber"]


class TestStarLink:
    def test_star_of_ray(self):
        _, M, eps = sqrt3_setup()
        desc, vs = build_quadratic_fan(M, eps)
        tf = truncate(desc, 2)
        F = tf.field
        ray = Cone(F, [vs.point(1)])
        star = tf.star(ray)
        dims = sorted(c.dim for c in star)
        assert dims == [1, 2, 2]  # the ray and its two flanking cones

    def test_star_of_top_cone_is_itself(self):
        _, M, eps = sqrt3_setup()
        desc, _ = build_quadratic_fan(M, eps)
        tf = truncate(desc, 1)
        t = tf.top_cones[1]
        assert tf.star_tops(t) == [t]

    def test_link_of_ray(self):
        _, M, eps = sqrt3_setup()
        desc, vs = build_quadratic_fan(M, eps)
        tf = truncate(desc, 2)
        F = tf.field
        ray = Cone(F, [vs.point(0)])
        link = tf.link(ray)
        assert None in link  # the zero cone
        ray_keys = {
            c.key() for c in link if c is not None and c.dim == 1
        }
        expected = {
            Cone(F, [vs.point(-1)]).key(),
            Cone(F, [vs.point(1)]).key(),
        }
        assert ray_keys == expected
        assert all(c is None or c.dim <= 1 for c in link)

    def test_cone_not_in_fan(self):
        F, M, eps = sqrt3_setup()
        desc, _ = build_quadratic_fan(M, eps)
        tf = truncate(desc, 1)
        with pytest.raises(ConeNotInFan):
            tf.star(Cone(F, [F.element([7, 1])]))


class TestSingularCones:
    def test_generic_interior_point(self):
        F, M, eps = sqrt3_setup()
        desc, _ = build_quadratic_fan(M, eps)
        tf = truncate(desc, 2)
        assert tf.singular_cones(F.element([4, 1])) == []

    def test_point_on_ray(self):
        F, M, eps = sqrt3_setup()
        desc, vs = build_quadratic_fan(M, eps)
        tf = truncate(desc, 2)
        x0 = vs.point(1) * 3
        sing = tf.singular_cones(x0)
        assert len(sing) == 1
        assert sing[0].key() == Cone(F, [vs.point(1)]).key()

    def test_minimality(self):
        F, M, eps = sqrt3_setup()
        desc, vs = build_quadratic_fan(M, eps)
        tf = truncate(desc, 2)
        x0 = vs.point(0) * 2
        for sigma in tf.singular_cones(x0):
            for face in sigma.proper_faces():
                assert not face.span.contains(x0)


class TestGrouping:
    def test_generic_all_singletons(self):
        F, M, eps = sqrt3_setup()
        desc, _ = build_quadratic_fan(M, eps)
        tf = truncate(desc, 2)
        groups = tf.group_singular_terms(F.element([4, 1]))
        assert all(g.is_singleton for g in groups)
        assert sum(len(g.cones) for g in groups) == len(tf.top_cones)

    def test_ray_point_groups_two_cones(self):
        F, M, eps = sqrt3_setup()
        desc, vs = build_quadratic_fan(M, eps)
        tf = truncate(desc, 2)
        x0 = vs.point(1) * 3
        groups = tf.group_singular_terms(x0)
        starred = [g for g in groups if not g.is_singleton]
        assert len(starred) == 1
        assert len(starred[0].cones) == 2
        assert sum(len(g.cones) for g in groups) == len(tf.top_cones)

    def test_each_top_cone_exactly_once(self):
        F, M, eps = sqrt2_setup()
        desc, vs = build_quadratic_fan(M, eps)
        tf = truncate(desc, 3)
        for x0 in (F.element([4, 1]), vs.point(0) * 2, vs.point(-1) * 5):
            groups = tf.group_singular_terms(x0)
            keys = [t.key() for g in groups for t in g.cones]
            assert len(keys) == len(set(keys)) == len(tf.top_cones)


class TestRefinement:
    def test_split_cone_count_and_validity(self):
        _, M, eps = sqrt3_setup()
        desc, vs = build_quadratic_fan(M, eps)
        tf = truncate(desc, 2)
        ray = tf.top_cones[0].interior_point()
        refined = refine_insert_ray(tf, ray)
        # one orbit class split in two across the whole window
        assert len(refined.top_cones) == len(tf.top_cones) + 2 * tf.window
        assert validate_good_fan(refined).passed

    def test_ray_on_existing_face_rejected(self):
        _, M, eps = sqrt3_setup()
        desc, vs = build_quadratic_fan(M, eps)
        tf = truncate(desc, 1)
        with pytest.raises(RayOnExistingFace):
            refine_insert_ray(tf, vs.point(0))

    def test_exterior_ray_rejected(self):
        F, M, eps = sqrt3_setup()
        desc, _ = build_quadratic_fan(M, eps)
        tf = truncate(desc, 1)
        with pytest.raises(RayOnExistingFace):
            refine_insert_ray(tf, F.element([1, -1]))  # outside the window
