import random
from fractions import Fraction

import pytest

from conesum.errors import (
    DegenerateVertex,
    NotFullDim,
    PointNotInterior,
    RayNotRational,
)
from conesum.field import make_field, trace_pairing
from conesum.geometry import (
    Cone,
    LinearSubspace,
    ProjPolyhedron,
    dual_cone,
    primitive_generator,
    solve_in_basis,
)

QUADRATIC = [-3, 0, 1]
CUBIC = [1, -2, -1, 1]
QUARTIC = [1, 1, -4, 0, 1]


def elem(F, *coords):
    return F.element(list(coords))


def std_basis(F):
    n = F.degree
    return [F.element([1 if i == j else 0 for j in range(n)]) for i in range(n)]


def random_salient_cone(F, rng, nrays=None):
    """Perturbed orthant: always salient and full-dimensional."""
    n = F.degree
    basis = std_basis(F)
    nrays = nrays or n
    gens = []
    for i in range(nrays):
        base = basis[i % n]
        wobble = F.element(
            [Fraction(rng.randint(0, 3), rng.randint(4, 9)) for _ in range(n)]
        )
        gens.append(base * rng.randint(2, 5) + wobble)
    return Cone(F, gens)


class TestLinearSubspace:
    def test_canonical_key_equality(self):
        F = make_field(QUADRATIC)
        a = LinearSubspace.from_points(F, [elem(F, 1, 1)])
        b = LinearSubspace.from_points(F, [elem(F, 2, 2)])
        assert a == b and hash(a) == hash(b)

    def test_membership(self):
        F = make_field(CUBIC)
        s = LinearSubspace.from_points(F, [elem(F, 1, 0, 0), elem(F, 0, 1, 0)])
        assert s.contains(elem(F, 3, -2, 0))
        assert not s.contains(elem(F, 0, 0, 1))

    def test_orthogonal_complement_is_trace_orthogonal(self):
        F = make_field(CUBIC)
        s = LinearSubspace.from_points(F, [elem(F, 1, 2, 0), elem(F, 0, 1, 1)])
        comp = s.orthogonal_complement()
        assert comp.dim == 1
        w = comp.basis_elements()[0]
        for b in s.basis_elements():
            assert trace_pairing(w, b) == 0

    def test_intersection(self):
        F = make_field(CUBIC)
        s1 = LinearSubspace.from_points(F, [elem(F, 1, 0, 0), elem(F, 0, 1, 0)])
        s2 = LinearSubspace.from_points(F, [elem(F, 1, 0, 0), elem(F, 0, 0, 1)])
        meet = s1.intersection(s2)
        assert meet.dim == 1
        assert meet.contains(elem(F, 5, 0, 0))


class TestDualCone:
    def test_orthant_selfdual_up_to_trace_form(self):
        # the dual of the coordinate orthant consists of the trace-dual rays
        F = make_field(CUBIC)
        orthant = Cone(F, std_basis(F))
        dual = dual_cone(orthant)
        assert dual.dim == 3
        assert dual_cone(dual) == orthant

    def test_2d_example_standard_pairing(self):
        # over a field, normals are trace-duals; verify the defining property
        F = make_field(QUADRATIC)
        c = Cone(F, [elem(F, 1, 0), elem(F, 1, 1)])
        d = dual_cone(c)
        for u in d.generators:
            for g in c.generators:
                assert trace_pairing(u, g) >= 0
        assert dual_cone(d) == c

    def test_biduality_200_random(self):
        rng = random.Random(42)
        cones = 0
        for poly in (QUADRATIC, CUBIC, QUARTIC):
            F = make_field(poly)
            for _ in range(67):
                c = random_salient_cone(F, rng)
                assert dual_cone(dual_cone(c)) == c
                cones += 1
        assert cones >= 200

    def test_not_full_dim(self):
        F = make_field(CUBIC)
        c = Cone(F, [elem(F, 1, 0, 0), elem(F, 0, 1, 0)])
        with pytest.raises(NotFullDim):
            dual_cone(c)


class TestFaces:
    def test_simplex_has_three_edges(self):
        F = make_field(CUBIC)
        K = ProjPolyhedron.from_points(F, std_basis(F))
        assert len(K.facets()) == 3
        assert all(span.dim == 2 for _, span in K.facets())

    def test_square_has_four_facets(self):
        F = make_field(CUBIC)
        pts = [
            elem(F, 1, 0, 1),
            elem(F, -1, 0, 1),
            elem(F, 0, 1, 1),
            elem(F, 0, -1, 1),
        ]
        K = ProjPolyhedron.from_points(F, pts)
        assert len(K.vertices) == 4
        assert len(K.facets()) == 4

    def test_cube_has_six_facets(self):
        F = make_field(QUARTIC)
        pts = [elem(F, sx, sy, sz, 1) for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)]
        K = ProjPolyhedron.from_points(F, pts)
        assert len(K.vertices) == 8
        assert len(K.facets()) == 6
        counts = {d: len(v) for d, v in K.faces_by_dim().items()}
        assert counts[0] == 8 and counts[1] == 12 and counts[2] == 6

    def test_octahedron(self):
        F = make_field(QUARTIC)
        pts = []
        for i in range(3):
            for s in (1, -1):
                coords = [0, 0, 0, 1]
                coords[i] = s
                pts.append(F.element(coords))
        K = ProjPolyhedron.from_points(F, pts)
        assert len(K.vertices) == 6
        assert len(K.facets()) == 8


class TestDualPolyhedron:
    def test_face_lattice_reverses(self):
        F = make_field(QUARTIC)
        pts = [elem(F, sx, sy, sz, 1) for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)]
        K = ProjPolyhedron.from_points(F, pts)
        Kd = K.dual()
        c1 = {d: len(v) for d, v in K.faces_by_dim().items()}
        c2 = {d: len(v) for d, v in Kd.faces_by_dim().items()}
        assert c2[0] == c1[2] and c2[1] == c1[1] and c2[2] == c1[0]

    def test_vertices_match_facets(self):
        F = make_field(CUBIC)
        pts = [elem(F, 1, 0, 1), elem(F, -1, 0, 1), elem(F, 0, 1, 1), elem(F, 0, -1, 1)]
        K = ProjPolyhedron.from_points(F, pts)
        assert len(K.dual().vertices) == len(K.facets())

    def test_double_dual(self):
        F = make_field(CUBIC)
        pts = [elem(F, 1, 0, 1), elem(F, -1, 0, 1), elem(F, 0, 1, 1), elem(F, 0, -1, 1)]
        K = ProjPolyhedron.from_points(F, pts)
        assert K.dual().dual() == K


class TestVertexHyperplane:
    def test_simplex_vertex(self):
        F = make_field(CUBIC)
        K = ProjPolyhedron.from_points(F, std_basis(F))
        v = K.vertices[0]
        H = K.vertex_hyperplane(v)
        assert H.dim == 2
        assert not H.contains(v)

    def test_square_vertex_through_neighbors_midpoints(self):
        F = make_field(CUBIC)
        pts = [elem(F, 1, 0, 1), elem(F, -1, 0, 1), elem(F, 0, 1, 1), elem(F, 0, -1, 1)]
        K = ProjPolyhedron.from_points(F, pts)
        H = K.vertex_hyperplane(K.vertices[0])
        assert H.dim == 2

    def test_interior_point_rejected(self):
        F = make_field(CUBIC)
        K = ProjPolyhedron.from_points(F, std_basis(F))
        with pytest.raises(DegenerateVertex):
            K.vertex_hyperplane(elem(F, 1, 1, 1))


class TestConeOverFace:
    def test_simplex_stellar_decomposition(self):
        F = make_field(CUBIC)
        K = ProjPolyhedron.from_points(F, std_basis(F))
        u = K.cone.interior_point()
        pieces = [K.cone_over_face(u, f) for f, _ in K.facets()]
        assert len(pieces) == 3
        for piece in pieces:
            assert piece.cone.is_simplicial()
            for g in piece.cone.generators:
                assert K.contains(g)

    def test_square_center_gives_four_triangles(self):
        F = make_field(CUBIC)
        pts = [elem(F, 1, 0, 1), elem(F, -1, 0, 1), elem(F, 0, 1, 1), elem(F, 0, -1, 1)]
        K = ProjPolyhedron.from_points(F, pts)
        u = elem(F, 0, 0, 1)
        pieces = [K.cone_over_face(u, f) for f, _ in K.facets()]
        assert len(pieces) == 4
        assert all(p.cone.is_simplicial() for p in pieces)
        # pieces pairwise meet in common faces and tile K
        for i in range(4):
            for j in range(i + 1, 4):
                meet = pieces[i].cone.intersection(pieces[j].cone)
                if meet is not None:
                    assert all(pieces[i].cone.contains(g) for g in meet.generators)
                    assert meet.dim < 3

    def test_point_not_interior(self):
        F = make_field(CUBIC)
        K = ProjPolyhedron.from_points(F, std_basis(F))
        facet = K.facets()[0][0]
        with pytest.raises(PointNotInterior):
            K.cone_over_face(elem(F, 1, 0, 0), facet)


class TestPrimitiveGenerator:
    def test_integer_lattice(self):
        F = make_field(QUADRATIC)
        basis = std_basis(F)
        p = primitive_generator(elem(F, 2, 4), basis)
        assert p.coords == (Fraction(1), Fraction(2))

    def test_scaled_lattice(self):
        # lattice Z + Z*(theta/3) in Q(sqrt 3); ray through 2 + 2*theta/3
        F = make_field(QUADRATIC)
        basis = [F.one, F.theta / 3]
        ray = elem(F, 2, Fraction(2, 3))
        p = primitive_generator(ray, basis)
        assert p == F.one + F.theta / 3
        coeffs = solve_in_basis(basis, p)
        assert coeffs == (1, 1)

    def test_ray_outside_module_span(self):
        F = make_field(QUADRATIC)
        with pytest.raises(RayNotRational):
            primitive_generator(F.theta, [F.one])  # rank-1 module misses theta

    def test_gcd_one_in_module_coords(self):
        from math import gcd

        rng = random.Random(5)
        F = make_field(CUBIC)
        basis = [F.one, F.theta / 2, F.theta * F.theta / 5]
        for _ in range(20):
            scale = Fraction(rng.randint(1, 9), rng.randint(1, 9))
            coeffs = [rng.randint(-6, 6) for _ in range(3)]
            ray = F.zero
            for c, b in zip(coeffs, basis):
                ray = ray + b * (c * scale)
            if ray.is_zero():
                continue
            p = primitive_generator(ray, basis)
            sol = solve_in_basis(basis, p)
            assert all(c.denominator == 1 for c in sol)
            gg = 0
            for c in sol:
                gg = gcd(gg, abs(int(c)))
            assert gg == 1
            # p lies on the same ray as the input
            ratio = solve_in_basis([ray], p)
            assert ratio is not None and ratio[0] > 0
