"""Unit-periodic cone decompositions of the totally positive chamber.

An infinite fan is never materialized: a description holds orbit data (for
real quadratic fields, the boundary polyline of the convex hull of totally
positive lattice points; otherwise explicit orbit representatives), and
finite face-closed truncations are enumerated on demand.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .errors import (
    ConeNotInFan,
    NotTotallyPositive,
    OverlappingStars,
    RayOnExistingFace,
    UnitDoesNotPreserveM,
)
from .field import FieldElement, TotallyRealField, det_scaled, is_totally_positive, is_unit
from .geometry import Cone, solve_in_basis


# ---------------------------------------------------------------------------
# quadratic hull walk


def _embedding_box_candidates(
    module_basis: Sequence[FieldElement], bounds: list[tuple[float, float]]
) -> Iterable[tuple[int, int]]:
    """Integer coordinate pairs whose embeddings can lie in the given box.

    The box is only used to bound the search; membership is re-checked
    exactly by the caller.
    """
    m1, m2 = module_basis
    F = m1.field
    e1 = [float(iv) for iv in F.embed(m1, 40)]
    e2 = [float(iv) for iv in F.embed(m2, 40)]
    det = e1[0] * e2[1] - e1[1] * e2[0]
    corners = list(itertools.product(*[(lo, hi) for lo, hi in bounds]))
    amin = amax = bmin = bmax = None
    for x, y in corners:
        a = (x * e2[1] - y * e2[0]) / det
        b = (-x * e1[1] + y * e1[0]) / det
        amin = a if amin is None else min(amin, a)
        amax = a if amax is None else max(amax, a)
        bmin = b if bmin is None else min(bmin, b)
        bmax = b if bmax is None else max(bmax, b)
    pad = 2
    for a in range(int(amin) - pad, int(amax) + pad + 1):
        for b in range(int(bmin) - pad, int(bmax) + pad + 1):
            if a or b:
                yield (a, b)


def _module_point(module_basis, a, b) -> FieldElement:
    return module_basis[0] * a + module_basis[1] * b


def _tp_points_in_box(module_basis, upper1: FieldElement, upper2: FieldElement):
    """Totally positive lattice points with embeddings below the given
    elements at places 1 and 2 respectively (exact filtering)."""
    F = module_basis[0].field
    hi1 = float(F.embed_at(upper1, 0, 20).hi) + 0.01
    hi2 = float(F.embed_at(upper2, 1, 20).hi) + 0.01
    out = []
    for a, b in _embedding_box_candidates(module_basis, [(0.0, hi1), (0.0, hi2)]):
        mu = _module_point(module_basis, a, b)
        if mu.is_zero():
            continue
        if F.sign_at(mu, 0) <= 0 or F.sign_at(mu, 1) <= 0:
            continue
        if F.sign_at(upper1 - mu, 0) < 0 or F.sign_at(upper2 - mu, 1) < 0:
            continue
        out.append(mu)
    return out


def _cross_sign(u: FieldElement, v: FieldElement) -> int:
    """Sign of the 2x2 embedding determinant of (u, v); exact."""
    d = det_scaled([u, v])
    return 0 if d.q == 0 else (1 if d.q > 0 else -1)


def _initial_support_point(module_basis) -> FieldElement:
    """A trace-minimal totally positive lattice point (a hull support point)."""
    F = module_basis[0].field
    bound = 1
    while bound < 2**20:
        big = F.from_rational(bound)
        pts = _tp_points_in_box(module_basis, big, big)
        pts = [p for p in pts if p.trace() <= bound]
        if pts:
            best = min(pts, key=lambda p: (p.trace(), p.coords))
            return best
        bound *= 2
    raise UnitDoesNotPreserveM("found no totally positive lattice point")


def _next_support_point(module_basis, P: FieldElement, eps_up: FieldElement) -> FieldElement:
    """Successor of P on the hull boundary, walking toward the second axis."""
    F = P.field
    top = eps_up * P
    candidates = []
    for mu in _tp_points_in_box(module_basis, P, top * 2):
        if mu == P:
            continue
        if F.sign_at(mu - P, 1) <= 0:  # must strictly increase place 2
            continue
        if F.sign_at(P - mu, 0) <= 0:  # and strictly decrease place 1
            continue
        candidates.append(mu)
    assert candidates, "hull walk found no candidates; box too small"

    def cmp(r, s):
        c = _cross_sign(r - P, s - P)
        if c != 0:
            return -c  # r first when cross(dr, ds) > 0 is false: see below
        # collinear: nearer point first
        ratio = solve_in_basis([s - P], r - P)
        return -1 if ratio[0] < 1 else 1

    # hull successor: every other candidate direction lies weakly on the
    # non-positive cross side; sort most-extreme first
    best = min(candidates, key=functools.cmp_to_key(lambda r, s: -_dir_order(P, r, s)))
    return best


def _dir_order(P, r, s) -> int:
    """+1 when r's direction should precede s's on the hull walk."""
    c = _cross_sign(r - P, s - P)
    if c < 0:
        return 1
    if c > 0:
        return -1
    ratio = solve_in_basis([s - P], r - P)
    return 1 if ratio[0] < 1 else -1


@dataclass(frozen=True)
class VertexSequence:
    """Periodic boundary points A_k of the hull of totally positive lattice
    points, with unit translation A_{k+m} = eps * A_k and the integer
    relations A_{k-1} + A_{k+1} = b_k A_k."""

    module_basis: tuple[FieldElement, ...]
    unit: FieldElement  # translates the sequence forward by one period
    period: int
    base_points: tuple[FieldElement, ...]
    b_cycle: tuple[int, ...]

    def point(self, k: int) -> FieldElement:
        q, r = divmod(k, self.period)
        return self.base_points[r] * self.unit**q

    def b(self, k: int) -> int:
        return self.b_cycle[k % self.period]


def build_quadratic_fan(
    module_basis: Sequence[FieldElement], unit: FieldElement
) -> tuple["FanDescription", VertexSequence]:
    """Good fan for a real quadratic field from the hull boundary of the
    totally positive points of the lattice spanned by module_basis."""
    F = module_basis[0].field
    if F.degree != 2:
        raise UnitDoesNotPreserveM("hull construction applies to quadratic fields only")
    if not is_unit(unit) or not is_totally_positive(unit):
        raise NotTotallyPositive(f"{unit} is not a totally positive unit")
    for m in module_basis:
        sol = solve_in_basis(list(module_basis), unit * m)
        if sol is None or any(c.denominator != 1 for c in sol):
            raise UnitDoesNotPreserveM(f"{unit} does not preserve the lattice")

    # walk in the direction of increasing place-2 embedding
    eps_up = unit if F.sign_at(unit - F.one, 1) > 0 else unit.inverse()
    if eps_up == F.one:
        raise UnitDoesNotPreserveM("unit acts trivially")

    A0 = _initial_support_point(module_basis)
    seq = [A0]
    target = eps_up * A0
    for _ in range(512):
        nxt = _next_support_point(module_basis, seq[-1], eps_up)
        if nxt == target:
            break
        seq.append(nxt)
    else:
        raise UnitDoesNotPreserveM("hull walk did not close up within 512 steps")

    m = len(seq)
    bs = []
    for k in range(m):
        prev = seq[k - 1] if k >= 1 else seq[m - 1] * eps_up.inverse()
        nxt = seq[k + 1] if k + 1 < m else target
        rel = solve_in_basis([seq[k]], prev + nxt)
        assert rel is not None and rel[0].denominator == 1, "hull relation failed"
        b = int(rel[0])
        assert b >= 2, f"hull relation gives b = {b} < 2"
        bs.append(b)
    assert any(b >= 3 for b in bs), "degenerate hull: all b equal 2"

    # canonical rotation: lexicographically smallest b-cycle, ties broken by
    # the starting point's coordinates
    best = min(
        range(m), key=lambda r: (tuple(bs[r:] + bs[:r]), seq[r].coords)
    )
    seq = seq[best:] + [p * eps_up for p in seq[:best]]
    bs = bs[best:] + bs[:best]

    vs = VertexSequence(
        module_basis=tuple(module_basis),
        unit=eps_up,
        period=m,
        base_points=tuple(seq),
        b_cycle=tuple(bs),
    )
    desc = FanDescription(
        kind="quadratic-auto",
        module_basis=tuple(module_basis),
        units=(eps_up,),
        vertex_sequence=vs,
    )
    return desc, vs


# ---------------------------------------------------------------------------
# fan descriptions and truncations


@dataclass(frozen=True)
class FanDescription:
    """V-periodic fan, given either by the quadratic hull data or by explicit
    cone orbit representatives."""

    kind: str  # "quadratic-auto" | "explicit"
    module_basis: tuple[FieldElement, ...]
    units: tuple[FieldElement, ...]
    vertex_sequence: VertexSequence | None = None
    orbit_cones: tuple[Cone, ...] = ()

    @property
    def field(self) -> TotallyRealField:
        return self.module_basis[0].field


class TruncatedFan:
    """Finite face-closed window of a fan."""

    def __init__(
        self,
        description: FanDescription,
        top_cones: Sequence[Cone],
        window: int,
        labels: dict | None = None,
    ):
        self.description = description
        self.field = description.field
        self.top_cones = tuple(top_cones)
        self.window = window
        self.labels = labels or {}
        self._ray_keys = {}
        for t in self.top_cones:
            for g in t.extreme_rays:
                self._ray_keys.setdefault(g.ray_key(), g)

    @property
    def module_basis(self):
        return self.description.module_basis

    def rays(self) -> list[Cone]:
        return [Cone(self.field, [g]) for _, g in sorted(self._ray_keys.items())]

    def all_cones(self) -> list[Cone]:
        """Every nonzero cone of the truncation, faces included."""
        seen: dict[frozenset, Cone] = {}
        for t in self.top_cones:
            seen.setdefault(t.key(), t)
            for f in t.proper_faces():
                seen.setdefault(f.key(), f)
        return [seen[k] for k in sorted(seen, key=lambda s: tuple(sorted(s)))]

    def contains_cone(self, sigma: Cone) -> bool:
        keys = {c.key() for c in self.all_cones()}
        return sigma.key() in keys

    def star(self, sigma: Cone) -> list[Cone]:
        """Cones of the truncation having sigma as a face (sigma included)."""
        if not self.contains_cone(sigma):
            raise ConeNotInFan(f"{sigma} is not in the truncation")
        skeys = set(g.ray_key() for g in sigma.extreme_rays)
        out = []
        for c in self.all_cones():
            ckeys = set(g.ray_key() for g in c.extreme_rays)
            if skeys <= ckeys:
                out.append(c)
        return out

    def star_tops(self, sigma: Cone) -> list[Cone]:
        n = self.field.degree
        return [c for c in self.star(sigma) if c.dim == n]

    def link(self, sigma: Cone) -> list[Cone | None]:
        """Faces of the star cones that do not contain sigma; includes the
        zero cone (reported as None)."""
        star = self.star(sigma)
        skeys = set(g.ray_key() for g in sigma.extreme_rays)
        out: dict[frozenset, Cone] = {}
        include_zero = False
        for t in star:
            faces = [t] + t.proper_faces()
            include_zero = True
            for f in faces:
                fkeys = set(g.ray_key() for g in f.extreme_rays)
                if not skeys <= fkeys:
                    out.setdefault(f.key(), f)
        result: list[Cone | None] = [None] if include_zero else []
        result.extend(out[k] for k in sorted(out, key=lambda s: tuple(sorted(s))))
        return result

    def singular_cones(self, x0: FieldElement) -> list[Cone]:
        """Minimal proper cones whose linear span contains x0."""
        n = self.field.degree
        found: list[Cone] = []
        for c in sorted(self.all_cones(), key=lambda c: c.dim):
            if c.dim >= n:
                continue
            if not c.span.contains(x0):
                continue
            ckeys = set(g.ray_key() for g in c.extreme_rays)
            if any(
                set(g.ray_key() for g in f.extreme_rays) <= ckeys for f in found
            ):
                continue
            found.append(c)
        return found

    def group_singular_terms(self, x0: FieldElement) -> list["TermGroup"]:
        """Partition of the top cones into singletons and star groups, one
        group per singular cone of x0."""
        singular = self.singular_cones(x0)
        claimed: dict[frozenset, Cone] = {}
        groups: list[TermGroup] = []
        for sigma in singular:
            members = self.star_tops(sigma)
            for t in members:
                if t.key() in claimed:
                    raise OverlappingStars(
                        "two singular cones share a top cone; refusing to guess"
                    )
                claimed[t.key()] = sigma
            groups.append(TermGroup(sigma=sigma, cones=tuple(members)))
        for t in self.top_cones:
            if t.key() not in claimed:
                groups.append(TermGroup(sigma=None, cones=(t,)))
        return groups


@dataclass(frozen=True)
class TermGroup:
    sigma: Cone | None
    cones: tuple[Cone, ...]

    @property
    def is_singleton(self) -> bool:
        return self.sigma is None


def truncate(description: FanDescription, window: int) -> TruncatedFan:
    """All cones whose orbit representatives are translated by unit powers
    in [-window, window], closed under faces."""
    assert window >= 0
    if description.kind == "quadratic-auto":
        vs = description.vertex_sequence
        m = vs.period
        tops = []
        labels = {}
        lo, hi = -window * m, window * m
        if window == 0:
            lo, hi = 0, m  # orbit representatives only
        for k in range(lo, hi):
            cone = Cone(description.field, [vs.point(k), vs.point(k + 1)])
            labels[cone.key()] = k
            tops.append(cone)
        return TruncatedFan(description, tops, window, labels)

    # explicit: translate orbit representatives by bounded unit products
    seen: dict[frozenset, Cone] = {}
    ranges = [range(-window, window + 1)] * len(description.units)
    for exponents in itertools.product(*ranges):
        translator = description.field.one
        for u, a in zip(description.units, exponents):
            if a:
                translator = translator * u**a
        for rep in description.orbit_cones:
            c = rep.mul_unit(translator)
            seen.setdefault(c.key(), c)
    tops = [seen[k] for k in sorted(seen, key=lambda s: tuple(sorted(s)))]
    return TruncatedFan(description, tops, window)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ConditionReport:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    conditions: list[ConditionReport] = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.conditions.append(ConditionReport(name, passed, detail))

    def as_dict(self):
        return {
            "passed": self.passed,
            "conditions": [
                {"name": c.name, "pass": c.passed, "detail": c.detail}
                for c in self.conditions
            ],
        }


def validate_good_fan(tf: TruncatedFan) -> ValidationReport:
    """Window-local checks of the good-fan conditions; global statements are
    only certified on the truncation."""
    report = ValidationReport()
    field = tf.field
    n = field.degree
    tops = tf.top_cones

    distinct = len({t.key() for t in tops})
    report.add(
        "locally-finite",
        distinct == len(tops),
        f"{len(tops)} top cones in window, {distinct} distinct",
    )

    simplicial = all(t.is_simplicial() and t.dim == n for t in tops)
    report.add("simplicial", simplicial, "all top cones simplicial and full-dimensional")

    rational = all(not g.is_zero() for t in tops for g in t.generators)
    report.add("F-rational", rational, "generators are field points")

    positive = True
    for t in tops:
        for g in t.extreme_rays:
            if not all(field.sign_at(g, i) > 0 for i in range(n)):
                positive = False
    report.add(
        "positive-chamber",
        positive,
        "all generating rays totally positive",
    )

    proper = True
    bad = ""
    for i, a in enumerate(tops):
        for b in tops[i + 1 :]:
            meet = a.intersection(b)
            common = set(g.ray_key() for g in a.extreme_rays) & set(
                g.ray_key() for g in b.extreme_rays
            )
            if meet is None:
                if common:
                    proper = False
                    bad = "disjoint cones share rays"
                continue
            expected = Cone(field, [field.element(k) for k in common]) if common else None
            if expected is None or meet.key() != expected.key():
                proper = False
                bad = "intersection is not a common face"
    report.add("common-faces", proper, bad or "pairwise intersections are common faces")

    invariant = True
    keys = {t.key() for t in tops}
    detail = "unit translates stay consistent"
    for u in tf.description.units:
        for t in tops:
            tu = t.mul_unit(u)
            if tu.key() in keys:
                continue
            # translate leaves the window: it must not overlap any retained cone
            for other in tops:
                meet = tu.intersection(other)
                if meet is not None and meet.dim == n:
                    invariant = False
                    detail = "unit translate overlaps the window improperly"
    report.add("unit-action", invariant, detail)

    # local coverage: internal walls shared exactly twice
    wall_count: dict[frozenset, int] = {}
    for t in tops:
        for f in t.facets():
            wall_count[f.key()] = wall_count.get(f.key(), 0) + 1
    over = [k for k, v in wall_count.items() if v > 2]
    report.add(
        "window-coverage",
        not over,
        "each wall shared by at most two cones"
        if not over
        else f"{len(over)} walls shared more than twice",
    )
    return report


# ---------------------------------------------------------------------------
# refinement by ray insertion (quadratic truncations)


def refine_insert_ray(tf: TruncatedFan, ray: FieldElement) -> TruncatedFan:
    """Split the quadratic cone containing the ray (and all its unit
    translates inside the window) in two."""
    desc = tf.description
    assert desc.kind == "quadratic-auto", "ray insertion is supported on quadratic fans"
    field = tf.field
    for key in tf._ray_keys:
        if field.element(key).ray_key() == ray.ray_key():
            raise RayOnExistingFace(f"{ray} already spans a fan ray")
    host = None
    for t in tf.top_cones:
        if t.contains_strictly(ray):
            host = t
            break
    if host is None:
        raise RayOnExistingFace(f"{ray} is not interior to any cone of the window")

    vs = desc.vertex_sequence
    k_host = tf.labels[host.key()]
    m = vs.period
    eps = vs.unit
    new_tops = []
    labels = {}
    for t in tf.top_cones:
        k = tf.labels[t.key()]
        if k % m == k_host % m:
            shift = (k - k_host) // m
            r = ray * eps**shift
            a, b = vs.point(k), vs.point(k + 1)
            c1 = Cone(field, [a, r])
            c2 = Cone(field, [r, b])
            labels[c1.key()] = (k, 0)
            labels[c2.key()] = (k, 1)
            new_tops.extend([c1, c2])
        else:
            labels[t.key()] = (k,)
            new_tops.append(t)
    return TruncatedFan(desc, new_tops, tf.window, labels)
