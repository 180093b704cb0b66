"""Admissible unit sets and the convex exhaustion of the positive chamber.

All log-space quantities are handled as certified intervals over a precision
schedule: a comparison is reported only when the intervals separate, and
anything that stays undecided raises PrecisionExhausted instead of guessing.
Place comparisons of a single unit are decided exactly through its minimal
polynomial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .errors import (
    DegreeTooSmall,
    PrecisionExhausted,
    SingularMatrix,
    WindowTooSmall,
)
from .field import (
    FieldElement,
    UnitGroupData,
    interval_poly_eval,
    is_totally_positive,
    is_unit,
    isolate_real_roots,
    limit_pair,
    min_poly_of,
)

PREC_SCHEDULE = (64, 128, 256, 512, 1024)


def _iv_from_fraction(q: Fraction):
    return mpmath.iv.mpf(q.numerator) / q.denominator


def _embedding_iv(x: FieldElement, place: int, prec: int):
    """Certified mpmath interval for one real embedding."""
    riv = x.field.embed_at(x, place, prec)
    lo = _iv_from_fraction(riv.lo)
    hi = _iv_from_fraction(riv.hi)
    return mpmath.iv.mpf([lo.a, hi.b])


def _embedding_iv_positive(x: FieldElement, place: int, prec: int):
    """Interval for a positive embedding with certified relative width.

    Needed wherever logs or quotients of values with a huge dynamic range
    are taken (high unit powers)."""
    k = prec
    while True:
        riv = x.field.embed_at(x, place, k)
        if riv.lo > 0 and riv.width * 2**prec <= riv.lo:
            lo = _iv_from_fraction(riv.lo)
            hi = _iv_from_fraction(riv.hi)
            return mpmath.iv.mpf([lo.a, hi.b])
        if riv.hi < 0:
            raise PrecisionExhausted("expected a positive embedding")
        k *= 2
        if k > 1 << 16:
            raise PrecisionExhausted("relative refinement exhausted")


def _log_embedding_iv(x: FieldElement, place: int, prec: int):
    return mpmath.iv.log(_embedding_iv(x, place, prec))


def _iv_sign(iv) -> int | None:
    if iv.a > 0:
        return 1
    if iv.b < 0:
        return -1
    return None


class LogLattice:
    """Log-embedding image of a finite-index totally positive unit group.

    Exponent vectors are exact; the log vectors are certified intervals at
    any requested precision.
    """

    def __init__(self, units: UnitGroupData):
        self.units = units
        self.field = units.field

    def log_vector(self, exponents: Sequence[int], prec: int):
        eps = self.units.power_product(exponents)
        return [_log_embedding_iv(eps, i, prec) for i in range(self.field.degree)]

    def regulator_nonzero(self) -> bool:
        """Certify that the generator log vectors are linearly independent
        (any maximal minor of the log matrix is nonzero)."""
        gens = self.units.generators
        r = len(gens)
        for prec in PREC_SCHEDULE:
            with mpmath.workprec(prec):
                mpmath.iv.prec = prec
                rows = [
                    [_log_embedding_iv(g, p, prec) for p in range(r)] for g in gens
                ]
                det = _iv_det(rows)
                if _iv_sign(det) is not None:
                    return True
        raise PrecisionExhausted("cannot certify a nonzero regulator")


def _iv_det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = mpmath.iv.mpf(0)
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * _iv_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


# ---------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class AdmissibleCandidate:
    """Units indexed by place with the ratio bounds they were searched for."""

    units: tuple[FieldElement, ...]
    a: Fraction
    b: Fraction

    def __post_init__(self):
        for u in self.units:
            assert is_unit(u) and is_totally_positive(u)


@dataclass
class ConditionResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class AdmissibilityReport:
    conditions: list[ConditionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def as_dict(self):
        return {
            "passed": self.passed,
            "conditions": [
                {"name": c.name, "pass": c.passed, "detail": c.detail}
                for c in self.conditions
            ],
        }


def compare_places(x: FieldElement, p: int, q: int) -> int:
    """Exact comparison of two real embeddings of the same element.

    Equal embeddings correspond to a common root of the minimal polynomial,
    so the tie case is decided exactly rather than numerically.
    """
    if p == q:
        return 0
    field = x.field
    mp = min_poly_of(x)
    if len(mp) == 2:
        return 0  # rational element: all embeddings coincide
    root_ivs = isolate_real_roots(mp)

    def root_index(place):
        depth = 0
        while True:
            iv = interval_poly_eval(x.coords, field._root_interval(place, depth))
            hits = [
                k
                for k, r in enumerate(root_ivs)
                if not (iv.hi < r.lo or r.hi < iv.lo)
            ]
            if len(hits) == 1:
                return hits[0]
            depth += 1

    rp, rq = root_index(p), root_index(q)
    return (rp > rq) - (rp < rq)


def _ratio_vs_rational(x: FieldElement, p: int, q: int, bound: Fraction) -> int:
    """Certified sign of x^(p) / x^(q) - bound for a totally positive x."""
    for prec in PREC_SCHEDULE:
        a = x.field.embed_at(x, p, prec)
        b = x.field.embed_at(x, q, prec)
        # compare a against bound * b with exact rational endpoints
        lo = a.lo - bound * b.hi
        hi = a.hi - bound * b.lo
        if lo > 0:
            return 1
        if hi < 0:
            return -1
    raise PrecisionExhausted(
        f"ratio of places {p+1}/{q+1} is numerically indistinguishable from {bound}"
    )


def unit_region_conditions(
    eps: FieldElement, i: int, a: Fraction, b: Fraction, short_circuit: bool = False
) -> tuple[bool, bool, bool, bool]:
    """The four bound conditions placing a unit in the i-th search region
    (places are 0-indexed here)."""
    field = eps.field
    n = field.degree
    others = [(i + k) % n for k in range(1, n)]

    below_one = field.sign_at(eps - field.one, i) < 0
    above_one = all(field.sign_at(eps - field.one, j) > 0 for j in others)
    c1 = below_one and above_one
    if short_circuit and not c1:
        return c1, False, False, False

    chain = all(
        compare_places(eps, others[k], others[k + 1]) > 0
        for k in range(len(others) - 1)
    )
    if short_circuit and not chain:
        return c1, chain, False, False

    c3 = True
    for j, k in itertools.permutations(others, 2):
        if _ratio_vs_rational(eps, j, k, a) >= 0:
            c3 = False
            break
    if short_circuit and not c3:
        return c1, chain, c3, False

    c4 = all(_ratio_vs_rational(eps, j, i, b) > 0 for j in others)
    return c1, chain, c3, c4


def check_admissible_bounds(cand: AdmissibleCandidate) -> AdmissibilityReport:
    """Per-unit verification of the sufficient ratio-bound conditions."""
    conditions = []
    for idx, eps in enumerate(cand.units):
        c1, c2, c3, c4 = unit_region_conditions(eps, idx, cand.a, cand.b)
        conditions.append(
            ConditionResult(f"unit{idx+1}-below-above-one", c1)
        )
        conditions.append(ConditionResult(f"unit{idx+1}-chain", c2))
        conditions.append(
            ConditionResult(f"unit{idx+1}-ratios-within-a", c3, f"a={cand.a}")
        )
        conditions.append(
            ConditionResult(f"unit{idx+1}-ratio-exceeds-b", c4, f"b={cand.b}")
        )
    return AdmissibilityReport(conditions)


def check_admissible(units: Sequence[FieldElement]) -> AdmissibilityReport:
    """Direct verification of the limit-pair admissibility conditions."""
    field = units[0].field
    n = field.degree
    if n < 3:
        raise DegreeTooSmall("admissibility requires degree at least 3")
    conditions = []

    for idx, eps in enumerate(units):
        distinct = all(
            compare_places(eps, p, q) != 0 for p in range(n) for q in range(p + 1, n)
        )
        conditions.append(ConditionResult(f"unit{idx+1}-distinct-coordinates", distinct))

    for idx, eps in enumerate(units):
        mins, maxs = limit_pair(eps)
        want = (frozenset({idx + 1}), frozenset({(idx + 1) % n + 1}))
        conditions.append(
            ConditionResult(
                f"unit{idx+1}-limit-pair",
                (mins, maxs) == want,
                f"got ({sorted(mins)},{sorted(maxs)})",
            )
        )

    for i, j in itertools.permutations(range(len(units)), 2):
        ratio = units[i] * units[j].inverse()
        if ratio == field.one:
            conditions.append(
                ConditionResult(f"ratio-{i+1}-{j+1}-limit-pair", False, "equal units")
            )
            continue
        mins, maxs = limit_pair(ratio)
        want = (frozenset({i + 1}), frozenset({j + 1}))
        conditions.append(
            ConditionResult(
                f"ratio-{i+1}-{j+1}-limit-pair",
                (mins, maxs) == want,
                f"got ({sorted(mins)},{sorted(maxs)})",
            )
        )

    for subset in itertools.combinations(range(len(units)), n - 1):
        try:
            ok = LogLattice(
                UnitGroupData(tuple(units[i] for i in subset))
            ).regulator_nonzero()
        except PrecisionExhausted:
            ok = False
        conditions.append(
            ConditionResult(
                "independence-" + "".join(str(i + 1) for i in subset), ok
            )
        )
    return AdmissibilityReport(conditions)


def search_admissible(
    V: UnitGroupData, a: Fraction, b: Fraction, radius: int
) -> AdmissibleCandidate | None:
    """Enumerate exponent boxes of the unit lattice and return one unit per
    search region, or None when the radius is too small."""
    field = V.field
    n = field.degree
    if n < 3:
        raise DegreeTooSmall("the search requires degree at least 3")
    a, b = Fraction(a), Fraction(b)
    assert b > a > 1, "bounds must satisfy b > a > 1"

    found: dict[int, FieldElement] = {}
    rank = V.rank
    exponents = sorted(
        itertools.product(range(-radius, radius + 1), repeat=rank),
        key=lambda e: (max(abs(v) for v in e) if e else 0, e),
    )
    for exp in exponents:
        if all(v == 0 for v in exp):
            continue
        if len(found) == n:
            break
        eps = V.power_product(exp)
        for i in range(n):
            if i in found:
                continue
            try:
                if all(unit_region_conditions(eps, i, a, b, short_circuit=True)):
                    found[i] = eps
                    break
            except PrecisionExhausted:
                continue
    if len(found) < n:
        return None
    return AdmissibleCandidate(
        units=tuple(found[i] for i in range(n)), a=a, b=b
    )


# ---------------------------------------------------------------------------
# hull charts of the exhaustion sets


@dataclass
class HullChart:
    """Chart of the projected unit sublattice with exponent-sum zero.

    The chart drops the omitted place j; the boundary surface through the
    charted points is prod z_i^(a_i) = 1 with certified-positive exponents.
    """

    index_set: tuple[int, ...]  # places kept (0-indexed)
    omitted: int
    exponents: tuple[tuple[float, float], ...]  # certified (lo, hi) per a_i
    window: int
    points: dict[tuple[int, ...], tuple]  # exponent vector -> interval coords
    units: tuple[FieldElement, ...]
    prec: int

    def exponent_intervals(self):
        return self.exponents


def _chart_point(x: FieldElement, omitted: int, prec: int):
    field = x.field
    n = field.degree
    denom = _embedding_iv_positive(x, omitted, prec)
    return tuple(
        _embedding_iv_positive(x, p, prec) / denom
        for p in range(n)
        if p != omitted
    )


def _iv_solve(rows, rhs):
    """Interval Gaussian elimination; raises on a pivot containing zero."""
    m = [list(r) + [v] for r, v in zip(rows, rhs)]
    size = len(m)
    for c in range(size):
        pivot = None
        for i in range(c, size):
            if _iv_sign(m[i][c]) is not None:
                pivot = i
                break
        if pivot is None:
            raise SingularMatrix("interval pivot contains zero")
        m[c], m[pivot] = m[pivot], m[c]
        for i in range(size):
            if i != c:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [m[i][size] / m[i][i] for i in range(size)]


_chart_cache: dict[tuple, HullChart] = {}


def hull_chart(
    cand: AdmissibleCandidate, index_set: Iterable[int], window: int
) -> HullChart:
    """Chart the exponent-sum-zero sublattice for the given (n-1)-subset of
    unit indices (0-indexed), omitting the complementary place."""
    cache_key = (
        cand.units[0].field.min_poly,
        tuple(u.coords for u in cand.units),
        tuple(sorted(index_set)),
        window,
    )
    cached = _chart_cache.get(cache_key)
    if cached is not None:
        return cached
    units = cand.units
    field = units[0].field
    n = field.degree
    I = tuple(sorted(index_set))
    assert len(I) == n - 1
    (j,) = set(range(n)) - set(I)

    last_exc: Exception | None = None
    for prec in PREC_SCHEDULE:
        mpmath.iv.prec = prec
        try:
            # row p, column q: log of the chart coordinate p of eps_q; the
            # positive normalization of the boundary exponents needs the
            # omitted-place log first in the difference
            places = [p for p in range(n) if p != j]
            rows = []
            for p in places:
                row = []
                for q in I:
                    row.append(
                        _log_embedding_iv(units[q], j, prec)
                        - _log_embedding_iv(units[q], p, prec)
                    )
                rows.append(row)
            ones = [mpmath.iv.mpf(1)] * (n - 1)
            # solve a E = (1,...,1): transpose the system
            a_vec = _iv_solve([list(col) for col in zip(*rows)], ones)
            if not all(_iv_sign(ai) == 1 for ai in a_vec):
                raise PrecisionExhausted("exponents not certified positive")

            points = {}
            for exp in _zero_sum_exponents(len(I), window):
                x = field.one
                for q, e in zip(I, exp):
                    if e:
                        x = x * units[q] ** e
                points[exp] = _chart_point(x, j, prec)

            # every charted point lies on the boundary surface
            for exp, z in points.items():
                total = mpmath.iv.mpf(0)
                for ai, zi in zip(a_vec, z):
                    total = total + ai * mpmath.iv.log(zi)
                if 0 not in total:
                    raise PrecisionExhausted(
                        f"charted point {exp} is off the boundary surface"
                    )
            chart = HullChart(
                index_set=I,
                omitted=j,
                exponents=tuple((float(ai.a), float(ai.b)) for ai in a_vec),
                window=window,
                points=points,
                units=tuple(units),
                prec=prec,
            )
            _chart_cache[cache_key] = chart
            return chart
        except (PrecisionExhausted, SingularMatrix) as exc:
            last_exc = exc
            continue
    if isinstance(last_exc, SingularMatrix):
        raise last_exc
    raise PrecisionExhausted(f"hull chart failed at all precisions: {last_exc}")


def _zero_sum_exponents(r: int, window: int):
    """Exponent vectors with entries in [-window, window] summing to zero."""
    out = []
    for exp in itertools.product(range(-window, window + 1), repeat=r):
        if sum(exp) == 0:
            out.append(exp)
    return sorted(out)


def verify_vertices(chart: HullChart) -> bool:
    """Certify that every charted point is a vertex of the convex hull of
    the charted points, via an explicit separating functional.

    The candidate functional at P is the gradient of sum a_i log z_i; the
    certificate itself is a plain linear separation, checked in intervals.
    """
    pts = chart.points
    keys = sorted(pts)
    a_vec = chart.exponents
    for key in keys:
        P = pts[key]
        grad = []
        for (alo, ahi), zi in zip(a_vec, P):
            ai = mpmath.iv.mpf([alo, ahi])
            grad.append(ai / zi)
        for other in keys:
            if other == key:
                continue
            Q = pts[other]
            total = mpmath.iv.mpf(0)
            for g, qi, pi in zip(grad, Q, P):
                total = total + g * (qi - pi)
            s = _iv_sign(total)
            if s is None:
                raise PrecisionExhausted(
                    f"cannot certify separation of {key} from {other}"
                )
            if s <= 0:
                return False
    return True


# ---------------------------------------------------------------------------
# membership in the exhaustion sets


def exhaustion_contains(
    cand: AdmissibleCandidate, N: int, x: FieldElement, window: int = 4
) -> bool:
    """Certified membership of x in the N-th convex exhaustion set: for each
    omitted place j, the chart of eps_j^N * x must lie in the hull region of
    the corresponding unit sublattice."""
    field = x.field
    n = field.degree
    if x.is_zero() or not all(field.sign_at(x, i) > 0 for i in range(n)):
        return False
    for j in range(n):
        I = tuple(p for p in range(n) if p != j)
        chart = hull_chart(cand, I, window)
        y = x * cand.units[j] ** N
        inside = _chart_region_contains(chart, y)
        if inside is False:
            return False
        if inside is None:
            raise WindowTooSmall(
                f"hull description at window {window} cannot decide place {j+1}"
            )
    return True


def _chart_region_contains(chart: HullChart, y: FieldElement) -> bool | None:
    """True/False when certified, None when the window cannot decide.

    The hull region is upward closed (its recession cone is the nonnegative
    orthant of the chart), so membership certificates are: domination of a
    charted point, or — in the two-dimensional chart — lying weakly above
    the bracketing edge of the boundary polyline.  Lying strictly below the
    smooth boundary surface, or below a bracketing edge, certifies False.
    """
    mpmath.iv.prec = chart.prec
    z = _chart_point(y, chart.omitted, chart.prec)
    keys = sorted(chart.points)
    pts = [chart.points[k] for k in keys]
    d = len(z)

    # outside the smooth region that contains the hull: certified False
    total = mpmath.iv.mpf(0)
    for (alo, ahi), zi in zip(chart.exponents, z):
        total = total + mpmath.iv.mpf([alo, ahi]) * mpmath.iv.log(zi)
    if _iv_sign(total) == -1:
        return False

    # domination of a charted point
    for P in pts:
        if all(_iv_sign(zi - pi) == 1 for zi, pi in zip(z, P)):
            return True

    if d != 2:
        # simplex certificates only; enough for interior points near the window
        for simplex in itertools.combinations(range(len(pts)), d + 1):
            if _certify_in_simplex([pts[i] for i in simplex], z):
                return True
        return None

    # two-dimensional chart: consecutive charted points are consecutive
    # lattice points, so the windowed polyline edges are true hull edges
    order = sorted(range(len(pts)), key=lambda i: float(pts[i][0].mid))
    pts = [pts[i] for i in order]
    for P, Q in zip(pts, pts[1:]):
        left = _iv_sign(z[0] - P[0])
        right = _iv_sign(Q[0] - z[0])
        if left is None or right is None:
            return None
        if left < 0 or right < 0:
            continue  # not bracketed by this edge
        cross = (Q[0] - P[0]) * (z[1] - P[1]) - (Q[1] - P[1]) * (z[0] - P[0])
        s = _iv_sign(cross)
        if s is None:
            return None
        return s > 0  # above the edge: inside; below: outside
    return None


def _certify_in_simplex(vertices, z) -> bool:
    """Interval barycentric test: all signed volumes share the sign of the
    reference volume."""
    d = len(z)

    def det_iv(rows):
        if len(rows) == 1:
            return rows[0][0]
        total = mpmath.iv.mpf(0)
        for j in range(len(rows)):
            minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
            term = rows[0][j] * det_iv(minor)
            total = total + term if j % 2 == 0 else total - term
        return total

    base = vertices[0]
    ref_rows = [
        [vertices[i + 1][k] - base[k] for k in range(d)] for i in range(d)
    ]
    ref = det_iv(ref_rows)
    if _iv_sign(ref) is None:
        return False
    for i in range(d + 1):
        rows = []
        for m in range(d + 1):
            if m == i:
                continue
            corner = vertices[m]
            rows.append([corner[k] - z[k] for k in range(d)])
        vol = det_iv(rows)
        s = _iv_sign(vol * ref)
        if s is None or ((-1) ** i) * s < 0:
            return False
    return True


# ---------------------------------------------------------------------------
# the convexity certificate for the chart boundary


def convexity_check(p: Sequence[Fraction], grid: Sequence[Sequence[float]],
                    fd_step: float = 1e-4, rel_tol: float = 1e-6) -> bool:
    """Check the closed-form leading minors of the Hessian of
    f(z) = prod z_i^(-p_i) against finite differences, and their positivity.

    det M_k = (1 + sum_{i<=k} p_i) * prod_{i<=k} (p_i / z_i^2) * f(z)^k.
    """
    import numpy as np

    p = [Fraction(v) for v in p]
    if any(v <= 0 for v in p):
        raise ValueError("all exponents must be positive")
    r = len(p)
    pf = np.array([float(v) for v in p])

    def f(z):
        return float(np.prod(np.asarray(z, dtype=float) ** (-pf)))

    for z in grid:
        z = np.asarray(z, dtype=float)
        assert len(z) == r and np.all(z > 0)
        fz = f(z)
        # analytic Hessian: f * (v v^T + diag(p_i / z_i^2)), v_i = p_i / z_i
        v = pf / z
        hess = fz * (np.outer(v, v) + np.diag(pf / z**2))
        # finite differences
        fd = np.zeros((r, r))
        h = fd_step
        for i in range(r):
            for j in range(r):
                zpp = z.copy(); zpp[i] += h; zpp[j] += h
                zpm = z.copy(); zpm[i] += h; zpm[j] -= h
                zmp = z.copy(); zmp[i] -= h; zmp[j] += h
                zmm = z.copy(); zmm[i] -= h; zmm[j] -= h
                fd[i, j] = (f(zpp) - f(zpm) - f(zmp) + f(zmm)) / (4 * h * h)
        for k in range(1, r + 1):
            analytic = (1 + float(sum(p[:k]))) * float(
                np.prod(pf[:k] / z[:k] ** 2)
            ) * fz**k
            minor_h = float(np.linalg.det(hess[:k, :k]))
            minor_fd = float(np.linalg.det(fd[:k, :k]))
            scale = max(1.0, abs(analytic))
            if abs(minor_h - analytic) > rel_tol * scale:
                return False
            if abs(minor_fd - analytic) > max(rel_tol * scale, 1e-5 * scale):
                return False
            if analytic <= 0:
                return False
    return True
