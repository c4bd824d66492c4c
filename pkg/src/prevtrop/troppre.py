"""Tropical points of a glued toric space and their nonnegative shadows.

The tropical space attached to a system of glued cones is a disjoint union
of rational vector spaces, one for every chart class; its nonnegative part
is a union of closed cone slices indexed by a chart class together with a
face recording where values become infinite.  Everything here is exact:
coordinates are Fractions, infinite values are the tagged INF object, and
containment questions go through the exact cone machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cone import Cone, dot, hilbert_basis
from .exactla import solve_rational
from .extreal import INF, format_extended, is_finite, parse_extended
from .sysfan import OmegaClass


class FiniteLocusNotAFace(ValueError):
    """The generators with finite values do not cut out a face of the chart."""


class RelationViolation(ValueError):
    """Chart values break an additive relation among the chart generators."""


def _extended(value):
    """Normalise a user-supplied value to Fraction or INF."""
    if value is INF:
        return INF
    return Fraction(value)


def _vector(entries, rank, what):
    out = tuple(Fraction(x) for x in entries)
    if len(out) != rank:
        raise ValueError("%s must have %d coordinates, got %d"
                         % (what, rank, len(out)))
    return out


def _exponent(entries, rank):
    out = tuple(int(x) for x in entries)
    if len(out) != rank:
        raise ValueError("exponent must have %d entries, got %d"
                         % (rank, len(out)))
    return out


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TropPoint:
    """A point of the tropical space: a stratum class plus coordinates.

    Coordinates live in the quotient of the ambient lattice by the span of
    the stratum cone, expressed in the canonical basis of that quotient;
    they are always finite.
    """

    stratum: OmegaClass
    coords: tuple


@dataclass(frozen=True)
class NonNegTropPoint:
    """A point of the nonnegative part, in canonical (smallest-chart) form.

    ``face`` is the locus where chart values are infinite; ``coords`` give
    the finite part in the quotient modulo the span of ``face`` and lie in
    the relative interior of the image of the chart cone there.  Keeping the
    chart minimal makes equality of points plain field equality.
    """

    chart: OmegaClass
    face: Cone
    coords: tuple


def trop_point(system, stratum, coords):
    """Build a tropical point on the given stratum, validating coordinates."""
    _own_class(system, stratum, "stratum")
    quot = stratum.cone.span_quotient()
    return TropPoint(stratum, _vector(coords, quot.rank, "coordinates"))


def nonneg_point(system, chart, face, coords):
    """Build a nonnegative point, reducing it to its canonical chart.

    The raw data is a chart class, a face of its cone where values are
    infinite, and finite coordinates inside the image of the chart cone
    modulo that face.  The canonical form replaces the chart by the face of
    it whose image the coordinates are interior to.
    """
    _own_class(system, chart, "chart")
    sigma = chart.cone
    if not sigma.has_face(face):
        raise ValueError("the infinite locus must be a face of the chart cone")
    quot = face.span_quotient()
    coords = _vector(coords, quot.rank, "coordinates")
    shadows = {f.rays: Cone.from_rays([quot.push(r) for r in f.rays],
                                      quot.rank)
               for f in sigma.faces() if f.has_face(face)}
    where, spot = shadows[sigma.rays].contains(coords)
    if where == "outside":
        raise ValueError("coordinates lie outside the image of the chart cone")
    carrier = next(f for f in sigma.faces()
                   if f.rays in shadows and shadows[f.rays] == spot)
    chart = system.omega().class_of(carrier, chart.representative)
    return NonNegTropPoint(chart, face, coords)


def _own_class(system, cls, what):
    poset = system.omega()
    if not (0 <= cls.class_id < len(poset.classes)
            and poset.classes[cls.class_id] == cls):
        raise ValueError("%s is not a chart class of this system" % what)
    return cls


# ---------------------------------------------------------------------------
# strata inventories
# ---------------------------------------------------------------------------

def strata(system):
    """All tropical strata as (class, dimension) in class order."""
    n = system.ambient_rank
    return tuple((cls, n - cls.cone.dim) for cls in system.omega())


def nonneg_strata(system):
    """All nonnegative strata as (class, face, dimension), deterministically.

    A stratum is a chart class together with a face of its cone; its points
    are interior to the image of the cone modulo the face, so the dimension
    is the difference of the two cone dimensions.
    """
    out = []
    for cls in system.omega():
        for face in cls.cone.faces():
            out.append((cls, face, cls.cone.dim - face.dim))
    return tuple(out)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def trop_eval(point, exponent):
    """Value of a single chart monomial at a tropical point.

    The exponent must pair nonnegatively with the stratum cone (it is then a
    monomial on the chart cut out by that cone); the value is finite exactly
    when the exponent annihilates the stratum cone.
    """
    tau = point.stratum.cone
    s = _exponent(exponent, tau.ambient_rank)
    pairings = [dot(s, r) for r in tau.rays]
    if any(p < 0 for p in pairings):
        raise ValueError("exponent %r is not a monomial on the chart of "
                         "stratum %r" % (list(s), point.stratum))
    if any(p != 0 for p in pairings):
        return INF
    quot = tau.span_quotient()
    descended = quot.descend_dual(s)
    return sum((c * d for c, d in zip(point.coords, descended)), Fraction(0))


def point_from_chart_values(system, chart, values):
    """Tropical point with prescribed values on the chart generators.

    ``values`` maps every Hilbert-basis generator of the chart cone's dual
    monoid to a rational or INF.  The finite generators must cut out a face
    of the chart cone and the finite values must respect every additive
    relation among the generators; otherwise FiniteLocusNotAFace or
    RelationViolation is raised.
    """
    _own_class(system, chart, "chart")
    sigma = chart.cone
    basis = hilbert_basis(sigma)
    gens = basis.generators
    table = {_exponent(g, sigma.ambient_rank): _extended(v)
             for g, v in values.items()}
    if set(table) != set(gens):
        raise ValueError("values must be given on exactly the %d chart "
                         "generators" % len(gens))
    finite = frozenset(g for g in gens if is_finite(table[g]))
    tau = None
    for face in sigma.faces():
        cut = frozenset(g for g in gens
                        if all(dot(g, r) == 0 for r in face.rays))
        if cut == finite:
            tau = face
            break
    if tau is None:
        raise FiniteLocusNotAFace(
            "the generators with finite values, %r, are not those vanishing "
            "on a face of the chart cone" % sorted(finite))
    for rel in basis.relations():
        if any(rel[k] and gens[k] not in finite for k in range(len(gens))):
            continue
        total = sum((rel[k] * table[gens[k]]
                     for k in range(len(gens)) if rel[k]), Fraction(0))
        if total != 0:
            raise RelationViolation(
                "values violate the generator relation %s"
                % _relation_text(rel, gens))
    quot = tau.span_quotient()
    rows = [quot.descend_dual(g) for g in gens if g in finite]
    rhs = [table[g] for g in gens if g in finite]
    if quot.rank == 0:
        coords = ()
    else:
        coords = solve_rational(rows, rhs)
        if coords is None:
            raise RelationViolation(
                "values are not additive on the chart monoid")
    stratum = system.omega().class_of(tau, chart.representative)
    return TropPoint(stratum, tuple(coords))


def _relation_text(rel, gens):
    def side(sign):
        parts = []
        for k, c in enumerate(rel):
            if sign * c > 0:
                m = abs(c)
                parts.append("%d*%r" % (m, list(gens[k])) if m != 1
                             else repr(list(gens[k])))
        return " + ".join(parts) if parts else "0"
    return "%s = %s" % (side(1), side(-1))


def nonneg_point_from_chart_values(system, chart, values):
    """Nonnegative point with prescribed values on the chart generators.

    Same contract as point_from_chart_values with every finite value
    required to be nonnegative; the result is returned in canonical form.
    """
    table = {tuple(g): _extended(v) for g, v in values.items()}
    for g, v in table.items():
        if is_finite(v) and v < 0:
            raise ValueError("generator %r has negative value %s"
                             % (list(g), v))
    shadow = point_from_chart_values(system, chart, table)
    tau = shadow.stratum.cone
    return nonneg_point(system, chart, tau, shadow.coords)


# ---------------------------------------------------------------------------
# comparison with the tropical space
# ---------------------------------------------------------------------------

def compare_to_trop(system, point):
    """Image of a nonnegative point in the tropical space.

    The infinite-locus face becomes the stratum and the coordinates carry
    over unchanged, both sides living in the same quotient.
    """
    _own_class(system, point.chart, "chart")
    stratum = system.omega().class_of(point.face, point.chart.representative)
    return TropPoint(stratum, point.coords)


def nonneg_preimage(system, point):
    """The nonnegative point mapping to a tropical point, or None.

    Scans the charts around the stratum for one whose image cone contains
    the coordinates; when none does, the point is outside the nonnegative
    locus and has no preimage.
    """
    _own_class(system, point.stratum, "stratum")
    tau = point.stratum.cone
    quot = tau.span_quotient()
    omega = system.omega()
    for cls in omega:
        sigma = cls.cone
        if not sigma.has_face(tau):
            continue
        if omega.class_of(tau, cls.representative) != point.stratum:
            continue
        image = Cone.from_rays([quot.push(r) for r in sigma.rays], quot.rank)
        if image.contains(point.coords)[0] != "outside":
            return nonneg_point(system, cls, tau, point.coords)
    return None


# ---------------------------------------------------------------------------
# polynomials with valued coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValuatedChartPolynomial:
    """A chart polynomial remembered only through coefficient valuations.

    Terms pair an exponent from the chart's dual monoid with the valuation
    of its coefficient (INF for a vanishing coefficient); exponents are
    distinct and sorted.
    """

    chart: OmegaClass
    terms: tuple


def chart_polynomial(system, chart, terms):
    """Validate and canonicalise a list of (exponent, valuation) terms."""
    _own_class(system, chart, "chart")
    sigma = chart.cone
    table = {}
    for exponent, val in terms:
        s = _exponent(exponent, sigma.ambient_rank)
        if any(dot(s, r) < 0 for r in sigma.rays):
            raise ValueError("exponent %r lies outside the chart monoid"
                             % list(s))
        if s in table:
            raise ValueError("duplicate exponent %r" % list(s))
        table[s] = _extended(val)
    return ValuatedChartPolynomial(chart, tuple(sorted(table.items())))


def skeleton_seminorm(point, poly):
    """Tropical value of a valued chart polynomial at a tropical point.

    The minimum over terms of coefficient valuation plus monomial value;
    INF for the empty polynomial.  The point's stratum must lie on the
    polynomial's chart.
    """
    if not (poly.chart.representative in point.stratum.members
            and poly.chart.cone.has_face(point.stratum.cone)):
        raise ValueError("the polynomial's chart does not contain the "
                         "point's stratum")
    best = INF
    for s, val in poly.terms:
        candidate = val + trop_eval(point, s)
        if candidate < best:
            best = candidate
    return best


# ---------------------------------------------------------------------------
# functoriality
# ---------------------------------------------------------------------------

def induced_map(morphism, point):
    """Push a tropical point through a morphism of glued systems.

    Works chart-wise: each generator of the image chart pulls back to a
    monomial on the source chart and is evaluated there; the resulting
    values determine the image point, which may sit on a deeper stratum
    than the class map alone suggests.
    """
    _own_class(morphism.source, point.stratum, "stratum")
    target_class = morphism.image_class(point.stratum)
    pullback = morphism.lattice_map.transpose()
    values = {}
    for g in hilbert_basis(target_class.cone).generators:
        values[g] = trop_eval(point, pullback.apply(g))
    return point_from_chart_values(morphism.target, target_class, values)


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def trop_point_to_data(point):
    return {"class": point.stratum.class_id,
            "coords": [format_extended(c) for c in point.coords]}


def trop_point_from_data(system, data):
    classes = system.omega().classes
    index = int(data["class"])
    if not 0 <= index < len(classes):
        raise ValueError("no chart class with index %d" % index)
    coords = [parse_extended(str(c)) for c in data["coords"]]
    if any(not is_finite(c) for c in coords):
        raise ValueError("tropical coordinates must be finite")
    return trop_point(system, classes[index], coords)


def nonneg_point_to_data(point):
    return {"class": point.chart.class_id,
            "face": [list(r) for r in point.face.rays],
            "coords": [format_extended(c) for c in point.coords]}


def chart_values_from_data(system, data):
    """Decode a {"chart": id, "values": {index: value}} request."""
    classes = system.omega().classes
    index = int(data["chart"])
    if not 0 <= index < len(classes):
        raise ValueError("no chart class with index %d" % index)
    chart = classes[index]
    gens = hilbert_basis(chart.cone).generators
    values = {}
    for key, text in data["values"].items():
        k = int(key)
        if not 0 <= k < len(gens):
            raise ValueError("no chart generator with index %d" % k)
        values[gens[k]] = parse_extended(str(text))
    return chart, values
