"""Classical points over Q(t), their tropical shadows, and chart refinement.

Scalars are rational functions in one variable t, valued by order of
vanishing at t = 0.  A classical point of a chart assigns such a scalar to
every generator of the chart monoid, multiplicatively; taking valuations
turns it into a tropical point.  The refinement machinery adjoins a new
homogeneous coordinate for a chosen polynomial, which is how tropically
indistinguishable points get separated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .cone import dot, hilbert_basis
from .exactla import IntMatrix, kernel_lattice, solve_rational
from .extreal import INF, is_finite
from .multiproj import Grading, proj_system_of_fans
from .troppre import (FiniteLocusNotAFace, _own_class, chart_polynomial,
                      nonneg_point_from_chart_values, point_from_chart_values,
                      trop_eval)


class NotBounded(ValueError):
    """A generator value has negative valuation."""


class NotHomogeneous(ValueError):
    """A polynomial mixes degrees of the ambient grading."""


class NotSeparating(ValueError):
    """The proposed function fails to tell two points apart."""


# ---------------------------------------------------------------------------
# the field Q(t)
# ---------------------------------------------------------------------------
# Dense coefficient tuples, lowest degree first, trailing zeros stripped.
# Fractions of polynomials are never reduced: valuations, equality and
# arithmetic are all stable under common factors, so reduction would only
# be an optimisation.

def _poly(coeffs):
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _padd(a, b):
    n = max(len(a), len(b))
    return _poly([(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0)
                  for k in range(n)])


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly(out)


def _pord(a):
    for k, c in enumerate(a):
        if c != 0:
            return k
    raise ValueError("zero polynomial has no order")


@dataclass(frozen=True, eq=False)
class ValuedScalar:
    """An element of Q(t) with its t-adic valuation.

    num and den are coefficient tuples of polynomials in t; den is nonzero.
    The valuation is ord_t(num) - ord_t(den), infinite only for zero.
    """

    num: tuple
    den: tuple

    def __post_init__(self):
        if not self.den:
            raise ZeroDivisionError("denominator must be nonzero")

    @classmethod
    def of(cls, value):
        if isinstance(value, ValuedScalar):
            return value
        return cls(_poly([value]), _poly([1]))

    @classmethod
    def t_power(cls, power, coeff=1):
        """coeff * t**power for any integer power."""
        power = int(power)
        if power >= 0:
            return cls(_poly([0] * power + [coeff]), _poly([1]))
        return cls(_poly([coeff]), _poly([0] * (-power) + [1]))

    @classmethod
    def from_polys(cls, num, den=(1,)):
        return cls(_poly(num), _poly(den))

    @property
    def is_zero(self):
        return not self.num

    @property
    def valuation(self):
        if not self.num:
            return INF
        return _pord(self.num) - _pord(self.den)

    def __add__(self, other):
        other = ValuedScalar.of(other)
        return ValuedScalar(_padd(_pmul(self.num, other.den),
                                  _pmul(other.num, self.den)),
                            _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return ValuedScalar(_poly([-c for c in self.num]), self.den)

    def __sub__(self, other):
        return self + (-ValuedScalar.of(other))

    def __rsub__(self, other):
        return ValuedScalar.of(other) + (-self)

    def __mul__(self, other):
        other = ValuedScalar.of(other)
        return ValuedScalar(_pmul(self.num, other.num),
                            _pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = ValuedScalar.of(other)
        if other.is_zero:
            raise ZeroDivisionError("division by the zero scalar")
        return ValuedScalar(_pmul(self.num, other.den),
                            _pmul(self.den, other.num))

    def __pow__(self, power):
        power = int(power)
        if power < 0:
            if self.is_zero:
                raise ZeroDivisionError("negative power of zero")
            return ValuedScalar(self.den, self.num) ** (-power)
        out = ValuedScalar.of(1)
        base = self
        while power:
            if power & 1:
                out = out * base
            base = base * base
            power >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ValuedScalar.of(other)
        if not isinstance(other, ValuedScalar):
            return NotImplemented
        return _pmul(self.num, other.den) == _pmul(other.num, self.den)

    __hash__ = None

    def __repr__(self):
        return "ValuedScalar(%r / %r)" % (list(self.num), list(self.den))


def scalar(value):
    return ValuedScalar.of(value)


_ZERO = ValuedScalar(_poly([]), _poly([1]))

# ---------------------------------------------------------------------------
# classical chart points
# ---------------------------------------------------------------------------

class ClassicalChartPoint:
    """Multiplicative scalar values on the generators of a chart monoid.

    The nonzero generators are exactly those vanishing on a face of the
    chart cone (the point's zero face), and the values respect every
    multiplicative relation of the monoid; both are checked at build time.
    """

    __slots__ = ("system", "chart", "values", "zero_face")

    def __init__(self, system, chart, values, zero_face):
        self.system = system
        self.chart = chart
        self.values = values
        self.zero_face = zero_face

    def __eq__(self, other):
        if not isinstance(other, ClassicalChartPoint):
            return NotImplemented
        return (self.chart == other.chart
                and set(self.values) == set(other.values)
                and all(self.values[g] == other.values[g]
                        for g in self.values))

    __hash__ = None

    def __repr__(self):
        return "ClassicalChartPoint(%r, %d values)" % (self.chart,
                                                       len(self.values))

    def eval(self, exponent):
        """Value of the chart monomial with the given exponent."""
        sigma = self.chart.cone
        s = tuple(int(x) for x in exponent)
        if any(dot(s, r) < 0 for r in sigma.rays):
            raise ValueError("exponent %r lies outside the chart monoid"
                             % list(s))
        if any(dot(s, r) != 0 for r in self.zero_face.rays):
            return _ZERO
        parts = hilbert_basis(sigma).decompose(s)
        out = ValuedScalar.of(1)
        for g, mult in parts.items():
            out = out * self.values[g] ** mult
        return out


def classical_point(system, chart, values):
    """Validate generator values and build a classical chart point.

    Zero values must be supported exactly off a face of the chart cone and
    the nonzero values must satisfy every multiplicative relation among
    their generators.
    """
    _own_class(system, chart, "chart")
    sigma = chart.cone
    basis = hilbert_basis(sigma)
    gens = basis.generators
    table = {tuple(int(x) for x in g): ValuedScalar.of(v)
             for g, v in values.items()}
    if set(table) != set(gens):
        raise ValueError("values must be given on exactly the %d chart "
                         "generators" % len(gens))
    alive = [g for g in gens if not table[g].is_zero]
    zero_face = None
    for face in sigma.faces():
        cut = [g for g in gens if all(dot(g, r) == 0 for r in face.rays)]
        if set(cut) == set(alive):
            zero_face = face
            break
    if zero_face is None:
        raise FiniteLocusNotAFace(
            "the generators with nonzero values, %r, are not those "
            "vanishing on a face of the chart cone" % sorted(alive))
    if alive:
        columns = kernel_lattice(
            IntMatrix.from_rows([list(v) for v in zip(*alive)],
                                cols=len(alive)))
        for rel in columns.basis_rows():
            lhs = ValuedScalar.of(1)
            rhs = ValuedScalar.of(1)
            for k, c in enumerate(rel):
                if c > 0:
                    lhs = lhs * table[alive[k]] ** c
                elif c < 0:
                    rhs = rhs * table[alive[k]] ** (-c)
            if lhs != rhs:
                raise ValueError(
                    "values are not multiplicative on the chart monoid")
    return ClassicalChartPoint(system, chart, table, zero_face)


def coordinate_point(system, chart, coords, zero_face=None):
    """Classical point from torus coordinates, optionally pushed to a face.

    Every generator orthogonal to the zero face takes the monomial value
    prod coords[j] ** g[j]; the rest are zero.  Coordinates must be nonzero
    scalars.
    """
    sigma = chart.cone
    coords = [ValuedScalar.of(c) for c in coords]
    if len(coords) != sigma.ambient_rank:
        raise ValueError("need %d torus coordinates" % sigma.ambient_rank)
    if any(c.is_zero for c in coords):
        raise ValueError("torus coordinates must be nonzero")
    if zero_face is None:
        zero_face = sigma.faces()[0]
    if not sigma.has_face(zero_face):
        raise ValueError("zero locus must be a face of the chart cone")
    values = {}
    for g in hilbert_basis(sigma).generators:
        if all(dot(g, r) == 0 for r in zero_face.rays):
            out = ValuedScalar.of(1)
            for c, a in zip(coords, g):
                out = out * c ** a
            values[g] = out
        else:
            values[g] = _ZERO
    return classical_point(system, chart, values)


# ---------------------------------------------------------------------------
# tropicalization of classical points
# ---------------------------------------------------------------------------

def trop_point(point):
    """Tropical point with the valuations of the generator values."""
    vals = {g: v.valuation for g, v in point.values.items()}
    return point_from_chart_values(point.system, point.chart, vals)


def nonneg_trop_point(point):
    """Nonnegative tropical point of a point with bounded coordinates."""
    vals = {}
    for g, v in point.values.items():
        w = v.valuation
        if is_finite(w) and w < 0:
            raise NotBounded("generator %r has valuation %s < 0"
                             % (list(g), w))
        vals[g] = w
    return nonneg_point_from_chart_values(point.system, point.chart, vals)


def apply_morphism(morphism, point):
    """Push a classical point through a morphism of glued systems."""
    _own_class(morphism.source, point.chart, "chart")
    target_chart = morphism.image_class(point.chart)
    pullback = morphism.lattice_map.transpose()
    values = {g: point.eval(pullback.apply(g))
              for g in hilbert_basis(target_chart.cone).generators}
    return classical_point(morphism.target, target_chart, values)


# ---------------------------------------------------------------------------
# Kapranov membership for hypersurfaces
# ---------------------------------------------------------------------------

def kapranov_membership(poly, point):
    """Whether a tropical point lies on the tropicalized hypersurface.

    Terms whose monomial or coefficient is infinite on the point's stratum
    are discarded; membership means the minimum of valuation plus monomial
    value is attained at least twice, or that no term survives at all (the
    restricted polynomial vanishes identically on the stratum).
    """
    if not (poly.chart.representative in point.stratum.members
            and poly.chart.cone.has_face(point.stratum.cone)):
        raise ValueError("the polynomial's chart does not contain the "
                         "point's stratum")
    survivors = []
    for s, val in poly.terms:
        if not is_finite(val):
            continue
        value = trop_eval(point, s)
        if is_finite(value):
            survivors.append(val + value)
    if not survivors:
        return True
    low = min(survivors)
    return sum(1 for v in survivors if v == low) >= 2

# ---------------------------------------------------------------------------
# hypersurfaces in a graded ambient
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EmbeddedHypersurface:
    """A nonzero polynomial with valued coefficients in a graded ring."""

    grading: Grading
    terms: tuple


def hypersurface(grading, terms):
    table = {}
    for exponent, coeff in terms:
        e = tuple(int(x) for x in exponent)
        if len(e) != grading.n or any(a < 0 for a in e):
            raise ValueError("exponent %r must be nonnegative of length %d"
                             % (list(e), grading.n))
        if e in table:
            raise ValueError("duplicate exponent %r" % list(e))
        coeff = ValuedScalar.of(coeff)
        if not coeff.is_zero:
            table[e] = coeff
    if not table:
        raise ValueError("hypersurface polynomial must be nonzero")
    return EmbeddedHypersurface(grading, tuple(sorted(table.items())))


def _integral(solution):
    """Round an exact rational solution known to be integral."""
    assert solution is not None and all(c.denominator == 1 for c in solution)
    return tuple(int(c) for c in solution)


def _character(proj, exponent):
    """The chart character with the given variable exponents.

    Solves q^T s = exponent; fails when the monomial does not descend to
    the degree-zero torus.
    """
    rows = proj.kernel.basis.transpose().row_lists()
    sol = solve_rational(rows, [int(x) for x in exponent])
    if sol is None or any(c.denominator != 1 for c in sol):
        raise ValueError("monomial %r does not descend to the chart torus"
                         % list(exponent))
    return tuple(int(c) for c in sol)


def restrict_to_chart(proj, hyp, label):
    """The valued chart polynomial cut out on one chart of the system."""
    if hyp.grading != proj.grading:
        raise ValueError("hypersurface and chart system gradings differ")
    try:
        subset = proj.chart_subsets[label]
    except KeyError:
        raise ValueError("no chart labelled %r" % label) from None
    chart = proj.system.omega().class_of(proj.poset.cone_of(subset), label)
    terms = [(_character(proj, e), coeff.valuation)
             for e, coeff in hyp.terms]
    return chart_polynomial(proj.system, chart, terms)


def evaluate_polynomial(proj, point, terms):
    """Evaluate integer-exponent terms at a classical point of a chart."""
    total = _ZERO
    for exponent, coeff in terms:
        total = total + ValuedScalar.of(coeff) \
            * point.eval(_character(proj, exponent))
    return total


# ---------------------------------------------------------------------------
# embedding refinement
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Refinement:
    """A new homogeneous coordinate x standing for a chosen polynomial.

    The new grading extends the old one by deg(x) = deg(gtilde); clearing
    records the monomial multiplier that made the underlying function a
    polynomial, so the function itself is the pullback of x divided by that
    monomial.
    """

    old_grading: Grading
    new_grading: Grading
    old_proj: object
    new_proj: object
    gtilde: tuple
    clearing: tuple
    x_degree: tuple


def refine_embedding(grading, terms, clearing=None):
    """Adjoin a coordinate for a homogeneous polynomial to a grading."""
    table = {}
    degrees = set()
    for exponent, coeff in terms:
        e = tuple(int(x) for x in exponent)
        if len(e) != grading.n or any(a < 0 for a in e):
            raise ValueError("exponent %r must be nonnegative of length %d"
                             % (list(e), grading.n))
        if e in table:
            raise ValueError("duplicate exponent %r" % list(e))
        coeff = ValuedScalar.of(coeff)
        if not coeff.is_zero:
            table[e] = coeff
            degrees.add(grading.degree_of_monomial(e))
    if not table:
        raise ValueError("refinement polynomial must be nonzero")
    if len(degrees) > 1:
        raise NotHomogeneous("terms of degrees %s cannot define a new "
                             "coordinate" % sorted(degrees))
    if clearing is None:
        clearing = (0,) * grading.n
    clearing = tuple(int(x) for x in clearing)
    if len(clearing) != grading.n or any(a < 0 for a in clearing):
        raise ValueError("clearing monomial must be nonnegative of length %d"
                         % grading.n)
    x_degree = degrees.pop()
    new_grading = Grading(grading.group, list(grading.degrees) + [x_degree])
    return Refinement(grading, new_grading,
                      proj_system_of_fans(grading),
                      proj_system_of_fans(new_grading),
                      tuple(sorted(table.items())), clearing, x_degree)


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _multinomial(total, split):
    out = factorial(total)
    for k in split:
        out //= factorial(k)
    return out


def _top_chart(proj, point):
    """The chart subset a classical point was built on, with validation."""
    label = point.chart.representative
    try:
        subset = proj.chart_subsets[label]
    except KeyError:
        raise ValueError("point does not sit on a chart of this system") \
            from None
    expected = proj.system.omega().class_of(proj.poset.cone_of(subset), label)
    if point.chart != expected:
        raise ValueError("point must sit on a full chart of the system")
    return subset


def refined_classical(refinement, point):
    """The classical point with the extra coordinate x = gtilde(point)."""
    old = refinement.old_proj
    new = refinement.new_proj
    subset = _top_chart(old, point)
    label = new.chart_label(subset)
    chart = new.system.omega().class_of(new.poset.cone_of(subset), label)
    n = refinement.old_grading.n
    gens = [e for e, _ in refinement.gtilde]
    coeffs = [c for _, c in refinement.gtilde]
    values = {}
    for g in hilbert_basis(chart.cone).generators:
        e = new.kernel.basis.transpose().apply(g)
        a, b = e[:n], e[n]
        total = _ZERO
        for split in _compositions(b, len(gens)):
            exponent = list(a)
            for k, mult in zip(gens, split):
                for i in range(n):
                    exponent[i] += k[i] * mult
            piece = ValuedScalar.of(_multinomial(b, split))
            for c, mult in zip(coeffs, split):
                piece = piece * c ** mult
            total = total + piece * point.eval(_character(old, exponent))
        values[g] = total
    return classical_point(new.system, chart, values)


def refined_trop(refinement, point):
    """Tropicalization of a classical point in the refined system."""
    return trop_point(refined_classical(refinement, point))


def forget_refinement(refinement, point):
    """Project a refined tropical point back to the unrefined system.

    Undefined over strata that only exist thanks to the new coordinate;
    everywhere else it recovers the direct tropicalization.
    """
    old = refinement.old_proj
    new = refinement.new_proj
    _own_class(new.system, point.stratum, "stratum")
    label = point.stratum.representative
    subset = new.chart_subsets[label] - {refinement.old_grading.n + 1}
    if not old.poset.is_relevant(subset):
        raise ValueError("the projection is undefined over this stratum")
    base = next(f for f in old.poset.minimal if f <= subset)
    chart = old.system.omega().class_of(old.poset.cone_of(base),
                                        old.chart_label(base))
    new_rows = new.kernel.basis.transpose().row_lists()
    values = {}
    for g in hilbert_basis(chart.cone).generators:
        e = list(old.kernel.basis.transpose().apply(g)) + [0]
        lifted = _integral(solve_rational(new_rows, e))
        values[g] = trop_eval(point, lifted)
    return point_from_chart_values(old.system, chart, values)


def separation_witness(proj, p, q, terms):
    """A refinement telling apart two tropically equal classical points.

    The separating function is given by integer-exponent terms regular on
    the common chart; its valuations at the two points must differ.  The
    returned refinement adjoins a coordinate for the polynomial obtained by
    clearing denominators, and the refined tropicalizations are verified to
    disagree.
    """
    if p.chart != q.chart:
        raise ValueError("points must share a chart")
    cleaned = [(tuple(int(x) for x in e), ValuedScalar.of(c))
               for e, c in terms]
    cleaned = [(e, c) for e, c in cleaned if not c.is_zero]
    if not cleaned:
        raise NotSeparating("the zero function cannot separate points")
    va = evaluate_polynomial(proj, p, cleaned).valuation
    vb = evaluate_polynomial(proj, q, cleaned).valuation
    if va == vb:
        raise NotSeparating("the function has valuation %s at both points"
                            % (va,))
    clearing = tuple(max(0, -min(e[i] for e, _ in cleaned))
                     for i in range(proj.grading.n))
    gtilde = [(tuple(e[i] + clearing[i] for i in range(proj.grading.n)), c)
              for e, c in cleaned]
    refinement = refine_embedding(proj.grading, gtilde, clearing)
    rp = refined_trop(refinement, p)
    rq = refined_trop(refinement, q)
    if rp == rq:
        raise AssertionError("refinement failed to separate the points")
    return refinement


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def valued_scalar_to_data(value):
    return {"num": [[str(c), k] for k, c in enumerate(value.num) if c],
            "den": [[str(c), k] for k, c in enumerate(value.den) if c]}


def _poly_from_sparse(entries):
    coeffs = {}
    for pair in entries:
        text, power = pair
        power = int(power)
        if power < 0:
            raise ValueError("polynomial powers must be nonnegative")
        coeffs[power] = coeffs.get(power, Fraction(0)) + Fraction(str(text))
    top = max(coeffs, default=-1)
    return _poly([coeffs.get(k, 0) for k in range(top + 1)])


def valued_scalar_from_data(data):
    if isinstance(data, (str, int)):
        return ValuedScalar.of(Fraction(str(data)))
    den = _poly_from_sparse(data.get("den", [["1", 0]]))
    return ValuedScalar(_poly_from_sparse(data["num"]), den)


def hypersurface_to_data(hyp):
    return {"terms": [{"exp": list(e), "coeff": valued_scalar_to_data(c)}
                      for e, c in hyp.terms]}


def hypersurface_from_data(grading, data):
    terms = [(tuple(term["exp"]), valued_scalar_from_data(term["coeff"]))
             for term in data["terms"]]
    return hypersurface(grading, terms)
