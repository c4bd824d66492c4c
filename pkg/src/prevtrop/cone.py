"""Rational polyhedral cones with exact dual descriptions.

A cone carries both a canonical generator list (primitive extremal rays, plus
a plus/minus lattice basis of its lineality space when it is not pointed) and
a canonical inequality list, which is by duality the generator list of the
dual cone.  Both are computed by an incremental double description sweep over
exact integers; there is no floating point anywhere.  Sizes are desk scale:
ambient rank stays in single digits and generator counts in the tens, so the
algorithms favour clarity over asymptotics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from prevtrop.exactla import (
    IntMatrix,
    Lattice,
    invert_unimodular,
    kernel_lattice,
    rational_rank,
    smith_normal_form,
    solve_rational,
)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def primitive(v):
    """Divide an integer vector by the gcd of its entries (orientation kept)."""
    g = 0
    for x in v:
        g = math.gcd(g, abs(x))
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def _echelon(rows, n):
    """Canonical primitive-integer RREF of the rational row space.

    Returns a list of (pivot_col, row) pairs sorted by pivot column; every row
    is a primitive integer vector with positive pivot and zeros in the other
    pivot columns.  Depends only on the row space, which makes it usable for
    canonical reduction modulo a subspace.
    """
    work = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(work)) if work[i][col] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        lead = work[r][col]
        work[r] = [x / lead for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][col]:
                f = work[i][col]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots.append(col)
        r += 1
    out = []
    for i, col in enumerate(pivots):
        den = 1
        for x in work[i]:
            den = den * x.denominator // math.gcd(den, x.denominator)
        row = tuple(int(x * den) for x in work[i])
        out.append((col, primitive(row)))
    return out


def _reduce_mod(base, v):
    """Canonical representative of v modulo the span of the echelon base.

    Only positive rescaling is applied, so ray orientation survives.
    """
    v = list(v)
    for pc, br in base:
        if v[pc]:
            f1, f2 = br[pc], v[pc]
            v = [f1 * x - f2 * y for x, y in zip(v, br)]
    return primitive(v)


def _halfspace_generators(normals, n):
    """Generator description of the cone {x : <a, x> >= 0 for a in normals}.

    Returns (lineality, rays): the saturated lattice of the lineality space
    with canonical HNF basis, and the sorted primitive extremal rays reduced
    modulo the lineality.  Incremental double description with an exact
    extremality test: a ray r of {x : <a_i, x> >= 0} is extremal iff its tight
    normals have rank exactly rank(all normals) - 1.
    """
    normals = sorted({primitive(a) for a in normals if any(a)})
    lin = [(j, tuple(1 if k == j else 0 for k in range(n))) for j in range(n)]
    rays = []
    processed = []
    for a in normals:
        hit = next(((pc, l) for pc, l in lin if dot(a, l) != 0), None)
        if hit is not None:
            pc0, l0 = hit
            if dot(a, l0) < 0:
                l0 = tuple(-x for x in l0)
            d0 = dot(a, l0)
            others = [l for pc, l in lin if pc != pc0]
            lin = _echelon(
                [tuple(d0 * x - dot(a, l) * y for x, y in zip(l, l0)) for l in others], n)
            rays = [tuple(d0 * x - dot(a, r) * y for x, y in zip(r, l0)) for r in rays]
            rays.append(l0)
        else:
            plus, zero, minus = [], [], []
            for r in rays:
                d = dot(a, r)
                (plus if d > 0 else zero if d == 0 else minus).append((d, r))
            rays = [r for _, r in plus + zero]
            for dp, p in plus:
                for dm, m in minus:
                    rays.append(tuple(dp * x - dm * y for x, y in zip(m, p)))
        processed.append(a)
        seen = set()
        cleaned = []
        for r in rays:
            r = _reduce_mod(lin, r)
            if any(r) and r not in seen:
                seen.add(r)
                cleaned.append(r)
        rank_all = rational_rank(processed, width=n)
        rays = [r for r in cleaned
                if rational_rank([p for p in processed if dot(p, r) == 0], width=n)
                == rank_all - 1]
    lineality = kernel_lattice(IntMatrix.from_rows(processed, cols=n))
    return lineality, tuple(sorted(rays))


def _generator_list(lineality, extremal):
    gens = list(extremal)
    for b in lineality.basis_rows():
        gens.append(tuple(b))
        gens.append(tuple(-x for x in b))
    return tuple(sorted(gens))


class Cone:
    """Rational polyhedral cone in a fixed lattice, canonical and immutable.

    rays: canonical generator list (V-description).
    inequalities: canonical generator list of the dual (H-description); the
      cone is exactly {x : <u, x> >= 0 for every u in inequalities}.
    """

    __slots__ = ("ambient_rank", "rays", "inequalities", "lineality",
                 "_dual_lineality", "_faces", "_face_support", "_hilbert",
                 "_span_quot")

    def __init__(self, ambient_rank, rays, inequalities, lineality, dual_lineality):
        self.ambient_rank = ambient_rank
        self.rays = rays
        self.inequalities = inequalities
        self.lineality = lineality
        self._dual_lineality = dual_lineality
        self._faces = None
        self._face_support = None
        self._hilbert = None
        self._span_quot = None

    @classmethod
    def from_rays(cls, rays, ambient_rank):
        gens = sorted({primitive(tuple(int(x) for x in r)) for r in rays if any(r)})
        dual_lin, dual_ext = _halfspace_generators(gens, ambient_rank)
        ineqs = _generator_list(dual_lin, dual_ext)
        lin, ext = _halfspace_generators(ineqs, ambient_rank)
        return cls(ambient_rank, _generator_list(lin, ext), ineqs, lin, dual_lin)

    @classmethod
    def from_inequalities(cls, normals, ambient_rank):
        lin, ext = _halfspace_generators(normals, ambient_rank)
        rays = _generator_list(lin, ext)
        dual_lin, dual_ext = _halfspace_generators(rays, ambient_rank)
        return cls(ambient_rank, rays, _generator_list(dual_lin, dual_ext),
                   lin, dual_lin)

    # -- identity ----------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Cone) and self.ambient_rank == other.ambient_rank
                and self.rays == other.rays)

    def __hash__(self):
        return hash((self.ambient_rank, self.rays))

    def __repr__(self):
        return "Cone%r" % (list(self.rays),)

    # -- basic geometry ----------------------------------------------------

    @property
    def dim(self):
        return rational_rank(self.rays, width=self.ambient_rank)

    def is_pointed(self):
        return self.lineality.rank == 0

    def is_simplicial(self):
        return self.is_pointed() and len(self.rays) == self.dim

    def dual(self):
        c = Cone(self.ambient_rank, self.inequalities, self.rays,
                 self._dual_lineality, self.lineality)
        return c

    def intersect(self, other):
        if self.ambient_rank != other.ambient_rank:
            raise ValueError("ambient rank mismatch")
        lin, ext = _halfspace_generators(self.inequalities + other.inequalities,
                                         self.ambient_rank)
        return Cone.from_rays(_generator_list(lin, ext), self.ambient_rank)

    def contains(self, vector):
        """Classify a rational vector against the cone.

        Returns ("outside", None), ("boundary", face) or ("interior", self)
        where "interior" means relative interior and face is the smallest face
        containing the vector.
        """
        vector = tuple(Fraction(x) for x in vector)
        if len(vector) != self.ambient_rank:
            raise ValueError("vector length mismatch")
        tight = []
        for u in self.inequalities:
            d = dot(u, vector)
            if d < 0:
                return "outside", None
            if d == 0:
                tight.append(u)
        face_rays = [r for r in self.rays if all(dot(u, r) == 0 for u in tight)]
        face = next(f for f in self.faces() if f.rays == tuple(sorted(face_rays)))
        if face == self:
            return "interior", self
        return "boundary", face

    # -- faces -------------------------------------------------------------

    def faces(self):
        """All faces, the zero face and the cone itself included."""
        if self._faces is None:
            tight_sets = [frozenset(r for r in self.rays if dot(u, r) == 0)
                          for u in self.inequalities]
            subsets = {frozenset(self.rays)}
            frontier = [frozenset(self.rays)]
            while frontier:
                fresh = []
                for s in frontier:
                    for t in tight_sets:
                        c = s & t
                        if c not in subsets:
                            subsets.add(c)
                            fresh.append(c)
                frontier = fresh
            cones = [Cone.from_rays(sorted(s), self.ambient_rank) for s in subsets]
            cones.sort(key=lambda c: (c.dim, c.rays))
            self._faces = tuple(cones)
            self._face_support = {
                f.rays: tuple(u for u in self.inequalities
                              if all(dot(u, r) == 0 for r in f.rays))
                for f in cones}
        return self._faces

    def face_support(self, face):
        """Inequalities of this cone that vanish on the given face."""
        self.faces()
        try:
            return self._face_support[face.rays]
        except KeyError:
            raise ValueError("not a face of this cone") from None

    def has_face(self, other):
        return any(f == other for f in self.faces())

    def facets(self):
        d = self.dim
        return tuple(f for f in self.faces() if f.dim == d - 1)

    # -- quotients ---------------------------------------------------------

    def quotient_by_span(self, face):
        """Quotient of the ambient lattice by the saturated span of a face."""
        if not self.has_face(face):
            raise ValueError("quotient face must be a face of the cone")
        return lattice_quotient(face.rays, self.ambient_rank)

    def span_quotient(self):
        """Quotient of the ambient lattice by this cone's own span, cached."""
        if self._span_quot is None:
            self._span_quot = lattice_quotient(self.rays, self.ambient_rank)
        return self._span_quot


@dataclass(frozen=True)
class LatticeQuotient:
    """Z^ambient -> Z^(ambient-k) with kernel exactly the saturated sublattice.

    proj rows give the projection; dual covectors vanishing on the sublattice
    descend through section columns (dual of a splitting of proj).
    """

    ambient: int
    sub: Lattice
    proj: IntMatrix
    section: IntMatrix

    @property
    def rank(self):
        return self.ambient - self.sub.rank

    def push(self, vector):
        return self.proj.apply(tuple(vector))

    def descend_dual(self, covector):
        covector = tuple(covector)
        for b in self.sub.basis_rows():
            if dot(covector, b) != 0:
                raise ValueError("covector does not vanish on the sublattice")
        return tuple(dot(covector, self.section.column(j))
                     for j in range(self.section.cols))


def lattice_quotient(spanning_vectors, ambient_rank):
    """Build the canonical quotient of Z^n by the saturated span of vectors."""
    perp = kernel_lattice(IntMatrix.from_rows(spanning_vectors, cols=ambient_rank))
    sub = kernel_lattice(perp.basis)
    k = sub.rank
    if k == 0:
        eye = IntMatrix.identity(ambient_rank)
        return LatticeQuotient(ambient_rank, sub, eye, eye)
    d, p, _ = smith_normal_form(sub.basis.transpose())
    for i in range(k):
        if d[i, i] != 1:
            raise AssertionError("saturated sublattice must have unit invariant factors")
    pinv = invert_unimodular(p)
    proj_rows = [list(p.row(i)) for i in range(k, ambient_rank)]
    section_cols = [[pinv[i, j] for i in range(ambient_rank)]
                    for j in range(k, ambient_rank)]
    # orient each quotient coordinate so its first nonzero weight is positive
    for t, row in enumerate(proj_rows):
        lead = next((x for x in row if x), 0)
        if lead < 0:
            proj_rows[t] = [-x for x in row]
            section_cols[t] = [-x for x in section_cols[t]]
    proj = IntMatrix.from_rows(proj_rows, cols=ambient_rank)
    section = IntMatrix.from_rows(
        [[col[i] for col in section_cols] for i in range(ambient_rank)],
        cols=ambient_rank - k)
    return LatticeQuotient(ambient_rank, sub, proj, section)


# ---------------------------------------------------------------------------
# dual monoids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineSemigroup:
    """The monoid of dual lattice points of a cone, sigma^v cap M.

    generators is the canonical minimal generating set: the Hilbert basis of
    the pointed quotient lifted back, together with a plus/minus lattice basis
    of the unit subgroup sigma^perp cap M when the cone is not full
    dimensional.
    """

    cone: Cone
    generators: tuple
    units: tuple
    _lifts: tuple
    _images: tuple
    _proj: IntMatrix
    _img_normals: tuple
    _grading: tuple

    @property
    def ambient_rank(self):
        return self.cone.ambient_rank

    def __contains__(self, vector):
        return all(dot(vector, r) >= 0 for r in self.cone.rays) \
            and all(isinstance(x, int) or Fraction(x).denominator == 1 for x in vector)

    def relations(self):
        """Canonical basis of the integer relation lattice of the generators."""
        if not self.generators:
            return ()
        cols = IntMatrix.from_rows(self.generators,
                                   cols=self.ambient_rank).transpose()
        return tuple(kernel_lattice(cols).basis_rows())

    def decompose(self, target):
        """Express a monoid element as an N-combination of the generators.

        Returns a dict generator -> multiplicity.  Raises ValueError when the
        target is not in the monoid.
        """
        target = tuple(int(x) for x in target)
        if any(dot(target, r) < 0 for r in self.cone.rays):
            raise ValueError("target outside the dual cone")
        img = tuple(self._proj.apply(target))
        counts = self._decompose_image(img, {})
        if counts is None:
            raise AssertionError("integral dual point failed to decompose")
        out = {}
        residual = list(target)
        for g_img, mult in counts.items():
            lift = self._lifts[self._images.index(g_img)]
            out[lift] = out.get(lift, 0) + mult
            for i in range(len(residual)):
                residual[i] -= mult * lift[i]
        # what is left lies in the unit lattice of the monoid
        return self._absorb_units(out, residual)

    def _absorb_units(self, out, residual):
        plus_units = [u for u in self.units if u > tuple(-x for x in u)]
        if not any(residual):
            return out
        if not plus_units:
            raise AssertionError("nonzero residual without unit generators")
        coeffs = solve_rational(list(zip(*plus_units)), residual)
        if coeffs is None:
            raise AssertionError("residual outside the unit lattice")
        for u, c in zip(plus_units, coeffs):
            if c.denominator != 1:
                raise AssertionError("residual outside the unit lattice")
            c = int(c)
            if c > 0:
                out[u] = out.get(u, 0) + c
            elif c < 0:
                neg = tuple(-x for x in u)
                out[neg] = out.get(neg, 0) - c
        return out

    def _decompose_image(self, v, memo):
        if not any(v):
            return {}
        if v in memo:
            return memo[v]
        memo[v] = None
        for g in self._images:
            rem = tuple(a - b for a, b in zip(v, g))
            if all(dot(rem, u) >= 0 for u in self._img_normals):
                sub = self._decompose_image(rem, memo)
                if sub is not None:
                    ans = dict(sub)
                    ans[g] = ans.get(g, 0) + 1
                    memo[v] = ans
                    return ans
        return None


def hilbert_basis(cone, ambient=None):
    """Minimal generator set of sigma^v cap M as an AffineSemigroup.

    Units (a plus/minus lattice basis of sigma^perp) are split off first; the
    pointed quotient is handled by enumerating lattice points below the
    zonotope bound for the primitive extremal rays and striking reducibles.
    The optional ambient lattice only sanity-checks the rank: every lattice
    here is a standard Z^n.
    """
    if cone._hilbert is not None:
        return cone._hilbert
    if ambient is not None and ambient.ambient != cone.ambient_rank:
        raise ValueError("ambient lattice rank mismatch")
    n = cone.ambient_rank
    unit_lattice = cone._dual_lineality
    units = []
    for b in unit_lattice.basis_rows():
        units.append(tuple(b))
        units.append(tuple(-x for x in b))
    quot = lattice_quotient([tuple(b) for b in unit_lattice.basis_rows()], n) \
        if unit_lattice.rank else None
    if quot is None:
        proj = IntMatrix.identity(n)
        k = n
    else:
        # quotient of the dual lattice by its unit sublattice
        proj = quot.proj
        k = quot.rank
    pairs = set(units)
    ext = [u for u in cone.inequalities if u not in pairs]
    img_rays = sorted({primitive(proj.apply(r)) for r in ext})
    if not img_rays:
        hb = AffineSemigroup(cone, tuple(sorted(units)), tuple(sorted(units)),
                             (), (), proj, (), ())
        cone._hilbert = hb
        return hb
    # H-description of the image cone: it is always pointed (its lineality
    # maps to zero), though it can be lower dimensional when the input cone is
    # not pointed; the plus/minus normal pairs then pin down its span.
    img_lin, img_normals_ext = _halfspace_generators(img_rays, k)
    img_normals = _generator_list(img_lin, img_normals_ext)
    w = tuple(sum(u[j] for u in img_normals) for j in range(k))
    weights = [dot(w, r) for r in img_rays]
    total = sum(weights)
    lo, hi = [], []
    for j in range(k):
        lo_j = hi_j = Fraction(0)
        for r, wr in zip(img_rays, weights):
            lam = Fraction(total, wr)
            lo_j += lam * min(r[j], 0)
            hi_j += lam * max(r[j], 0)
        lo.append(math.floor(lo_j))
        hi.append(math.ceil(hi_j))
    candidates = []
    for point in _box_points(lo, hi):
        if not any(point):
            continue
        if dot(w, point) > total:
            continue
        if all(dot(point, u) >= 0 for u in img_normals):
            candidates.append(point)
    cand_set = set(candidates)
    basis_img = []
    for x in candidates:
        reducible = any(tuple(a - b for a, b in zip(x, y)) in cand_set for y in candidates)
        if not reducible:
            basis_img.append(x)
    basis_img.sort()
    if quot is None:
        lifts = list(basis_img)
    else:
        lifts = [tuple(quot.section.apply(h)) for h in basis_img]
    hb = AffineSemigroup(cone, tuple(sorted(units + lifts)), tuple(sorted(units)),
                         tuple(lifts), tuple(basis_img), proj,
                         tuple(img_normals), w)
    cone._hilbert = hb
    return hb


def _box_points(lo, hi):
    if not lo:
        yield ()
        return
    for head in range(lo[0], hi[0] + 1):
        for tail in _box_points(lo[1:], hi[1:]):
            yield (head,) + tail
