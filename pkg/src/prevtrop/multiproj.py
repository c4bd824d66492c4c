"""Multigraded polynomial rings and the glued toric model of their Proj.

A grading assigns each variable a degree in a finitely generated abelian
group.  A subset of the variables is relevant when its degrees generate a
finite-index subgroup; the minimal relevant subsets become the affine
charts, and the chart cones live in the lattice dual to the kernel of the
degree map.  Gluing follows monomial localization: two charts meet along
the chart of their union.
"""

from __future__ import annotations

from itertools import combinations

from prevtrop.cone import Cone
from prevtrop.exactla import (
    AbelianGroup,
    IntMatrix,
    cokernel_is_finite,
    kernel_lattice,
    rational_rank,
)
from prevtrop.sysfan import SystemOfFans


class EmptyProj(Exception):
    """Raised when no variable subset is relevant: the glued space is empty."""


class Grading:
    """Degrees deg(T_1), ..., deg(T_n) in Z^free_rank + torsion."""

    __slots__ = ("group", "degrees")

    def __init__(self, group, degrees):
        if not isinstance(group, AbelianGroup):
            group = AbelianGroup(*group)
        self.group = group
        self.degrees = tuple(group.reduce(d) for d in degrees)

    @property
    def n(self):
        return len(self.degrees)

    def __eq__(self, other):
        return (isinstance(other, Grading) and self.group == other.group
                and self.degrees == other.degrees)

    def __hash__(self):
        return hash((self.group, self.degrees))

    def __repr__(self):
        return "Grading(%r, %r)" % (self.group, list(self.degrees))

    def degree_of_monomial(self, exponents):
        """Degree of T^a for a nonnegative integer exponent vector a."""
        exponents = tuple(int(x) for x in exponents)
        if len(exponents) != self.n:
            raise ValueError("exponent vector length mismatch")
        total = [0] * self.group.ngens
        for a, d in zip(exponents, self.degrees):
            for j in range(len(total)):
                total[j] += a * d[j]
        return self.group.reduce(total)

    def free_degree_matrix(self):
        """The degree map on free parts, as a matrix acting on exponent
        vectors (free_rank rows, n columns)."""
        r = self.group.free_rank
        return IntMatrix.from_rows(
            [[self.degrees[i][j] for i in range(self.n)] for j in range(r)],
            cols=self.n)

    def subset_degree_matrix(self, subset):
        """Columns deg(T_i) for i in the subset, full coordinates."""
        idx = sorted(subset)
        return IntMatrix.from_rows(
            [[self.degrees[i - 1][j] for i in idx]
             for j in range(self.group.ngens)],
            cols=len(idx))


def _check_subset(grading, subset):
    subset = frozenset(int(i) for i in subset)
    for i in subset:
        if not 1 <= i <= grading.n:
            raise ValueError("variable index %d out of range" % i)
    return subset


def relevance_index(grading, subset):
    """Index of the subgroup generated by the subset's degrees, None if
    infinite."""
    subset = _check_subset(grading, subset)
    finite, index = cokernel_is_finite(grading.subset_degree_matrix(subset),
                                       grading.group)
    return index if finite else None


def is_relevant_subset(grading, subset):
    """Whether the degrees of the subset generate finite index in the group.

    A monomial is relevant exactly when its support is, so this predicate
    also decides membership of monomials in the irrelevant ideal.
    """
    return relevance_index(grading, subset) is not None


def monomial_in_irrelevant_ideal(grading, exponents):
    exponents = tuple(int(x) for x in exponents)
    if len(exponents) != grading.n or any(a < 0 for a in exponents):
        raise ValueError("exponent vector must be nonnegative of length n")
    return is_relevant_subset(
        grading, [i + 1 for i, a in enumerate(exponents) if a > 0])


class ChartPoset:
    """All relevant subsets with their cones, ordered by reverse inclusion.

    minimal lists the inclusion-minimal relevant subsets: the affine charts.
    cone_of maps each relevant subset H to sigma_H, the cone on the images of
    the complement's coordinate vectors in the dual of the degree kernel.
    """

    def __init__(self, grading):
        n = grading.n
        if n > 16:
            raise ValueError("subset enumeration is limited to 16 variables")
        self.grading = grading
        self.kernel = kernel_lattice(grading.free_degree_matrix())
        self.q = self.kernel.basis          # q(a) = basis_matrix @ a
        relevant = set()
        minimal = []
        by_size = sorted((frozenset(c)
                          for size in range(n + 1)
                          for c in combinations(range(1, n + 1), size)),
                         key=lambda s: (len(s), sorted(s)))
        for subset in by_size:
            if any(subset - {i} in relevant for i in subset):
                relevant.add(subset)
            elif is_relevant_subset(grading, subset):
                relevant.add(subset)
                minimal.append(subset)
        self.subsets = tuple(sorted(relevant, key=lambda s: (len(s), sorted(s))))
        self.minimal = tuple(sorted(minimal, key=lambda s: (len(s), sorted(s))))
        self._cones = {}
        for subset in self.subsets:
            vectors = [self.q.column(i - 1)
                       for i in range(1, n + 1) if i not in subset]
            if rational_rank(vectors, width=self.kernel.rank) != len(vectors):
                raise AssertionError(
                    "relevant subset %r yields dependent chart rays; the "
                    "simpliciality guarantee failed" % (sorted(subset),))
            self._cones[subset] = Cone.from_rays(vectors, self.kernel.rank)

    def __iter__(self):
        return iter(self.subsets)

    def __len__(self):
        return len(self.subsets)

    def is_relevant(self, subset):
        return _check_subset(self.grading, subset) in set(self.subsets)

    def cone_of(self, subset):
        return self._cones[_check_subset(self.grading, subset)]

    def leq(self, a, b):
        """Reverse inclusion: a precedes b when a contains b."""
        return _check_subset(self.grading, a) >= _check_subset(self.grading, b)


def relevant_subsets(grading):
    return ChartPoset(grading)


class ProjSystem:
    """The glued chart system of a grading, with its construction data."""

    def __init__(self, grading, poset, system, chart_subsets):
        self.grading = grading
        self.poset = poset
        self.system = system
        self.chart_subsets = chart_subsets      # label -> frozenset
        self.q = poset.q
        self.kernel = poset.kernel

    @property
    def ambient_rank(self):
        return self.system.ambient_rank

    def chart_label(self, subset):
        subset = _check_subset(self.grading, subset)
        for label, s in self.chart_subsets.items():
            if s == subset:
                return label
        raise KeyError("subset %r is not a chart" % (sorted(subset),))


def _label_for(subset):
    if not subset:
        return "1"
    return "*".join("T%d" % i for i in sorted(subset))


def proj_system_of_fans(grading):
    """Build the chart system of the grading.

    Charts are the minimal relevant subsets F with cone sigma_F; the fan
    between charts F and G consists of the faces of sigma_{F union G},
    mirroring D_+(T^F) cap D_+(T^G) = D_+(T^{F union G}).  Raises EmptyProj
    when nothing is relevant.
    """
    poset = relevant_subsets(grading)
    if not poset.subsets:
        raise EmptyProj("no relevant variable subsets")
    minimal = poset.minimal
    labels = [_label_for(f) for f in minimal]
    chart_subsets = dict(zip(labels, minimal))
    entries = {}
    for x, f in enumerate(minimal):
        for g in minimal[x:]:
            union = f | g
            entries[(_label_for(f), _label_for(g))] = [poset.cone_of(union)]
    system = SystemOfFans(poset.kernel.rank, labels, entries)
    return ProjSystem(grading, poset, system, chart_subsets)


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def grading_to_data(grading):
    return {"n": grading.n,
            "free_rank": grading.group.free_rank,
            "torsion": list(grading.group.torsion),
            "degrees": [list(d) for d in grading.degrees]}


def grading_from_data(data):
    group = AbelianGroup(int(data["free_rank"]),
                         tuple(int(m) for m in data.get("torsion", ())))
    degrees = [tuple(int(x) for x in d) for d in data["degrees"]]
    if int(data["n"]) != len(degrees):
        raise ValueError("variable count does not match the degree list")
    return Grading(group, degrees)
