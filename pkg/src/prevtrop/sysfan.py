"""Fans, systems of fans, the chart-class poset, morphisms and products.

A system of fans glues affine toric charts: one fan per chart on the
diagonal, and for every unordered pair of charts a shared subfan describing
where the two charts agree.  The poset of chart classes is the combinatorial
shadow of the glued space: a class is a cone together with the set of charts
that contain it compatibly, and the order relation mixes "face of" on cones
with reverse inclusion on chart sets.
"""

from __future__ import annotations

from dataclasses import dataclass

from prevtrop.cone import Cone
from prevtrop.exactla import IntMatrix


@dataclass(frozen=True)
class ValidationIssue:
    """One named axiom violation; validation returns lists of these."""

    kind: str          # "fan", "symmetry", "subfan", "pointed", ...
    where: tuple       # chart labels (and a chart triple for subfan checks)
    detail: str

    def __str__(self):
        return "%s at %s: %s" % (self.kind, "/".join(map(str, self.where)),
                                 self.detail)


class Fan:
    """A finite face-closed collection of cones in a fixed lattice.

    Construction closes the input under faces, so callers may hand over
    maximal cones only.  Axiom checking (pairwise intersection in a common
    face, pointedness) is separate, in validate(), and reports rather than
    raises.
    """

    __slots__ = ("ambient_rank", "cones", "_keys", "_maximal")

    def __init__(self, cones, ambient_rank):
        closed = {}
        for c in cones:
            if not isinstance(c, Cone):
                c = Cone.from_rays(c, ambient_rank)
            if c.ambient_rank != ambient_rank:
                raise ValueError("cone ambient rank mismatch")
            for f in c.faces():
                closed[f.rays] = f
        self.ambient_rank = ambient_rank
        self.cones = tuple(sorted(closed.values(), key=lambda c: (c.dim, c.rays)))
        self._keys = frozenset(closed)
        self._maximal = None

    def __eq__(self, other):
        return (isinstance(other, Fan) and self.ambient_rank == other.ambient_rank
                and self._keys == other._keys)

    def __hash__(self):
        return hash((self.ambient_rank, self._keys))

    def __contains__(self, cone):
        return isinstance(cone, Cone) and cone.rays in self._keys

    def __iter__(self):
        return iter(self.cones)

    def __len__(self):
        return len(self.cones)

    def __repr__(self):
        return "Fan(%d cones, rank %d)" % (len(self.cones), self.ambient_rank)

    def maximal_cones(self):
        if self._maximal is None:
            proper = set()
            for c in self.cones:
                for f in c.faces():
                    if f != c:
                        proper.add(f.rays)
            self._maximal = tuple(c for c in self.cones if c.rays not in proper)
        return self._maximal

    def is_subfan_of(self, other):
        return self.ambient_rank == other.ambient_rank and self._keys <= other._keys

    def common_cones(self, other):
        """The face-closed collection of cones lying in both fans."""
        return Fan([c for c in self.cones if c in other], self.ambient_rank)

    def validate(self, where=()):
        issues = []
        for c in self.cones:
            if not c.is_pointed():
                issues.append(ValidationIssue(
                    "pointed", where, "cone %r has a lineality space" % (c,)))
        cones = self.cones
        for a in range(len(cones)):
            for b in range(a + 1, len(cones)):
                meet = cones[a].intersect(cones[b])
                if not (cones[a].has_face(meet) and cones[b].has_face(meet)):
                    issues.append(ValidationIssue(
                        "fan", where,
                        "cones %r and %r overlap without a common face"
                        % (cones[a], cones[b])))
        return issues


class SystemOfFans:
    """Charts indexed by labels; a fan for every (unordered) pair of charts.

    entries maps label pairs to cone collections; a pair may be given in
    either order and is mirrored.  Giving both orders is allowed — axiom
    validation then checks that they agree instead of silently picking one.
    """

    def __init__(self, ambient_rank, labels, entries):
        labels = tuple(str(l) for l in labels)
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate chart labels")
        for l in labels:
            if "," in l or not l:
                raise ValueError("chart labels must be nonempty and comma-free")
        self.ambient_rank = ambient_rank
        self.labels = labels
        self._pos = {l: i for i, l in enumerate(labels)}
        given = {}
        for (a, b), cones in entries.items():
            a, b = str(a), str(b)
            if a not in self._pos or b not in self._pos:
                raise ValueError("unknown chart label in entry (%s, %s)" % (a, b))
            fan = cones if isinstance(cones, Fan) else Fan(cones, ambient_rank)
            if fan.ambient_rank != ambient_rank:
                raise ValueError("fan ambient rank mismatch")
            given[(a, b)] = fan
        self._given = given
        self._matrix = {}
        for i, a in enumerate(labels):
            for b in labels[i:]:
                fan = given.get((a, b), given.get((b, a)))
                if fan is None:
                    raise ValueError("missing fan entry for charts (%s, %s)" % (a, b))
                self._matrix[(a, b)] = fan
        self._poset = None

    @property
    def nlabels(self):
        return len(self.labels)

    def fan(self, a, b=None):
        """The fan glued between charts a and b (diagonal when b omitted)."""
        a = str(a)
        b = a if b is None else str(b)
        if a not in self._pos or b not in self._pos:
            raise KeyError("unknown chart label")
        if self._pos[a] <= self._pos[b]:
            return self._matrix[(a, b)]
        return self._matrix[(b, a)]

    def omega(self):
        if self._poset is None:
            self._poset = OmegaPoset(self)
        return self._poset


def validate_system(system):
    """All axiom violations of a system of fans, empty when valid."""
    issues = []
    labels = system.labels
    for (a, b), fan in sorted(system._matrix.items()):
        issues.extend(fan.validate(where=(a, b)))
    for (a, b), fan in sorted(system._given.items()):
        mirror = system._given.get((b, a))
        if a != b and mirror is not None and mirror != fan:
            if (a, b) < (b, a):
                issues.append(ValidationIssue(
                    "symmetry", (a, b),
                    "entries for (%s,%s) and (%s,%s) differ" % (a, b, b, a)))
    for a in labels:
        for b in labels:
            fab = system.fan(a, b)
            for c in labels:
                fbc = system.fan(b, c)
                fac = system.fan(a, c)
                for cone in fab.common_cones(fbc):
                    if cone not in fac:
                        issues.append(ValidationIssue(
                            "subfan", (a, b, c),
                            "cone %r is glued via %s but missing from (%s,%s)"
                            % (cone, b, a, c)))
    return issues


@dataclass(frozen=True)
class OmegaClass:
    """A chart class: a cone plus every chart containing it compatibly."""

    class_id: int
    cone: Cone
    members: tuple      # chart labels, in system label order

    @property
    def representative(self):
        return self.members[0]

    def __repr__(self):
        return "[%r, %s]" % (list(self.cone.rays), self.representative)


class OmegaPoset:
    """Classes of (cone, chart) pairs under the gluing relation, ordered.

    (sigma, i) and (sigma, j) are identified exactly when sigma lies in the
    fan glued between i and j; transitivity of that relation is the subfan
    axiom, but the construction uses union-find so that even slightly invalid
    systems produce a well-defined (if unexpected) answer for diagnostics.
    """

    def __init__(self, system):
        self.system = system
        labels = system.labels
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry

        for a in labels:
            for cone in system.fan(a, a):
                parent.setdefault((cone.rays, a), (cone.rays, a))
        for i, a in enumerate(labels):
            for b in labels[i + 1:]:
                for cone in system.fan(a, b):
                    union((cone.rays, a), (cone.rays, b))
        groups = {}
        cone_of = {}
        for a in labels:
            for cone in system.fan(a, a):
                root = find((cone.rays, a))
                groups.setdefault(root, set()).add(a)
                cone_of[root] = cone
        pos = {l: i for i, l in enumerate(labels)}
        keyed = sorted(groups.items(),
                       key=lambda kv: (cone_of[kv[0]].rays,
                                       min(pos[m] for m in kv[1])))
        self.classes = tuple(
            OmegaClass(i, cone_of[root], tuple(sorted(members, key=pos.get)))
            for i, (root, members) in enumerate(keyed))
        self._by_pair = {}
        for cls in self.classes:
            for m in cls.members:
                self._by_pair[(cls.cone.rays, m)] = cls
        self._leq = set()
        for low in self.classes:
            for high in self.classes:
                if set(low.members) >= set(high.members) \
                        and high.cone.has_face(low.cone):
                    self._leq.add((low.class_id, high.class_id))
        self._check_partial_order()

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def class_of(self, cone, label):
        """The class of the pair (cone, chart label)."""
        try:
            return self._by_pair[(cone.rays, str(label))]
        except KeyError:
            raise KeyError("cone %r is not in the fan of chart %s"
                           % (cone, label)) from None

    def leq(self, low, high):
        """Whether low precedes high: low's cone is a face of high's cone and
        low is glued into every chart that high is."""
        a = low.class_id if isinstance(low, OmegaClass) else low
        b = high.class_id if isinstance(high, OmegaClass) else high
        return (a, b) in self._leq

    def order_pairs(self):
        return frozenset(self._leq)

    def _check_partial_order(self):
        ids = [c.class_id for c in self.classes]
        for a in ids:
            if (a, a) not in self._leq:
                raise AssertionError("order not reflexive")
        for a, b in self._leq:
            if a != b and (b, a) in self._leq:
                raise AssertionError("order not antisymmetric")
        for a, b in self._leq:
            for c in ids:
                if (b, c) in self._leq and (a, c) not in self._leq:
                    raise AssertionError("order not transitive")


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SysFanMorphism:
    """A lattice map together with a map of chart classes."""

    source: SystemOfFans
    target: SystemOfFans
    lattice_map: IntMatrix        # target_rank x source_rank
    class_map: dict               # source class_id -> target class_id

    def image_class(self, cls):
        tgt_id = self.class_map[cls.class_id if isinstance(cls, OmegaClass)
                                else cls]
        return self.target.omega().classes[tgt_id]

    def push_vector(self, v):
        return self.lattice_map.apply(tuple(v))


def validate_morphism(morphism):
    """Check order preservation and cone containment; list of violations."""
    src = morphism.source.omega()
    tgt = morphism.target.omega()
    issues = []
    cmap = morphism.class_map
    for cls in src.classes:
        if cls.class_id not in cmap:
            issues.append(ValidationIssue(
                "class-map", (cls.representative,),
                "class %r has no image" % (cls,)))
    if issues:
        return issues
    for cls in src.classes:
        img = tgt.classes[cmap[cls.class_id]]
        for r in cls.cone.rays:
            fr = morphism.lattice_map.apply(r)
            if img.cone.contains(fr)[0] == "outside":
                issues.append(ValidationIssue(
                    "containment", (cls.representative,),
                    "ray %r of %r maps outside %r" % (r, cls, img)))
    tgt_pairs = tgt.order_pairs()
    for a, b in sorted(src.order_pairs()):
        if (cmap[a], cmap[b]) not in tgt_pairs:
            issues.append(ValidationIssue(
                "order", (str(a), str(b)),
                "class order %r <= %r is not preserved"
                % (src.classes[a], src.classes[b])))
    return issues


def morphism_from_lattice_map(source, target, lattice_map, chart_map):
    """Derive the class map of a toric morphism from a chart correspondence.

    chart_map sends each source chart label to a target chart label; each
    source cone must land inside some cone of the image chart's fan, and the
    smallest such cone determines the image class.  Raises ValueError when no
    such cone exists or when equivalent pairs disagree, i.e. when the data do
    not define a morphism.
    """
    src = source.omega()
    tgt = target.omega()
    class_map = {}
    for cls in src.classes:
        image_rays = [tuple(lattice_map.apply(r)) for r in cls.cone.rays]
        images = set()
        for member in cls.members:
            tlabel = str(chart_map[member])
            fan = target.fan(tlabel, tlabel)
            holding = [c for c in fan
                       if all(c.contains(fr)[0] != "outside" for fr in image_rays)]
            if not holding:
                raise ValueError(
                    "no cone of chart %s contains the image of %r"
                    % (tlabel, cls))
            smallest = min(holding, key=lambda c: (c.dim, c.rays))
            images.add(tgt.class_of(smallest, tlabel).class_id)
        if len(images) != 1:
            raise ValueError("chart map does not glue to a class map at %r"
                             % (cls,))
        class_map[cls.class_id] = images.pop()
    morphism = SysFanMorphism(source, target, lattice_map, class_map)
    problems = validate_morphism(morphism)
    if problems:
        raise ValueError("; ".join(map(str, problems)))
    return morphism


# ---------------------------------------------------------------------------
# products, separation, support
# ---------------------------------------------------------------------------

def _product_cone(a, b):
    n, m = a.ambient_rank, b.ambient_rank
    rays = [r + (0,) * m for r in a.rays] + [(0,) * n + r for r in b.rays]
    return Cone.from_rays(rays, n + m)


def product(system_a, system_b, separator="|"):
    """The product system on the direct sum of the two lattices.

    Chart labels are joined with a separator that must appear in neither
    factor's labels, so product labels stay unambiguous.
    """
    for l in system_a.labels + system_b.labels:
        if separator in l:
            raise ValueError("separator %r occurs in label %r" % (separator, l))
    labels = [la + separator + lb
              for la in system_a.labels for lb in system_b.labels]
    entries = {}
    for la in system_a.labels:
        for lb in system_b.labels:
            for ma in system_a.labels:
                for mb in system_b.labels:
                    cones = [_product_cone(ca, cb)
                             for ca in system_a.fan(la, ma)
                             for cb in system_b.fan(lb, mb)]
                    entries[(la + separator + lb, ma + separator + mb)] = cones
    return SystemOfFans(system_a.ambient_rank + system_b.ambient_rank,
                        labels, entries)


def is_separated(system):
    """Pairwise gluing check over chart classes; (True, None) or (False, witness).

    The witness names two classes whose cones meet badly: either their
    intersection is not a common face, or it is one but the two charts are
    not glued along it.
    """
    omega = system.omega()
    classes = omega.classes
    for x in range(len(classes)):
        for y in range(x + 1, len(classes)):
            a, b = classes[x], classes[y]
            meet = a.cone.intersect(b.cone)
            if not (a.cone.has_face(meet) and b.cone.has_face(meet)):
                return False, (a, b, meet, "intersection is not a common face")
            i, j = a.representative, b.representative
            if meet not in system.fan(i, j):
                return False, (a, b, meet,
                               "charts %s and %s are not glued along the "
                               "intersection" % (i, j))
    return True, None


def support_is_full(system):
    """Whether the cones cover the whole vector space (separated systems only).

    Uses the boundary criterion for pure full-dimensional fans: full support
    is equivalent to every maximal cone having full dimension and every facet
    of a maximal cone being shared with exactly one other maximal cone.
    """
    ok, witness = is_separated(system)
    if not ok:
        raise ValueError("support test requires a separated system; %s"
                         % (witness[3],))
    n = system.ambient_rank
    cones = {cls.cone.rays: cls.cone for cls in system.omega().classes}
    proper = set()
    for c in cones.values():
        for f in c.faces():
            if f != c:
                proper.add(f.rays)
    maximal = [c for key, c in cones.items() if key not in proper]
    for c in maximal:
        if c.dim < n:
            return False
        for facet in c.facets():
            shared = sum(1 for d in maximal if d != c and d.has_face(facet))
            if shared != 1:
                return False
    return True


# ---------------------------------------------------------------------------
# serialization helpers (used by the command line front end)
# ---------------------------------------------------------------------------

def system_to_data(system):
    fans = {}
    for i, a in enumerate(system.labels):
        for b in system.labels[i:]:
            fans["%s,%s" % (a, b)] = [
                [list(r) for r in c.rays]
                for c in system.fan(a, b).maximal_cones()]
    return {"ambient_rank": system.ambient_rank,
            "indices": list(system.labels),
            "fans": fans}


def system_from_data(data):
    labels = [str(l) for l in data["indices"]]
    n = int(data["ambient_rank"])
    entries = {}
    for key, cones in data["fans"].items():
        a, _, b = key.partition(",")
        if not _:
            raise ValueError("fan key %r is not 'i,j'" % (key,))
        entries[(a, b)] = [Cone.from_rays([tuple(r) for r in rays], n)
                           for rays in cones]
    return SystemOfFans(n, labels, entries)
