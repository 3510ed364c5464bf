"""Stabiliser, neighbourhood-stabiliser, and germ computations.

For a point ``x`` and a group family, this module decides membership in the
stabiliser, in rigid stabilisers of cylinders, and in the neighbourhood
stabiliser (elements fixing a whole cylinder around ``x`` pointwise), and
enumerates germ classes of the stabiliser modulo the neighbourhood
stabiliser.  Everything is three-valued: budgets exhaust to UNKNOWN, never
to a guess, and raising a budget can only turn UNKNOWN into YES or NO.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .space import Alphabet, BoundaryPoint, Cylinder, Word, cylinders_at_depth
from .elements import GroupElement, NoCycleWithinBound, Tri, tri_all

DEFAULT_MAX_DEPTH = 30
DEFAULT_ID_BUDGET = 512
DEFAULT_ENUM_MAXLEN = 8


class PointClass(Enum):
    REGULAR = "regular"
    SINGULAR = "singular"
    NO_RULE = "no_rule"


@dataclass(frozen=True)
class GroupFamily:
    """A named group given by generators, with optional preset knowledge.

    ``rist_oracle(cylinder)`` may return generators of a subgroup of the
    rigid stabiliser (every returned element is re-checked against the
    definition before use).  ``classifier`` is a proven regular/singular
    rule.  ``transporter_margin`` is how many levels deeper than the stage
    depth the conjugator builder must aim: rigid-stabiliser orbits of some
    families (branch-type) are confined one level below their cylinder, so
    aiming exactly at the stage depth can strand the next stage in an
    unreachable half.
    """

    name: str
    alphabet: Alphabet
    generators: tuple[tuple[str, GroupElement], ...]
    rist_oracle: object = None
    classifier: object = None
    transporter_margin: int = 0
    _caches: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def identity(self) -> GroupElement:
        return self.generators[0][1].identity_like()

    def generator(self, name: str) -> GroupElement:
        for n, g in self.generators:
            if n == name:
                return g
        raise KeyError(name)

    def involutive_names(self, budget: int = 64) -> frozenset:
        """Generators confirmed involutive by the identity oracle (used only
        to prune redundant words during enumeration)."""
        key = ("involutive", budget)
        if key not in self._caches:
            self._caches[key] = frozenset(
                name
                for name, g in self.generators
                if g.compose(g).is_identity(budget) is Tri.YES
            )
        return self._caches[key]


def stabilises(g: GroupElement, x: BoundaryPoint) -> Tri:
    """YES iff g fixes the point exactly; UNKNOWN on image-budget exhaustion."""
    try:
        return Tri.YES if g.act_point(x) == x else Tri.NO
    except NoCycleWithinBound:
        return Tri.UNKNOWN


def fixes_cylinder_pointwise(g: GroupElement, c: Cylinder, budget: int = DEFAULT_ID_BUDGET) -> Tri:
    """YES iff g maps the cylinder to itself and acts trivially beyond it.

    For elements whose resolution depth exceeds the cylinder depth the check
    refines to sub-cylinders, so the verdict is always about the set.
    """
    prefix = c.prefix
    if len(prefix) < g.resolution_depth():
        return tri_all(
            fixes_cylinder_pointwise(
                g, Cylinder(Word(prefix.letters + (a,), c.alphabet)), budget
            )
            for a in c.alphabet.letters()
        )
    if g.act_word(prefix) != prefix:
        return Tri.NO
    return g.section(prefix).is_identity(budget)


def in_rigid_stabiliser(g: GroupElement, u: Cylinder, budget: int = DEFAULT_ID_BUDGET) -> Tri:
    """YES iff g fixes every depth-d cylinder other than u pointwise."""
    return tri_all(
        fixes_cylinder_pointwise(g, c, budget)
        for c in cylinders_at_depth(u.alphabet, u.depth)
        if c != u
    )


class GermKind(Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL_UP_TO = "nontrivial_up_to"
    NOT_IN_STABILISER = "not_in_stabiliser"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class GermVerdict:
    kind: GermKind
    depth: int | None = None

    def __str__(self):
        if self.depth is None:
            return self.kind.value
        return f"{self.kind.value}({self.depth})"


def in_neighbourhood_stabiliser(
    g: GroupElement,
    x: BoundaryPoint,
    max_depth: int = DEFAULT_MAX_DEPTH,
    budget: int = DEFAULT_ID_BUDGET,
) -> GermVerdict:
    """Least-depth witness that g fixes a cylinder around x pointwise.

    TRIVIAL(n) carries the witness depth; NONTRIVIAL_UP_TO(max_depth) means
    g stabilises x but every depth up to the bound definitely fails, which
    leaves merging at a greater depth open.
    """
    st = stabilises(g, x)
    if st is Tri.NO:
        return GermVerdict(GermKind.NOT_IN_STABILISER)
    if st is Tri.UNKNOWN:
        return GermVerdict(GermKind.UNKNOWN)
    saw_unknown = False
    for n in range(1, max_depth + 1):
        verdict = fixes_cylinder_pointwise(g, Cylinder(x.prefix(n)), budget)
        if verdict is Tri.YES:
            return GermVerdict(GermKind.TRIVIAL, n)
        if verdict is Tri.UNKNOWN:
            saw_unknown = True
    if saw_unknown:
        return GermVerdict(GermKind.UNKNOWN)
    return GermVerdict(GermKind.NONTRIVIAL_UP_TO, max_depth)


def reduced_generator_words(family: GroupFamily, max_len: int):
    """Shortlex stream of reduced words over the family's generators.

    Yields ``(word, element)`` with words over ``(name, +-1)``; inverse
    letters are omitted for generators the identity oracle confirms
    involutive, and free cancellations are skipped.
    """
    involutive = family.involutive_names()
    letters = []
    for name, g in family.generators:
        letters.append(((name, 1), g))
        if name not in involutive:
            letters.append(((name, -1), g.inverse()))

    def cancels(last, nxt):
        return last[0] == nxt[0] and (last[0] in involutive or last[1] == -nxt[1])

    frontier = [((), family.identity)]
    yield (), family.identity
    for _ in range(max_len):
        nxt_frontier = []
        for word, elem in frontier:
            for letter, gen in letters:
                if word and cancels(word[-1], letter):
                    continue
                new_word = word + (letter,)
                new_elem = elem.compose(gen)
                nxt_frontier.append((new_word, new_elem))
                yield new_word, new_elem
        frontier = nxt_frontier


@dataclass(frozen=True)
class GermClass:
    representative_word: tuple
    representative: GroupElement
    verdict: GermVerdict
    members: tuple
    provisional: bool


@dataclass(frozen=True)
class GermReport:
    point: BoundaryPoint
    classes: tuple[GermClass, ...]
    lower_bound: int
    max_word_len: int
    max_depth: int
    separations: tuple  # ((i, j, verdict), ...) for class pairs


def germ_classes(
    family: GroupFamily,
    x: BoundaryPoint,
    max_word_len: int = DEFAULT_ENUM_MAXLEN,
    max_depth: int = DEFAULT_MAX_DEPTH,
    budget: int = DEFAULT_ID_BUDGET,
) -> GermReport:
    """Partition enumerated stabiliser words by triviality of quotients.

    Words g, h fall in one class when ``g h^-1`` fixes a cylinder around x
    pointwise.  The class count is a lower bound for the germ group order:
    classes separated only by UNKNOWN verdicts are flagged provisional, and
    any NONTRIVIAL_UP_TO separation is a certificate only up to its depth.
    """
    reps: list[list] = []  # [rep_word, rep_elem, members]
    separations: dict = {}
    for word, elem in reduced_generator_words(family, max_word_len):
        if stabilises(elem, x) is not Tri.YES:
            continue
        placed = False
        quotient_verdicts = []
        for rep in reps:
            verdict = in_neighbourhood_stabiliser(
                elem.compose(rep[1].inverse()), x, max_depth, budget
            )
            if verdict.kind is GermKind.TRIVIAL:
                rep[2].append(word)
                placed = True
                break
            quotient_verdicts.append(verdict)
        if not placed:
            new_idx = len(reps)
            for idx, verdict in enumerate(quotient_verdicts):
                separations[(idx, new_idx)] = verdict
            reps.append([word, elem, [word]])
    classes = []
    for idx, (word, elem, members) in enumerate(reps):
        own = in_neighbourhood_stabiliser(elem, x, max_depth, budget)
        provisional = any(
            v.kind is GermKind.UNKNOWN
            for (i, j), v in separations.items()
            if idx in (i, j)
        )
        classes.append(GermClass(word, elem, own, tuple(members), provisional))
    return GermReport(
        point=x,
        classes=tuple(classes),
        lower_bound=len(classes),
        max_word_len=max_word_len,
        max_depth=max_depth,
        separations=tuple(sorted((i, j, v) for (i, j), v in separations.items())),
    )


def classify_point(family: GroupFamily, x: BoundaryPoint) -> PointClass:
    if family.classifier is None:
        return PointClass.NO_RULE
    return family.classifier(x)
