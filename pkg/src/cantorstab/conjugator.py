"""Stagewise construction and verification of conjugating limit maps.

Given two points x, y, the builder produces a finite certificate: a nested
chain of cylinders U_i around x and V_i around y together with group
elements g_i such that g_i maps U_i onto V_i exactly, and consecutive g_i
agree outside the previous U.  Such a chain pins down a limit homeomorphism
f with f(x) = y on everything except arbitrarily small cylinders around x,
and conjugation by the g_i carries elements fixing a neighbourhood of x
pointwise to elements fixing a neighbourhood of y pointwise.

Each stage multiplies in one rigid-stabiliser element of the current V
(found by transporter search), so the correction never disturbs what
earlier stages certified.  The per-stage search aims ``transporter_margin``
levels deeper than the stage depth: families whose rigid-stabiliser orbits
are confined one level inside their cylinder (branch-type) need the image
point parked strictly inside the next stage's reachable half.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, asdict

from .space import (
    Alphabet,
    BoundaryPoint,
    Cylinder,
    CylinderRelation,
    DepthSchedule,
    Word,
    contains_point,
    cylinder_relation,
    cylinders_at_depth,
)
from .elements import GroupElement, TablePowerExceeded, Tri, UnresolvedWord
from .engine import (
    DEFAULT_ID_BUDGET,
    DEFAULT_MAX_DEPTH,
    GermKind,
    GroupFamily,
    fixes_cylinder_pointwise,
    in_neighbourhood_stabiliser,
    in_rigid_stabiliser,
    stabilises,
)
from .search import (
    EmptyRist,
    SearchBudget,
    SearchExhausted,
    minimality_witness,
    rist_generators,
    transporter,
)


class NotInNeighbourhoodStabiliser(ValueError):
    """Conjugation requires a pointwise-fixed cylinder around x within the
    certificate's depth."""


@dataclass(frozen=True)
class BuildBudgets:
    transporter: SearchBudget = SearchBudget(max_word_len=12, max_states=20000)
    rist: SearchBudget = SearchBudget(max_word_len=8, max_states=50000)
    id_budget: int = DEFAULT_ID_BUDGET
    retries: int = 3
    retry_step: int = 2

    def to_obj(self) -> dict:
        return {
            "transporter": asdict(self.transporter),
            "rist": asdict(self.rist),
            "id_budget": self.id_budget,
            "retries": self.retries,
            "retry_step": self.retry_step,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "BuildBudgets":
        return cls(
            transporter=SearchBudget(**obj["transporter"]),
            rist=SearchBudget(**obj["rist"]),
            id_budget=obj["id_budget"],
            retries=obj["retries"],
            retry_step=obj["retry_step"],
        )


@dataclass(frozen=True)
class Stage:
    index: int
    depth: int
    u: Cylinder
    v: Cylinder
    h: GroupElement
    g: GroupElement


@dataclass(frozen=True)
class ConjugatorCertificate:
    family_name: str
    alphabet: Alphabet
    x: BoundaryPoint
    y: BoundaryPoint
    stages: tuple[Stage, ...]  # stage 0 is (whole space, identity)
    budgets: BuildBudgets
    design_flags: tuple[str, ...]

    @property
    def last_depth(self) -> int:
        return self.stages[-1].depth

    @property
    def schedule(self) -> tuple[int, ...]:
        return tuple(s.depth for s in self.stages[1:])

    def stage_for_witness_depth(self, n: int) -> Stage:
        """Least stage whose depth is >= n."""
        for stage in self.stages:
            if stage.depth >= n:
                return stage
        raise NotInNeighbourhoodStabiliser(
            f"witness depth {n} exceeds certificate depth {self.last_depth}"
        )


class ConjugatorBuildError(RuntimeError):
    """Stage construction failed; carries the partial certificate."""

    def __init__(self, message: str, partial: ConjugatorCertificate, stage: int):
        super().__init__(message)
        self.partial = partial
        self.stage = stage


def build_conjugator(
    family: GroupFamily,
    x: BoundaryPoint,
    y: BoundaryPoint,
    schedule: DepthSchedule,
    budgets: BuildBudgets = BuildBudgets(),
    warn_on_nonminimal: bool = True,
) -> ConjugatorCertificate:
    """Run the stagewise induction along the depth schedule.

    Stage i finds h_i in rist(V_{i-1}) moving the current image of x onto
    the prefix of y at depth ``d_i + margin``, multiplies it in, and records
    the exact image cylinder V_i = g_i(U_i).  Transporter failures retry
    with a longer word budget before giving up.
    """
    family.alphabet.check(x.alphabet)
    family.alphabet.check(y.alphabet)
    if warn_on_nonminimal:
        probe = minimality_witness(list(family.generators), 1)
        if not probe.ok:
            warnings.warn(
                f"{family.name}: depth-1 minimality witness failed; "
                "conjugator stages may exhaust their searches"
            )
    margin = family.transporter_margin
    whole = Cylinder(Word((), family.alphabet))
    identity = family.identity
    stages = [Stage(0, 0, whole, whole, identity, identity)]
    flags = ("W_equals_V", f"target_margin={margin}")

    def fail(message, stage_index):
        partial = ConjugatorCertificate(
            family.name, family.alphabet, x, y, tuple(stages), budgets, flags
        )
        raise ConjugatorBuildError(message, partial, stage_index)

    g = identity
    for i, d in enumerate(schedule, start=1):
        v_prev = stages[-1].v
        current = g.act_point(x)
        target = y.prefix(d + margin)
        if current.prefix(len(target)) == target:
            h = identity
        else:
            try:
                gens = rist_generators(family, v_prev, budgets.rist, budgets.id_budget)
            except EmptyRist as exc:
                fail(str(exc), i)
            word_len = budgets.transporter.max_word_len
            h = None
            for attempt in range(budgets.retries + 1):
                try:
                    h = transporter(
                        gens,
                        current,
                        target,
                        SearchBudget(word_len, budgets.transporter.max_states),
                        identity=identity,
                    )
                    break
                except SearchExhausted as exc:
                    if attempt == budgets.retries:
                        fail(f"stage {i}: {exc}", i)
                    word_len += budgets.retry_step
        try:
            g = h.compose(g)
        except TablePowerExceeded as exc:
            fail(f"stage {i}: {exc}; the schedule exceeds the table capacity", i)
        u = Cylinder(x.prefix(d))
        try:
            v = Cylinder(g.act_word(u.prefix))
        except UnresolvedWord:
            fail(
                f"stage {i}: element resolution exceeds depth {d}; increase the depth step",
                i,
            )
        if not contains_point(v, y):
            fail(f"stage {i}: image cylinder {v} does not contain y", i)
        stages.append(Stage(i, d, u, v, h, g))
    return ConjugatorCertificate(
        family.name, family.alphabet, x, y, tuple(stages), budgets, flags
    )


@dataclass(frozen=True)
class CheckResult:
    stage: int
    condition: str
    status: str  # PASS / FAIL / UNKNOWN
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    results: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.status == "PASS" for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if r.status != "PASS"]


def _tri_status(t: Tri) -> str:
    return {Tri.YES: "PASS", Tri.NO: "FAIL", Tri.UNKNOWN: "UNKNOWN"}[t]


def verify_certificate(
    cert: ConjugatorCertificate, id_budget: int = DEFAULT_ID_BUDGET
) -> VerificationReport:
    """Re-derive every stage condition independently of the builder.

    Per stage: the image condition V_i = g_i(U_i) on prefixes, schedule and
    membership conditions, nesting of both cylinder chains, rigid-stabiliser
    membership of the stage correction, convergence of g_i(x) to y, and
    agreement of g_i with g_{i-1} on every depth-d_i cylinder disjoint from
    U_{i-1} (word images equal and the section quotient is the identity).
    """
    results = []
    x, y = cert.x, cert.y
    out = results.append
    stage0 = cert.stages[0]
    out(
        CheckResult(
            0,
            "base",
            _tri_status(stage0.g.is_identity(id_budget)),
            "stage 0 must be the identity on the whole space",
        )
    )
    for prev, stage in zip(cert.stages, cert.stages[1:]):
        i = stage.index
        # (depth) schedule and cylinder depths
        depth_ok = stage.depth > prev.depth and stage.u.depth == stage.depth and stage.v.depth >= stage.depth
        out(CheckResult(i, "depth", "PASS" if depth_ok else "FAIL",
                        f"d_i={stage.depth}, |U|={stage.u.depth}, |V|={stage.v.depth}"))
        # (image) V_i = g_i(U_i) as exact prefix image
        try:
            image = stage.g.act_word(stage.u.prefix)
            out(CheckResult(i, "image", "PASS" if image == stage.v.prefix else "FAIL",
                            f"g_i(U_i)=[{image}] vs V_i={stage.v}"))
        except UnresolvedWord as exc:
            out(CheckResult(i, "image", "UNKNOWN", str(exc)))
        # (membership) x in U_i, y in V_i, g_i(x) in V_i
        out(CheckResult(i, "x-in-U", "PASS" if contains_point(stage.u, x) else "FAIL"))
        out(CheckResult(i, "y-in-V", "PASS" if contains_point(stage.v, y) else "FAIL"))
        gx = stage.g.act_point(x)
        out(CheckResult(i, "gx-in-V", "PASS" if contains_point(stage.v, gx) else "FAIL"))
        # (convergence) g_i(x) matches y to the stage depth
        conv = gx.prefix(stage.depth) == y.prefix(stage.depth)
        out(CheckResult(i, "convergence", "PASS" if conv else "FAIL",
                        f"g_i(x)={gx}"))
        # (nesting) both chains decrease
        u_rel = cylinder_relation(prev.u, stage.u)
        v_rel = cylinder_relation(prev.v, stage.v)
        nest_ok = u_rel in (CylinderRelation.CONTAINS, CylinderRelation.EQUAL) and v_rel in (
            CylinderRelation.CONTAINS,
            CylinderRelation.EQUAL,
        )
        out(CheckResult(i, "nesting", "PASS" if nest_ok else "FAIL",
                        f"U: {u_rel.value}, V: {v_rel.value}"))
        # (rist) the stage correction is supported inside V_{i-1}
        out(CheckResult(i, "rist", _tri_status(in_rigid_stabiliser(stage.h, prev.v, id_budget)),
                        f"h_{i} against {prev.v}"))
        # (agreement) g_i = g_{i-1} on cylinders disjoint from U_{i-1}
        agreement = "PASS"
        detail = ""
        for c in cylinders_at_depth(cert.alphabet, stage.depth):
            if cylinder_relation(c, prev.u) is not CylinderRelation.DISJOINT:
                continue
            try:
                w_new = stage.g.act_word(c.prefix)
                w_old = prev.g.act_word(c.prefix)
                if w_new != w_old:
                    agreement, detail = "FAIL", f"images differ on {c}"
                    break
                quot = stage.g.section(c.prefix).compose(
                    prev.g.section(c.prefix).inverse()
                )
                verdict = quot.is_identity(id_budget)
                if verdict is Tri.NO:
                    agreement, detail = "FAIL", f"sections differ on {c}"
                    break
                if verdict is Tri.UNKNOWN and agreement == "PASS":
                    agreement, detail = "UNKNOWN", f"section quotient undecided on {c}"
            except UnresolvedWord as exc:
                agreement, detail = "UNKNOWN", str(exc)
        out(CheckResult(i, "agreement", agreement, detail))
    return VerificationReport(tuple(results))


@dataclass(frozen=True)
class LimitValue:
    """Image of a point under the limit map, to certified precision.

    ``exact`` images carry the stage that froze them; prefix-only values
    arise for points inside the deepest U (the limit is only pinned to the
    deepest V), and for x itself, where the limit point y is known but only
    its built prefix is certified.
    """

    exact: bool
    point: BoundaryPoint | None = None
    prefix: Word | None = None
    limit_point: BoundaryPoint | None = None
    stage_used: int | None = None


def eval_limit(cert: ConjugatorCertificate, z: BoundaryPoint) -> LimitValue:
    """Value of the limit map at z: exact once z leaves some U_N."""
    if z == cert.x:
        return LimitValue(
            exact=False,
            prefix=cert.y.prefix(cert.last_depth),
            limit_point=cert.y,
        )
    for stage in cert.stages[1:]:
        if not contains_point(stage.u, z):
            return LimitValue(
                exact=True, point=stage.g.act_point(z), stage_used=stage.index
            )
    last = cert.stages[-1]
    return LimitValue(exact=False, prefix=last.v.prefix, stage_used=last.index)


def eval_limit_inverse(cert: ConjugatorCertificate, z: BoundaryPoint) -> LimitValue:
    """Value of the inverse limit map at z; mirrors eval_limit with U and V
    exchanged and the stage elements inverted."""
    if z == cert.y:
        return LimitValue(
            exact=False,
            prefix=cert.x.prefix(cert.last_depth),
            limit_point=cert.x,
        )
    for stage in cert.stages[1:]:
        if not contains_point(stage.v, z):
            return LimitValue(
                exact=True,
                point=stage.g.inverse().act_point(z),
                stage_used=stage.index,
            )
    last = cert.stages[-1]
    return LimitValue(exact=False, prefix=last.u.prefix, stage_used=last.index)


@dataclass(frozen=True)
class ConjugationResult:
    conjugate: GroupElement
    stage_index: int
    witness_depth: int
    image_check: Tri  # conjugate fixes V_N pointwise


def conjugate_element(
    cert: ConjugatorCertificate,
    g: GroupElement,
    max_depth: int = DEFAULT_MAX_DEPTH,
    id_budget: int = DEFAULT_ID_BUDGET,
) -> ConjugationResult:
    """Conjugate an element fixing a cylinder around x pointwise through the
    certificate: c = g_N g g_N^{-1} for the least stage N covering the
    witness depth.  The result is checked to fix V_N pointwise."""
    verdict = in_neighbourhood_stabiliser(g, cert.x, max_depth, id_budget)
    if verdict.kind is not GermKind.TRIVIAL:
        raise NotInNeighbourhoodStabiliser(
            f"element has verdict {verdict} at x={cert.x}"
        )
    if verdict.depth > cert.last_depth:
        raise NotInNeighbourhoodStabiliser(
            f"witness depth {verdict.depth} exceeds certificate depth {cert.last_depth}"
        )
    stage = cert.stage_for_witness_depth(verdict.depth)
    conjugate = stage.g.compose(g).compose(stage.g.inverse())
    check = fixes_cylinder_pointwise(conjugate, stage.v, id_budget)
    return ConjugationResult(conjugate, stage.index, verdict.depth, check)


@dataclass(frozen=True)
class SuiteEntry:
    label: str
    status: str  # PASS / FAIL / UNKNOWN / SKIPPED
    detail: str = ""


@dataclass(frozen=True)
class SuiteReport:
    entries: tuple[SuiteEntry, ...]

    def counts(self) -> dict:
        out = {"PASS": 0, "FAIL": 0, "UNKNOWN": 0, "SKIPPED": 0}
        for e in self.entries:
            out[e.status] += 1
        return out

    @property
    def ok(self) -> bool:
        counts = self.counts()
        return counts["FAIL"] == 0 and counts["UNKNOWN"] == 0


def conjugation_suite(
    cert: ConjugatorCertificate,
    samples,
    max_depth: int = DEFAULT_MAX_DEPTH,
    id_budget: int = DEFAULT_ID_BUDGET,
) -> SuiteReport:
    """Push samples through the certificate and back.

    For each sample in the neighbourhood stabiliser of x: conjugate, check
    the image fixes V_N pointwise, then conjugate back and require the
    round trip to cancel exactly (identity oracle on the quotient, doubled
    budget).  Samples failing the precondition are SKIPPED, not failed.
    """
    entries = []
    for idx, g in enumerate(samples):
        label = f"sample-{idx}"
        if stabilises(g, cert.x) is not Tri.YES:
            entries.append(SuiteEntry(label, "SKIPPED", "does not stabilise x"))
            continue
        try:
            result = conjugate_element(cert, g, max_depth, id_budget)
        except NotInNeighbourhoodStabiliser as exc:
            entries.append(SuiteEntry(label, "SKIPPED", str(exc)))
            continue
        if result.image_check is not Tri.YES:
            entries.append(
                SuiteEntry(label, _tri_status(result.image_check) if result.image_check is Tri.NO else "UNKNOWN",
                           "conjugate does not fix V_N pointwise")
            )
            continue
        stage = cert.stages[result.stage_index]
        back = stage.g.inverse().compose(result.conjugate).compose(stage.g)
        roundtrip = back.compose(g.inverse()).is_identity(2 * id_budget)
        if roundtrip is Tri.YES:
            entries.append(SuiteEntry(label, "PASS", f"stage {result.stage_index}"))
        elif roundtrip is Tri.NO:
            entries.append(SuiteEntry(label, "FAIL", "round trip does not cancel"))
        else:
            entries.append(SuiteEntry(label, "UNKNOWN", "round trip undecided"))
    return SuiteReport(tuple(entries))
