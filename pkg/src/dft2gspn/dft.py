"""Dynamic fault tree model, well-formedness and conventionality checks.

A tree is a DAG of typed nodes with ordered children.  Child order carries
meaning for priority gates, spares, sequence enforcers and for the trigger
position of dependencies.  Nodes are frozen after construction; analyses can
share a tree freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from . import profiles as _profiles

BE = "be"
AND = "and"
OR = "or"
VOT = "vot"
PAND = "pand"
POR = "por"
SPARE = "spare"
FDEP = "fdep"
PDEP = "pdep"
SEQ = "seq"
MUTEX = "mutex"

STATIC_GATES = (AND, OR, VOT)
PRIORITY_GATES = (PAND, POR)
GATES = STATIC_GATES + PRIORITY_GATES + (SPARE,)
DEPENDENCIES = (FDEP, PDEP)
RESTRICTORS = (SEQ, MUTEX)


@dataclass(frozen=True)
class NodeType:
    kind: str
    active_rate: Optional[float] = None     # BE
    passive_rate: Optional[float] = None    # BE; 0 encodes a cold component
    k: Optional[int] = None                 # VOT threshold
    inclusive: Optional[bool] = None        # PAND / POR variant
    p: Optional[float] = None               # PDEP forwarding probability
    claim_order: str = _profiles.ORDERED    # SPARE
    claim_mode: Optional[str] = None        # SPARE; None defers to the profile

    def __post_init__(self):
        if self.kind == BE:
            if self.active_rate is None or self.active_rate <= 0:
                raise ValueError("a basic event needs a positive active rate")
            if self.passive_rate is None or self.passive_rate < 0:
                raise ValueError("a basic event needs a nonnegative passive rate")
        if self.kind == VOT and (self.k is None or self.k < 1):
            raise ValueError("a voting gate needs a threshold k >= 1")
        if self.kind in (PAND, POR) and self.inclusive is None:
            raise ValueError(f"{self.kind} needs an inclusive/exclusive flag")
        if self.kind == PDEP and not (self.p is not None and 0.0 <= self.p <= 1.0):
            raise ValueError("a probabilistic dependency needs p in [0, 1]")

    @property
    def is_cold(self) -> bool:
        return self.kind == BE and self.passive_rate == 0.0

    @property
    def forward_probability(self) -> float:
        # A functional dependency forwards with probability one.
        if self.kind == FDEP:
            return 1.0
        if self.kind == PDEP:
            return self.p
        raise ValueError(f"{self.kind} is not a dependency")


def be(active_rate: float, passive_rate: float) -> NodeType:
    return NodeType(BE, active_rate=active_rate, passive_rate=passive_rate)


def vot(k: int) -> NodeType:
    return NodeType(VOT, k=k)


def pand(inclusive: bool = True) -> NodeType:
    return NodeType(PAND, inclusive=inclusive)


def por(inclusive: bool = True) -> NodeType:
    return NodeType(POR, inclusive=inclusive)


def spare(claim_order: str = _profiles.ORDERED, claim_mode: Optional[str] = None) -> NodeType:
    return NodeType(SPARE, claim_order=claim_order, claim_mode=claim_mode)


def pdep(p: float) -> NodeType:
    return NodeType(PDEP, p=p)


AND_T = NodeType(AND)
OR_T = NodeType(OR)
FDEP_T = NodeType(FDEP)
SEQ_T = NodeType(SEQ)
MUTEX_T = NodeType(MUTEX)


@dataclass(frozen=True)
class DftNode:
    id: int
    name: str
    type: NodeType
    children: tuple                       # node ids, order significant

    @property
    def kind(self) -> str:
        return self.type.kind


@dataclass(frozen=True)
class Issue:
    node: Optional[int]
    rule: str
    message: str

    def __str__(self) -> str:
        where = f" (node {self.node})" if self.node is not None else ""
        return f"[{self.rule}]{where} {self.message}"


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, node: Optional[int], rule: str, message: str):
        self.errors.append(Issue(node, rule, message))

    def warn(self, node: Optional[int], rule: str, message: str):
        self.warnings.append(Issue(node, rule, message))

    def extend(self, other: "ValidationReport"):
        self.errors.extend(other.errors)
        self.warnings.extend(other.warnings)

    def rules(self) -> set:
        return {i.rule for i in self.errors}


class InvalidDftError(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__("; ".join(str(i) for i in report.errors))
        self.report = report


@dataclass(frozen=True)
class Dft:
    nodes: tuple                          # DftNode, densely indexed by id
    top: int
    evidence: frozenset                   # ids of initially failed basic events

    def node(self, ident) -> DftNode:
        if isinstance(ident, str):
            return self.nodes[self._by_name()[ident]]
        return self.nodes[ident]

    def _by_name(self) -> dict:
        cached = getattr(self, "_name_cache", None)
        if cached is None:
            cached = {n.name: n.id for n in self.nodes}
            object.__setattr__(self, "_name_cache", cached)
        return cached

    def has_node(self, name: str) -> bool:
        return name in self._by_name()

    def parents(self) -> dict:
        result = {n.id: [] for n in self.nodes}
        for n in self.nodes:
            for c in n.children:
                result[c].append(n.id)
        return result

    def basic_events(self) -> list:
        return [n for n in self.nodes if n.kind == BE]

    def of_kind(self, *kinds) -> list:
        return [n for n in self.nodes if n.kind in kinds]

    def max_children(self) -> int:
        return max((len(n.children) for n in self.nodes), default=0)


def build_dft(
    raw_nodes: Sequence[tuple],
    top: str,
    evidence: Iterable[str] = (),
) -> Dft:
    """Assemble and validate a tree from (name, NodeType, child names) triples.

    All violations are collected before reporting; the caller gets either a
    well-formed Dft or an InvalidDftError carrying the full report.
    """
    report = ValidationReport()
    if not raw_nodes:
        report.error(None, "empty", "a fault tree needs at least one node")
        raise InvalidDftError(report)

    ids: dict = {}
    for i, (name, _, _) in enumerate(raw_nodes):
        if name in ids:
            report.error(i, "duplicate-name", f"node {name!r} defined twice")
        else:
            ids[name] = i

    nodes = []
    for i, (name, ntype, child_names) in enumerate(raw_nodes):
        children = []
        for cname in child_names:
            if cname not in ids:
                report.error(i, "dangling-child", f"{name!r} references unknown node {cname!r}")
            else:
                children.append(ids[cname])
        nodes.append(DftNode(id=i, name=name, type=ntype, children=tuple(children)))

    for n in nodes:
        if len(set(n.children)) != len(n.children):
            report.error(
                n.id, "duplicate-child", f"{n.name!r} lists the same child twice"
            )
        if n.kind == BE and n.children:
            report.error(n.id, "leaf-with-children", f"basic event {n.name!r} cannot have children")
        if n.kind in GATES and not n.children:
            report.error(n.id, "childless-gate", f"gate {n.name!r} has no children")
        if n.kind in RESTRICTORS and not n.children:
            report.error(n.id, "childless-gate", f"restrictor {n.name!r} has no children")
        if n.kind in DEPENDENCIES and len(n.children) < 2:
            report.error(
                n.id,
                "dependency-arity",
                f"dependency {n.name!r} needs a trigger and at least one dependent",
            )
        if n.kind == VOT and n.type.k > len(n.children):
            report.error(
                n.id,
                "vote-threshold",
                f"voting gate {n.name!r} asks for {n.type.k} of {len(n.children)} children",
            )

    cycle = _find_cycle(nodes)
    if cycle:
        names = ", ".join(nodes[i].name for i in cycle)
        for i in cycle:
            report.error(i, "cycle", f"parent-child cycle through {{{names}}}")

    if top not in ids:
        report.error(None, "missing-top", f"top event {top!r} is not defined")

    evidence_ids = set()
    for name in evidence:
        if name not in ids:
            report.error(None, "unknown-evidence", f"evidence names unknown node {name!r}")
        elif nodes[ids[name]].kind != BE:
            report.error(
                ids[name], "evidence-not-be", f"evidence {name!r} is not a basic event"
            )
        else:
            evidence_ids.add(ids[name])

    if report.errors:
        raise InvalidDftError(report)
    return Dft(nodes=tuple(nodes), top=ids[top], evidence=frozenset(evidence_ids))


def _find_cycle(nodes) -> Optional[list]:
    WHITE, GREY, BLACK = 0, 1, 2
    color = [WHITE] * len(nodes)

    for start in range(len(nodes)):
        if color[start] != WHITE:
            continue
        stack = [(start, iter(nodes[start].children))]
        color[start] = GREY
        path = [start]
        while stack:
            _, it = stack[-1]
            advanced = False
            for c in it:
                if c >= len(nodes):
                    continue
                if color[c] == GREY:
                    return path[path.index(c):]
                if color[c] == WHITE:
                    color[c] = GREY
                    stack.append((c, iter(nodes[c].children)))
                    path.append(c)
                    advanced = True
                    break
            if not advanced:
                color[path[-1]] = BLACK
                stack.pop()
                path.pop()
    return None


def spare_modules(dft: Dft) -> dict:
    """Map each spare-gate child (the module representative) to its module.

    A module is the downward closure of the representative through ordinary
    gates; spares encountered on the way belong to the module but their own
    children start fresh modules.  Dependencies and restrictors also end the
    descent: their children are referenced, not owned.
    """
    modules: dict = {}
    for sp in dft.of_kind(SPARE):
        for rep in sp.children:
            if rep in modules:
                continue     # shared representative: one module, many claimants
            module = {rep}
            stack = [rep]
            while stack:
                v = stack.pop()
                node = dft.node(v)
                if node.kind not in (AND, OR, VOT, PAND, POR):
                    continue     # BEs, nested spares, deps, restrictors end the descent
                for c in node.children:
                    if c not in module:
                        module.add(c)
                        stack.append(c)
            modules[rep] = frozenset(module)
    return modules


def validate_conventional(dft: Dft) -> ValidationReport:
    """Check the three conventionality restrictions.

    Module overlap and restrictors over gates are errors.  A dependency whose
    trigger is a gate is only a warning here; whether it is accepted depends
    on the selected semantics.
    """
    report = ValidationReport()
    modules = spare_modules(dft)
    parents = dft.parents()

    reps = sorted(modules)
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            overlap = modules[a] & modules[b]
            if overlap:
                names = ", ".join(sorted(dft.node(v).name for v in overlap))
                report.error(
                    a,
                    "module-overlap",
                    f"spare modules of {dft.node(a).name!r} and {dft.node(b).name!r} "
                    f"share {{{names}}}",
                )

    rep_set = set(reps)
    for rep in reps:
        for v in modules[rep]:
            if v == rep:
                continue
            if v in rep_set:
                continue     # nested representative starts its own module
            for p in parents[v]:
                if p not in modules[rep]:
                    report.error(
                        v,
                        "module-shared-inside",
                        f"{dft.node(v).name!r} inside the module of "
                        f"{dft.node(rep).name!r} is also used by {dft.node(p).name!r}",
                    )

    for n in dft.of_kind(SEQ, MUTEX):
        for c in n.children:
            if dft.node(c).kind != BE:
                report.error(
                    n.id,
                    "restrictor-over-gate",
                    f"all children of {n.kind} {n.name!r} must be basic events, "
                    f"but {dft.node(c).name!r} is a {dft.node(c).kind}",
                )

    for n in dft.of_kind(FDEP, PDEP):
        trigger = n.children[0]
        if dft.node(trigger).kind != BE:
            report.warn(
                n.id,
                "gate-trigger",
                f"dependency {n.name!r} is triggered by {dft.node(trigger).kind} "
                f"{dft.node(trigger).name!r}; only some semantics accept this",
            )
        for c in n.children[1:]:
            if dft.node(c).kind != BE:
                report.error(
                    n.id,
                    "dependent-not-be",
                    f"dependency {n.name!r} forwards to {dft.node(c).kind} "
                    f"{dft.node(c).name!r}; dependents must be basic events",
                )

    for sp in dft.of_kind(SPARE):
        if len(sp.children) == 1:
            report.warn(
                sp.id,
                "degenerate-spare",
                f"spare gate {sp.name!r} has a single child and degenerates to "
                f"a claiming pass-through",
            )

    return report


def _has_shared_spares(dft: Dft) -> bool:
    claimants: dict = {}
    for sp in dft.of_kind(SPARE):
        for c in sp.children:
            claimants.setdefault(c, set()).add(sp.id)
    return any(len(s) > 1 for s in claimants.values())


def _has_shared_primary(dft: Dft) -> bool:
    spares = dft.of_kind(SPARE)
    for sp in spares:
        if not sp.children:
            continue
        primary = sp.children[0]
        for other in spares:
            if other.id != sp.id and primary in other.children:
                return True
    return False


def check_profile_support(dft: Dft, profile_name: str) -> ValidationReport:
    """Reject tree features the selected semantics does not define."""
    profile = _profiles.profile_by_name(profile_name)
    report = ValidationReport()
    modules = spare_modules(dft)

    if _has_shared_spares(dft) and not profile.supports_feature(_profiles.SHARE_SPARES):
        report.error(
            None,
            "share-spares",
            f"{profile.name} does not support spare components shared between spare gates",
        )
    if any(len(m) > 1 for m in modules.values()) and not profile.supports_feature(
        _profiles.SPARE_SUBTREE
    ):
        report.error(
            None,
            "spare-with-subtree",
            f"{profile.name} only supports spare gates over single basic events",
        )
    if _has_shared_primary(dft) and not profile.supports_feature(_profiles.SHARED_PRIMARY):
        report.error(
            None,
            "shared-primary",
            f"{profile.name} does not support sharing the primary child of a spare gate",
        )
    if dft.of_kind(POR) and not profile.supports_feature(_profiles.POR_GATES):
        report.error(
            None,
            "priority-gates",
            f"{profile.name} supports priority gates: PAND only",
        )
    if any(n.type.kind == PDEP and n.type.p < 1.0 for n in dft.of_kind(PDEP)) and not (
        profile.supports_feature(_profiles.PROBABILISTIC_DEPS)
    ):
        report.error(
            None,
            "probabilistic-dependencies",
            f"{profile.name} does not support dependencies with probability < 1",
        )

    gate_triggered = [
        n for n in dft.of_kind(FDEP, PDEP) if dft.node(n.children[0]).kind != BE
    ]
    if gate_triggered and not profile.supports_feature(_profiles.DOWNWARD_DEPS):
        names = ", ".join(n.name for n in gate_triggered)
        if profile.name in ("ioimc", "monolithic-ma"):
            detail = (
                "its interpretation of simultaneous failures for gate triggers "
                "is not implemented here; use gspn-new"
            )
        else:
            detail = "it requires triggers to be basic events"
        report.error(
            None,
            "downward-dependencies",
            f"{profile.name} rejects gate-triggered dependencies ({names}): {detail}",
        )

    variants = {
        n.name: ("inclusive" if n.type.inclusive else "exclusive")
        for n in dft.of_kind(PAND, POR)
    }
    if profile.literature_variant not in ("both",):
        for name, variant in sorted(variants.items()):
            if variant != profile.literature_variant:
                report.warn(
                    dft.node(name).id,
                    "variant-mismatch",
                    f"{profile.name} literature semantics uses the "
                    f"{profile.literature_variant} priority-gate variant; keeping "
                    f"the declared {variant} variant of {name!r}",
                )
    return report
