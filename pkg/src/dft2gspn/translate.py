"""Compilation of fault trees into stochastic Petri nets.

Every node turns into a small net fragment (its template) speaking to the
rest of the tree only through shared interface places: Failed/Unavail/Active
per node plus Disabled per basic event.  Merging the fragments, adding the
initialisation fragment, solving the per-semantics priority constraints and
partitioning the immediate transitions yields the final net.

Template transition priorities stay symbolic (a per-node variable, plus an
optional +1 used by the probabilistic-dependency coin flip) until a
semantics profile instantiates them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from . import dft as _dft
from . import profiles as _profiles
from .gspn import Gspn, IMMEDIATE, TIMED

INIT_VAR = "init"


def failed(name: str) -> str:
    return f"Failed_{name}"


def unavail(name: str) -> str:
    return f"Unavail_{name}"


def active(name: str) -> str:
    return f"Active_{name}"


def disabled(name: str) -> str:
    return f"Disabled_{name}"


@dataclass(frozen=True)
class TemplateTransition:
    name: str
    kind: str                                  # TIMED or IMMEDIATE
    weight: float
    variable: object                           # node id or INIT_VAR
    offset: int = 0                            # coin flips run one level higher
    inputs: tuple = ()                         # ((place name, multiplicity), ...)
    outputs: tuple = ()
    inhibitors: tuple = ()
    coin_group: Optional[str] = None           # weight-coupled pair marker

    def arc_count(self) -> int:
        return len(self.inputs) + len(self.outputs) + len(self.inhibitors)


@dataclass
class Template:
    """Net fragment for one node (or the initialisation)."""

    owner: object                              # node id or INIT_VAR
    places: dict = field(default_factory=dict)           # name -> initial tokens
    aux_places: set = field(default_factory=set)         # private subset of places
    transitions: list = field(default_factory=list)

    def place(self, name: str, tokens: int = 0, aux: bool = False):
        self.places[name] = self.places.get(name, 0) + tokens
        if aux:
            self.aux_places.add(name)
        return name

    def transition(self, name, kind, weight, variable, offset=0,
                   inputs=(), outputs=(), inhibitors=(), coin_group=None):
        for pname, _ in tuple(inputs) + tuple(outputs) + tuple(inhibitors):
            self.places.setdefault(pname, 0)
        self.transitions.append(
            TemplateTransition(
                name=name,
                kind=kind,
                weight=weight,
                variable=variable,
                offset=offset,
                inputs=tuple(inputs),
                outputs=tuple(outputs),
                inhibitors=tuple(inhibitors),
                coin_group=coin_group,
            )
        )

    def stats(self) -> dict:
        timed = sum(1 for t in self.transitions if t.kind == TIMED)
        immediate = len(self.transitions) - timed
        arcs = sum(t.arc_count() for t in self.transitions)
        return {
            "aux_places": len(self.aux_places),
            "timed": timed,
            "immediate": immediate,
            "arcs": arcs,
        }


class TemplateMergeError(ValueError):
    pass


class UnsupportedFeatureError(ValueError):
    def __init__(self, report):
        super().__init__("; ".join(str(i) for i in report.errors))
        self.report = report


@dataclass
class TranslationOptions:
    claim_mode: Optional[str] = None            # overrides the profile default
    claim_order: Optional[str] = None           # overrides per-node declarations
    strict_1_bounded_unavail: bool = False


def _bidir(place: str) -> tuple:
    return ((place, 1),), ((place, 1),)


def template_for_node(
    node: _dft.DftNode,
    tree: _dft.Dft,
    claim_mode: str = _profiles.CLAIM_EARLY,
    claim_order: str = _profiles.ORDERED,
) -> Template:
    """The node's own behaviour; activation wiring is a separate template."""
    t = Template(owner=node.id)
    kind = node.kind
    children = [tree.node(c).name for c in node.children]
    F, U, A = failed(node.name), unavail(node.name), active(node.name)

    if kind == _dft.BE:
        D = disabled(node.name)
        t.transition(
            f"fail_active:{node.name}", TIMED, node.type.active_rate, node.id,
            inputs=((A, 1),),
            outputs=((A, 1), (F, 1), (U, 1)),
            inhibitors=((F, 1), (D, 1)),
        )
        if node.type.passive_rate > 0.0:
            t.transition(
                f"fail_passive:{node.name}", TIMED, node.type.passive_rate, node.id,
                outputs=((F, 1), (U, 1)),
                inhibitors=((A, 1), (F, 1), (D, 1)),
            )
        return t

    if kind == _dft.AND:
        child_arcs = tuple((failed(c), 1) for c in children)
        t.transition(
            f"fail:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=child_arcs,
            outputs=child_arcs + ((F, 1), (U, 1)),
            inhibitors=((F, 1),),
        )
        return t

    if kind == _dft.OR:
        for c in children:
            t.transition(
                f"fail_via_{c}:{node.name}", IMMEDIATE, 1.0, node.id,
                inputs=((failed(c), 1),),
                outputs=((failed(c), 1), (F, 1), (U, 1)),
                inhibitors=((F, 1),),
            )
        return t

    if kind == _dft.VOT:
        collect = t.place(f"Collect_{node.name}", aux=True)
        for i, c in enumerate(children, start=1):
            nxt = t.place(f"Next{i}_{node.name}", tokens=1, aux=True)
            t.transition(
                f"collect_{c}:{node.name}", IMMEDIATE, 1.0, node.id,
                inputs=((nxt, 1), (failed(c), 1)),
                outputs=((failed(c), 1), (collect, 1)),
            )
        t.transition(
            f"fail:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((collect, node.type.k),),
            outputs=((F, 1), (U, 1)),
            inhibitors=((F, 1),),
        )
        return t

    if kind == _dft.PAND and node.type.inclusive:
        failsafe = t.place(f"FailSafe_{node.name}", aux=True)
        for i in range(1, len(children)):
            # Child i failed while its left sibling is still operational.
            t.transition(
                f"failsafe_{children[i]}:{node.name}", IMMEDIATE, 1.0, node.id,
                inputs=((failed(children[i]), 1),),
                outputs=((failed(children[i]), 1), (failsafe, 1)),
                inhibitors=((failed(children[i - 1]), 1), (failsafe, 1)),
            )
        child_arcs = tuple((failed(c), 1) for c in children)
        t.transition(
            f"fail:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=child_arcs,
            outputs=child_arcs + ((F, 1), (U, 1)),
            inhibitors=((failsafe, 1), (F, 1)),
        )
        return t

    if kind == _dft.PAND:
        n = len(children)
        stage = [t.place(f"X{i}_{node.name}", aux=True) for i in range(1, n)]
        for i in range(1, n):
            inputs = [(failed(children[i - 1]), 1)]
            outputs = [(failed(children[i - 1]), 1), (stage[i - 1], 1)]
            inhibitors = [(failed(children[i]), 1)]
            if i == 1:
                inhibitors.append((stage[0], 1))
            else:
                inputs.append((stage[i - 2], 1))
            t.transition(
                f"stage{i}:{node.name}", IMMEDIATE, 1.0, node.id,
                inputs=tuple(inputs), outputs=tuple(outputs),
                inhibitors=tuple(inhibitors),
            )
        last = failed(children[-1])
        inputs = [(last, 1)]
        if n > 1:
            inputs.append((stage[-1], 1))
        t.transition(
            f"fail:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=tuple(inputs),
            outputs=((last, 1), (F, 1), (U, 1)),
            inhibitors=((F, 1),),
        )
        return t

    if kind == _dft.POR and node.type.inclusive:
        failsafe = t.place(f"FailSafe_{node.name}", aux=True)
        t.transition(
            f"fail:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((failed(children[0]), 1),),
            outputs=((failed(children[0]), 1), (F, 1), (U, 1)),
            inhibitors=((failsafe, 1), (F, 1)),
        )
        for c in children[1:]:
            t.transition(
                f"failsafe_{c}:{node.name}", IMMEDIATE, 1.0, node.id,
                inputs=((failed(c), 1),),
                outputs=((failed(c), 1), (failsafe, 1)),
                inhibitors=((failed(children[0]), 1), (failsafe, 1)),
            )
        return t

    if kind == _dft.POR:
        t.transition(
            f"fail:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((failed(children[0]), 1),),
            outputs=((failed(children[0]), 1), (F, 1), (U, 1)),
            inhibitors=((F, 1),) + tuple((failed(c), 1) for c in children[1:]),
        )
        return t

    if kind == _dft.SPARE:
        if claim_order == _profiles.ARBITRARY_ORDER:
            return _spare_arbitrary(t, node, children, claim_mode)
        return _spare_ordered(t, node, children, claim_mode)

    if kind == _dft.FDEP or (kind == _dft.PDEP and node.type.p == 1.0):
        _dependency_forwarding(t, node, children[0], children[1:], failed(children[0]))
        return t

    if kind == _dft.PDEP:
        if node.type.p == 0.0:
            return t            # never forwards; nothing to build
        coin = t.place(f"Coin_{node.name}", tokens=1, aux=True)
        flip = t.place(f"Flip_{node.name}", aux=True)
        forward = t.place(f"Forward_{node.name}", aux=True)
        t.transition(
            f"trigger:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((failed(children[0]), 1), (coin, 1)),
            outputs=((failed(children[0]), 1), (flip, 1)),
        )
        group = f"coin:{node.name}"
        t.transition(
            f"coin_forward:{node.name}", IMMEDIATE, node.type.p, node.id, offset=1,
            inputs=((flip, 1),), outputs=((forward, 1),), coin_group=group,
        )
        t.transition(
            f"coin_drop:{node.name}", IMMEDIATE, 1.0 - node.type.p, node.id, offset=1,
            inputs=((flip, 1),), coin_group=group,
        )
        _dependency_forwarding(t, node, children[0], children[1:], forward)
        return t

    if kind == _dft.SEQ:
        for c in children[1:]:
            t.place(disabled(c), tokens=1)
        token = None
        for i in range(1, len(children)):
            here = token if token is not None else t.place(
                f"NextTok{i + 1}_{node.name}", tokens=1, aux=True
            )
            token = (
                t.place(f"NextTok{i + 2}_{node.name}", aux=True)
                if i < len(children) - 1
                else None
            )
            outputs = [(failed(children[i - 1]), 1)]
            if token is not None:
                outputs.append((token, 1))
            t.transition(
                f"release_{children[i]}:{node.name}", IMMEDIATE, 1.0, node.id,
                inputs=((here, 1), (disabled(children[i]), 1),
                        (failed(children[i - 1]), 1)),
                outputs=tuple(outputs),
            )
        return t

    if kind == _dft.MUTEX:
        lock = t.place(f"Lock_{node.name}", tokens=1, aux=True)
        for i, c in enumerate(children):
            siblings = tuple(
                (disabled(other), 1) for j, other in enumerate(children) if j != i
            )
            t.transition(
                f"exclude_via_{c}:{node.name}", IMMEDIATE, 1.0, node.id,
                inputs=((lock, 1), (failed(c), 1)),
                outputs=((failed(c), 1),) + siblings,
            )
        return t

    raise ValueError(f"no template for node kind {kind!r}")


def _dependency_forwarding(t, node, trigger, dependents, gate_place):
    """Forwarding transitions shared by functional and resolved
    probabilistic dependencies; `gate_place` is the trigger's Failed place or
    the coin's Forward place."""
    for d in dependents:
        t.transition(
            f"forward_{d}:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((gate_place, 1),),
            outputs=((gate_place, 1), (failed(d), 1), (unavail(d), 1)),
            inhibitors=((failed(d), 1), (disabled(d), 1)),
        )


def _spare_ordered(t, node, children, claim_mode):
    F, U = failed(node.name), unavail(node.name)
    n = len(children)
    late = claim_mode in (_profiles.CLAIM_LATE, _profiles.CLAIM_LATE_EARLY_FAIL)
    early_fail = claim_mode == _profiles.CLAIM_LATE_EARLY_FAIL
    nexts = [
        t.place(f"Next{i}_{node.name}", tokens=(1 if i == 1 and not late else 0), aux=True)
        for i in range(1, n + 1)
    ]
    claimed = [t.place(f"Claimed{i}_{node.name}", aux=True) for i in range(1, n + 1)]
    guard = ((F, 1),) if early_fail else ()
    for i, c in enumerate(children):
        done = i == n - 1
        onward = ((F, 1), (U, 1)) if done else ((nexts[i + 1], 1),)
        t.transition(
            f"claim{i + 1}:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((nexts[i], 1),),
            outputs=((claimed[i], 1), (unavail(c), 1)),
            inhibitors=((unavail(c), 1),),
        )
        t.transition(
            f"unavailable{i + 1}:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((nexts[i], 1), (unavail(c), 1)),
            outputs=((unavail(c), 1),) + onward,
            inhibitors=guard if done else (),
        )
        t.transition(
            f"childfail{i + 1}:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((claimed[i], 1), (failed(c), 1)),
            outputs=((failed(c), 1),) + onward,
            inhibitors=guard if done else (),
        )
    if late:
        sleep = t.place(f"Sleep_{node.name}", tokens=1, aux=True)
        A = active(node.name)
        t.transition(
            f"start_claiming:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((sleep, 1), (A, 1)),
            outputs=((A, 1), (nexts[0], 1)),
            inhibitors=guard,
        )
    if early_fail:
        child_arcs = tuple((failed(c), 1) for c in children)
        t.transition(
            f"early_fail:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=child_arcs,
            outputs=child_arcs + ((F, 1), (U, 1)),
            inhibitors=((F, 1),),
        )
    return t


def _spare_arbitrary(t, node, children, claim_mode):
    F, U = failed(node.name), unavail(node.name)
    late = claim_mode in (_profiles.CLAIM_LATE, _profiles.CLAIM_LATE_EARLY_FAIL)
    early_fail = claim_mode == _profiles.CLAIM_LATE_EARLY_FAIL
    nxt = t.place(f"Next_{node.name}", tokens=(0 if late else 1), aux=True)
    guard = ((F, 1),) if early_fail else ()
    for i, c in enumerate(children, start=1):
        claimed = t.place(f"Claimed{i}_{node.name}", aux=True)
        t.transition(
            f"claim{i}:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((nxt, 1),),
            outputs=((claimed, 1), (unavail(c), 1)),
            inhibitors=((unavail(c), 1),),
        )
        t.transition(
            f"childfail{i}:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((claimed, 1), (failed(c), 1)),
            outputs=((failed(c), 1), (nxt, 1)),
        )
    unavail_arcs = tuple((unavail(c), 1) for c in children)
    t.transition(
        f"unavailable:{node.name}", IMMEDIATE, 1.0, node.id,
        inputs=((nxt, 1),) + unavail_arcs,
        outputs=unavail_arcs + ((F, 1), (U, 1)),
        inhibitors=guard,
    )
    if late:
        sleep = t.place(f"Sleep_{node.name}", tokens=1, aux=True)
        A = active(node.name)
        t.transition(
            f"start_claiming:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=((sleep, 1), (A, 1)),
            outputs=((A, 1), (nxt, 1)),
            inhibitors=guard,
        )
    if early_fail:
        child_arcs = tuple((failed(c), 1) for c in children)
        t.transition(
            f"early_fail:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=child_arcs,
            outputs=child_arcs + ((F, 1), (U, 1)),
            inhibitors=((F, 1),),
        )
    return t


def activation_template(node: _dft.DftNode, tree: _dft.Dft) -> Optional[Template]:
    """Top-down activation wiring: gates hand activation to each child; a
    spare additionally requires the child to be currently claimed."""
    if node.kind not in (_dft.AND, _dft.OR, _dft.VOT, _dft.PAND, _dft.POR, _dft.SPARE):
        return None
    t = Template(owner=node.id)
    A = active(node.name)
    for i, c in enumerate(node.children, start=1):
        child = tree.node(c).name
        inputs = [(A, 1)]
        outputs = [(A, 1), (active(child), 1)]
        if node.kind == _dft.SPARE:
            claimed = f"Claimed{i}_{node.name}"
            inputs.append((claimed, 1))
            outputs.append((claimed, 1))
        t.transition(
            f"activate_{child}:{node.name}", IMMEDIATE, 1.0, node.id,
            inputs=tuple(inputs),
            outputs=tuple(outputs),
            inhibitors=((active(child), 1),),
        )
    return t


def template_init(tree: _dft.Dft) -> Template:
    """Fires once and first: starts activation at the top and injects the
    initially failed basic events."""
    t = Template(owner=INIT_VAR)
    init = t.place("Init", tokens=1, aux=True)
    evid = t.place("Evidence", aux=True)
    t.transition(
        "init", IMMEDIATE, 1.0, INIT_VAR,
        inputs=((init, 1),),
        outputs=((active(tree.node(tree.top).name), 1), (evid, 1)),
    )
    t.transition(
        "set_evidence", IMMEDIATE, 1.0, INIT_VAR,
        inputs=((evid, 1),),
        outputs=tuple((failed(tree.node(e).name), 1) for e in sorted(tree.evidence)),
    )
    return t


@dataclass
class MergedTemplate:
    places: list                     # (name, tokens) in deterministic order
    transitions: list                # TemplateTransition

    def canonical_form(self) -> tuple:
        places = tuple(sorted(self.places))
        transitions = tuple(
            sorted(
                (
                    tr.name, tr.kind, tr.weight, str(tr.variable), tr.offset,
                    tuple(sorted(tr.inputs)), tuple(sorted(tr.outputs)),
                    tuple(sorted(tr.inhibitors)), tr.coin_group,
                )
                for tr in self.transitions
            )
        )
        return (places, transitions)


def merge_templates(templates: Sequence[Template]) -> MergedTemplate:
    """Union places by name (initial markings add up), keep transitions
    disjoint.  Auxiliary places of different owners must not collide."""
    if not templates:
        raise TemplateMergeError("cannot merge an empty set of templates")
    aux_owner: dict = {}
    tokens: dict = {}
    order: list = []
    transitions: list = []
    names: set = set()
    for t in templates:
        for name in t.aux_places:
            owner = aux_owner.get(name)
            if owner is not None and owner != t.owner:
                raise TemplateMergeError(
                    f"auxiliary place {name!r} appears in templates of two nodes"
                )
            aux_owner[name] = t.owner
        for name, count in t.places.items():
            if name not in tokens:
                tokens[name] = 0
                order.append(name)
            tokens[name] += count
        for tr in t.transitions:
            if tr.name in names:
                raise TemplateMergeError(f"duplicate transition name {tr.name!r}")
            names.add(tr.name)
            transitions.append(tr)
    return MergedTemplate(
        places=[(name, tokens[name]) for name in order],
        transitions=transitions,
    )


@dataclass(frozen=True)
class Constraint:
    relation: str            # "lt", "le", "eq"
    a: object
    b: object


@dataclass
class PriorityConstraintSet:
    variables: set
    constraints: list

    def holds(self, assignment: Mapping) -> bool:
        for c in self.constraints:
            va, vb = assignment[c.a], assignment[c.b]
            if c.relation == "lt" and not va < vb:
                return False
            if c.relation == "le" and not va <= vb:
                return False
            if c.relation == "eq" and va != vb:
                return False
        return True


class UnsatisfiablePrioritiesError(ValueError):
    def __init__(self, cycle, names=None):
        shown = ", ".join(names) if names else ", ".join(map(str, cycle))
        super().__init__(
            f"priority constraints are unsatisfiable: the cycle through "
            f"{{{shown}}} would need a priority strictly above itself"
        )
        self.cycle = list(cycle)
        self.names = list(names or [])


def generate_priority_constraints(
    tree: _dft.Dft, profile: _profiles.SemanticsProfile
) -> PriorityConstraintSet:
    """One variable per node; the init variable is handled separately by
    instantiation (always strictly above everything)."""
    cs: list = []
    variables = {n.id for n in tree.nodes}
    deps = tree.of_kind(_dft.FDEP, _dft.PDEP)
    dep_ids = {n.id for n in deps}

    if profile.propagation == _profiles.ARBITRARY:
        ids = sorted(variables)
        for a, b in zip(ids, ids[1:]):
            cs.append(Constraint("eq", a, b))
        return PriorityConstraintSet(variables, cs)

    for n in tree.of_kind(*_dft.GATES):
        relation = "le" if (
            profile.static_nonstrict and n.kind in (_dft.AND, _dft.OR)
        ) else "lt"
        for c in n.children:
            cs.append(Constraint(relation, n.id, c))

    for n in tree.of_kind(*_dft.RESTRICTORS):
        if profile.fdep_order == _profiles.FDEP_LOCAL:
            # Dependent-style: restrictions resolve no later than the
            # restricted events, but only after dependency forwarding.
            for c in n.children:
                cs.append(Constraint("le", c, n.id))
            for f in deps:
                if set(f.children[1:]) & set(n.children):
                    cs.append(Constraint("le", n.id, f.id))
        else:
            for c in n.children:
                cs.append(Constraint("lt", n.id, c))

    for f in deps:
        if profile.fdep_order == _profiles.FDEP_FIRST:
            for v in sorted(variables - dep_ids):
                cs.append(Constraint("lt", v, f.id))
        elif profile.fdep_order == _profiles.FDEP_LAST:
            for v in sorted(variables - dep_ids):
                cs.append(Constraint("lt", f.id, v))
        elif profile.fdep_order == _profiles.FDEP_LOCAL:
            cs.append(Constraint("le", f.id, f.children[0]))
            for d in f.children[1:]:
                cs.append(Constraint("le", d, f.id))
    return PriorityConstraintSet(variables, cs)


def solve_priorities(constraints: PriorityConstraintSet) -> dict:
    """Assign positive integers satisfying every constraint.

    Equalities collapse variables into classes; <= and < become 0- and
    1-weighted edges of a digraph.  A cycle of positive total weight proves
    unsatisfiability and is reported; otherwise each class gets one plus its
    longest-path distance from a virtual source.
    """
    parent: dict = {v: v for v in constraints.variables}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in constraints.constraints:
        if c.relation == "eq":
            ra, rb = find(c.a), find(c.b)
            if ra != rb:
                parent[ra] = rb

    members: dict = {}
    for v in constraints.variables:
        members.setdefault(find(v), []).append(v)

    edges: dict = {r: {} for r in members}
    for c in constraints.constraints:
        if c.relation == "eq":
            continue
        w = 1 if c.relation == "lt" else 0
        a, b = find(c.a), find(c.b)
        if a == b:
            if w == 1:
                raise UnsatisfiablePrioritiesError(members[a])
            continue
        if edges[a].get(b, -1) < w:
            edges[a][b] = w

    order, cycle = _topological_order(members, edges)
    if cycle is not None:
        cycle_members = [v for r in cycle for v in sorted(members[r])]
        raise UnsatisfiablePrioritiesError(cycle_members)

    dist = {r: 0 for r in members}
    for r in order:
        for b, w in edges[r].items():
            if dist[r] + w > dist[b]:
                dist[b] = dist[r] + w

    assignment = {}
    for r, vs in members.items():
        for v in vs:
            assignment[v] = 1 + dist[r]
    if not constraints.holds(assignment):
        raise AssertionError("solver produced an assignment violating its input")
    return assignment


def _topological_order(members, edges):
    """Kahn ordering over equality classes; on failure return a remaining
    cycle (which necessarily contains a strict edge or it would have been
    contracted away)."""
    indeg = {r: 0 for r in members}
    for a in edges:
        for b in edges[a]:
            indeg[b] += 1
    queue = sorted(r for r in members if indeg[r] == 0)
    order = []
    while queue:
        r = queue.pop(0)
        order.append(r)
        for b in sorted(edges[r]):
            indeg[b] -= 1
            if indeg[b] == 0:
                queue.append(b)
        queue.sort()
    if len(order) == len(members):
        return order, None
    # Strip leftover classes without successors inside the leftover set so a
    # forward walk from any survivor is guaranteed to close a cycle.
    remaining = {r for r in members if r not in set(order)}
    changed = True
    while changed:
        changed = False
        for r in sorted(remaining):
            if not any(b in remaining for b in edges[r]):
                remaining.discard(r)
                changed = True
    start = sorted(remaining)[0]
    path, seen = [start], {start}
    while True:
        nxt = sorted(b for b in edges[path[-1]] if b in remaining)[0]
        if nxt in seen:
            return None, path[path.index(nxt):]
        path.append(nxt)
        seen.add(nxt)


def resolve_claiming(tree, profile, options):
    """Per-spare claim mode and order after applying overrides."""
    resolved = {}
    for sp in tree.of_kind(_dft.SPARE):
        mode = sp.type.claim_mode or options.claim_mode or profile.default_claim_mode
        order = options.claim_order or sp.type.claim_order
        resolved[sp.id] = (mode, order)
    return resolved


def build_templates(tree: _dft.Dft, profile, options) -> list:
    claiming = resolve_claiming(tree, profile, options)
    templates = []
    base = Template(owner="interface")
    for n in tree.nodes:
        base.place(failed(n.name))
        base.place(unavail(n.name))
        base.place(active(n.name))
        if n.kind == _dft.BE:
            base.place(disabled(n.name))
    templates.append(base)
    for n in tree.nodes:
        mode, order = claiming.get(n.id, (_profiles.CLAIM_EARLY, _profiles.ORDERED))
        templates.append(template_for_node(n, tree, claim_mode=mode, claim_order=order))
        act = activation_template(n, tree)
        if act is not None:
            templates.append(act)
    templates.append(template_init(tree))
    if options.strict_1_bounded_unavail:
        templates = _apply_strict_unavail(tree, templates)
    return templates


def _apply_strict_unavail(tree, templates):
    """Replace direct Unavail outputs by a guarded per-node transition, so
    claimed-and-failed components keep a single unavailability token."""
    adapted = []
    needs_guard: set = set()
    for t in templates:
        fresh = Template(owner=t.owner, places=dict(t.places),
                         aux_places=set(t.aux_places))
        for tr in t.transitions:
            drop = []
            for place, _ in tr.outputs:
                if not place.startswith("Unavail_"):
                    continue
                if any(p == place for p, _ in tr.inhibitors):
                    continue     # claim-style outputs are already guarded
                drop.append(place)
            if drop:
                fresh.transitions.append(
                    replace(
                        tr,
                        outputs=tuple(
                            (p, m) for p, m in tr.outputs if p not in drop
                        ),
                    )
                )
                for place in drop:
                    needs_guard.add(place[len("Unavail_"):])
            else:
                fresh.transitions.append(tr)
        adapted.append(fresh)
    guards = Template(owner="strict-unavail")
    for name in sorted(needs_guard):
        node = tree.node(name)
        guards.transition(
            f"mark_unavail:{name}", IMMEDIATE, 1.0, node.id,
            inputs=((failed(name), 1),),
            outputs=((failed(name), 1), (unavail(name), 1)),
            inhibitors=((unavail(name), 1),),
        )
    adapted.append(guards)
    return adapted


def instantiate(
    merged: MergedTemplate,
    assignment: Mapping,
    partitioning: str,
) -> Gspn:
    """Replace priority variables by their solved values, give the init
    transitions a priority strictly above everything, and partition the
    immediate transitions."""
    regular_max = 0
    for tr in merged.transitions:
        if tr.kind == IMMEDIATE and tr.variable != INIT_VAR:
            regular_max = max(regular_max, assignment[tr.variable] + tr.offset)
    init_priority = max(regular_max, max(assignment.values(), default=0)) + 1

    specs = []
    coin_partitions: dict = {}
    next_partition = 1 if partitioning == _profiles.ALL_IN_ONE else 0
    for tr in merged.transitions:
        if tr.kind == TIMED:
            priority, partition = 0, None
        else:
            priority = (
                init_priority
                if tr.variable == INIT_VAR
                else assignment[tr.variable] + tr.offset
            )
            if tr.coin_group is not None:
                if tr.coin_group not in coin_partitions:
                    coin_partitions[tr.coin_group] = next_partition
                    next_partition += 1
                partition = coin_partitions[tr.coin_group]
            elif partitioning == _profiles.ALL_IN_ONE:
                partition = 0
            else:
                partition = next_partition
                next_partition += 1
        specs.append(
            {
                "name": tr.name,
                "kind": tr.kind,
                "weight": tr.weight,
                "priority": priority,
                "partition": partition,
                "inputs": dict(tr.inputs),
                "outputs": dict(tr.outputs),
                "inhibitors": dict(tr.inhibitors),
            }
        )
    return Gspn(places=merged.places, transitions=specs)


def translate(
    tree: _dft.Dft,
    profile,
    options: Optional[TranslationOptions] = None,
    enforce_gating: bool = True,
) -> Gspn:
    """Full pipeline: conventionality and profile gating, templates, priority
    solving, partitioning, merge.

    `enforce_gating=False` skips the per-profile feature matrix (but never
    the conventionality check); the priority/partition mechanics are defined
    for any conventional tree, which lets the curious evaluate a semantics on
    trees its original tooling would refuse.
    """
    if isinstance(profile, str):
        profile = _profiles.profile_by_name(profile)
    options = options or TranslationOptions()

    conventional = _dft.validate_conventional(tree)
    if not conventional.ok:
        raise _dft.InvalidDftError(conventional)
    if enforce_gating:
        support = _dft.check_profile_support(tree, profile.name)
        if not support.ok:
            raise UnsupportedFeatureError(support)

    templates = build_templates(tree, profile, options)
    merged = merge_templates(templates)
    constraints = generate_priority_constraints(tree, profile)
    try:
        assignment = solve_priorities(constraints)
    except UnsatisfiablePrioritiesError as exc:
        raise UnsatisfiablePrioritiesError(
            exc.cycle, names=[tree.node(v).name for v in exc.cycle]
        ) from None
    return instantiate(merged, assignment, profile.partitioning)
