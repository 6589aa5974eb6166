"""Generalised stochastic Petri nets and their exact execution semantics.

A net has exponentially timed transitions (priority 0) and weighted immediate
transitions (priority >= 1).  Immediate transitions are grouped into
partitions: conflicts inside one partition resolve probabilistically by
weight, conflicts across partitions resolve nondeterministically.  Inhibitor
arcs with multiplicity h let a transition fire only while the place holds
fewer than h tokens; an absent inhibitor arc never constrains.

Markings are stored as fixed-width byte strings, one token counter per place,
so they hash cheaply and exploration order cannot leak into state identity.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

TIMED = "timed"
IMMEDIATE = "immediate"

Marking = bytes


class GspnDefinitionError(ValueError):
    """The net violates a structural invariant of the GSPN definition."""


class NotEnabledError(ValueError):
    """fire() was asked to fire a transition without concession or priority."""


class StateLimitExceeded(RuntimeError):
    def __init__(self, limit: int, frontier: int):
        super().__init__(
            f"marking graph exceeds the state limit of {limit} "
            f"(frontier still holds {frontier} unexplored markings)"
        )
        self.limit = limit
        self.frontier = frontier


class TokenOverflowError(RuntimeError):
    """A place accumulated more tokens than the byte-vector encoding allows."""


@dataclass(frozen=True)
class Transition:
    index: int
    name: str
    kind: str                       # TIMED or IMMEDIATE
    weight: float                   # rate for timed, weight for immediate
    priority: int                   # 0 for timed, >= 1 for immediate
    partition: Optional[int]        # partition id; None for timed
    inputs: tuple                   # ((place_index, multiplicity), ...)
    outputs: tuple
    inhibitors: tuple


class Gspn:
    """Immutable net: places with an initial marking plus transitions."""

    def __init__(self, places, transitions):
        """places: sequence of (name, initial_tokens).

        transitions: sequence of dicts with keys name, kind, weight,
        priority, partition, inputs, outputs, inhibitors, where the arc
        maps are {place name: multiplicity}.
        """
        self.place_names: tuple = tuple(name for name, _ in places)
        if len(set(self.place_names)) != len(self.place_names):
            raise GspnDefinitionError("duplicate place name")
        self._place_index = {name: i for i, name in enumerate(self.place_names)}
        initial = [int(tokens) for _, tokens in places]
        if any(t < 0 or t > 255 for t in initial):
            raise GspnDefinitionError("initial token counts must be in 0..255")
        self.initial_marking: Marking = bytes(initial)

        built = []
        partitions = {}
        for i, spec in enumerate(transitions):
            kind = spec["kind"]
            weight = float(spec["weight"])
            priority = int(spec["priority"])
            partition = spec.get("partition")
            if kind == TIMED:
                if priority != 0:
                    raise GspnDefinitionError(
                        f"timed transition {spec['name']!r} must have priority 0"
                    )
                if partition is not None:
                    raise GspnDefinitionError(
                        f"timed transition {spec['name']!r} cannot be in a partition"
                    )
            elif kind == IMMEDIATE:
                if priority < 1:
                    raise GspnDefinitionError(
                        f"immediate transition {spec['name']!r} must have priority >= 1"
                    )
                if partition is None:
                    raise GspnDefinitionError(
                        f"immediate transition {spec['name']!r} missing a partition id"
                    )
                partitions.setdefault(partition, []).append(i)
            else:
                raise GspnDefinitionError(f"unknown transition kind {kind!r}")
            if weight <= 0.0:
                raise GspnDefinitionError(
                    f"transition {spec['name']!r} needs a positive weight"
                )
            built.append(
                Transition(
                    index=i,
                    name=spec["name"],
                    kind=kind,
                    weight=weight,
                    priority=priority,
                    partition=partition,
                    inputs=self._arcs(spec.get("inputs") or {}),
                    outputs=self._arcs(spec.get("outputs") or {}),
                    inhibitors=self._arcs(spec.get("inhibitors") or {}),
                )
            )
        self.transitions: tuple = tuple(built)
        self.partitions: dict = {pid: tuple(ts) for pid, ts in partitions.items()}

    def _arcs(self, mapping: Mapping[str, int]) -> tuple:
        arcs = []
        for name, mult in mapping.items():
            if name not in self._place_index:
                raise GspnDefinitionError(f"arc references unknown place {name!r}")
            mult = int(mult)
            if mult <= 0:
                # "No arc" is encoded by absence; reject zeros so template
                # bugs surface early.
                raise GspnDefinitionError(f"arc to {name!r} has multiplicity {mult}")
            arcs.append((self._place_index[name], mult))
        arcs.sort()
        return tuple(arcs)

    def place_index(self, name: str) -> int:
        return self._place_index[name]

    def has_place(self, name: str) -> bool:
        return name in self._place_index

    def marking_of(self, tokens: Mapping[str, int]) -> Marking:
        m = [0] * len(self.place_names)
        for name, count in tokens.items():
            m[self._place_index[name]] = count
        return bytes(m)

    def tokens(self, m: Marking, name: str) -> int:
        return m[self._place_index[name]]

    def describe_marking(self, m: Marking) -> str:
        parts = [
            f"{self.place_names[i]}:{count}" for i, count in enumerate(m) if count
        ]
        return "{" + ", ".join(parts) + "}"


def conceded(net: Gspn, m: Marking) -> list:
    """Transition indices whose input tokens are present and inhibitors clear."""
    if len(m) != len(net.place_names):
        raise ValueError("marking length does not match the net")
    result = []
    for t in net.transitions:
        if all(m[p] >= k for p, k in t.inputs) and all(
            m[p] < k for p, k in t.inhibitors
        ):
            result.append(t.index)
    return result


def enabled(net: Gspn, m: Marking) -> list:
    """Conceded transitions of maximal priority.

    Because immediate transitions carry priority >= 1 and timed ones 0, any
    conceded immediate transition starves all timed ones.
    """
    conc = conceded(net, m)
    if not conc:
        return []
    top = max(net.transitions[t].priority for t in conc)
    return [t for t in conc if net.transitions[t].priority == top]


def fire(net: Gspn, m: Marking, t: int) -> Marking:
    if t not in enabled(net, m):
        raise NotEnabledError(
            f"transition {net.transitions[t].name!r} is not enabled in "
            f"{net.describe_marking(m)}"
        )
    out = bytearray(m)
    for p, k in net.transitions[t].inputs:
        out[p] -= k
    for p, k in net.transitions[t].outputs:
        out[p] += k
        if out[p] > 255:
            raise TokenOverflowError(
                f"place {net.place_names[p]!r} exceeded 255 tokens"
            )
    return bytes(out)


@dataclass
class MarkingGraph:
    net: Gspn
    states: list                    # list[Marking]
    edges: list                     # list[(source, transition, target)]
    out_edges: list                 # per state, list of edge indices
    vanishing: list                 # per state, True iff an immediate is enabled
    initial: int = 0
    unbounded_hint: Optional[tuple] = None   # (state, dominated ancestor state)

    def state_index(self, m: Marking) -> int:
        return self.states.index(m)

    @property
    def tangible_states(self) -> list:
        return [i for i, v in enumerate(self.vanishing) if not v]

    def canonical_form(self) -> tuple:
        """Order-independent fingerprint used for isomorphism comparisons."""
        order = sorted(range(len(self.states)), key=lambda i: self.states[i])
        rank = {old: new for new, old in enumerate(order)}
        states = tuple(self.states[i] for i in order)
        edges = tuple(sorted((rank[s], t, rank[d]) for s, t, d in self.edges))
        return (states, edges, rank[self.initial])


def build_marking_graph(net: Gspn, state_limit: int = 1_000_000) -> MarkingGraph:
    """BFS closure of fire() over enabled() from the initial marking.

    States are deduplicated by their byte encoding; exploration visits
    transitions in index order, so the result is a pure function of the net.
    Raises StateLimitExceeded past `state_limit` markings.
    """
    states = [net.initial_marking]
    index = {net.initial_marking: 0}
    parents = {0: None}
    edges: list = []
    out_edges: list = [[]]
    vanishing: list = [False]
    unbounded_hint = None

    queue = deque([0])
    while queue:
        s = queue.popleft()
        m = states[s]
        for t in enabled(net, m):
            if net.transitions[t].kind == IMMEDIATE:
                vanishing[s] = True
            m2 = fire(net, m, t)
            if m2 not in index:
                if len(states) >= state_limit:
                    raise StateLimitExceeded(state_limit, len(queue) + 1)
                index[m2] = len(states)
                states.append(m2)
                out_edges.append([])
                vanishing.append(False)
                parents[index[m2]] = s
                queue.append(index[m2])
                if unbounded_hint is None and sum(m2) > sum(m):
                    dominated = _dominated_ancestor(states, parents, index[m2], m2)
                    if dominated is not None:
                        unbounded_hint = (index[m2], dominated)
            edges.append((s, t, index[m2]))
            out_edges[s].append(len(edges) - 1)
    return MarkingGraph(
        net=net,
        states=states,
        edges=edges,
        out_edges=out_edges,
        vanishing=vanishing,
        initial=0,
        unbounded_hint=unbounded_hint,
    )


def _dominated_ancestor(states, parents, state, m, max_walk: int = 64):
    """Ancestor whose marking is strictly dominated by m, if any nearby.

    Strict domination of an ancestor on the exploration path is a cheap
    heuristic witness for unbounded growth (the generating cycle can pump).
    """
    seen = 0
    a = parents.get(state)
    while a is not None and seen < max_walk:
        ma = states[a]
        if all(x >= y for x, y in zip(m, ma)) and m != ma:
            return a
        a = parents.get(a)
        seen += 1
    return None


def check_bounded(graph: MarkingGraph, k: int, places: Optional[Iterable[int]] = None):
    """None if every reachable marking keeps the places at <= k tokens,
    otherwise the first (state, place) witness in exploration order."""
    wanted = list(places) if places is not None else range(len(graph.net.place_names))
    for s, m in enumerate(graph.states):
        for p in wanted:
            if m[p] > k:
                return (s, p)
    return None


def detect_time_trap(graph: MarkingGraph):
    """A cycle consisting solely of immediate edges, or None.

    Returns the cycle as a list of edge indices.
    """
    adj: dict = {}
    for idx, (s, t, d) in enumerate(graph.edges):
        if graph.net.transitions[t].kind == IMMEDIATE:
            adj.setdefault(s, []).append((d, idx))

    WHITE, GREY, BLACK = 0, 1, 2
    color = {s: WHITE for s in adj}

    def dfs(start):
        stack = [(start, iter(adj.get(start, ())))]
        color[start] = GREY
        path = [start]
        while stack:
            node, it = stack[-1]
            advanced = False
            for d, idx in it:
                if color.get(d, BLACK) == GREY:
                    cut = path.index(d)
                    cycle = []
                    for i in range(cut, len(path) - 1):
                        for dd, ii in adj[path[i]]:
                            if dd == path[i + 1]:
                                cycle.append(ii)
                                break
                    cycle.append(idx)
                    return cycle
                if color.get(d, BLACK) == WHITE:
                    color[d] = GREY
                    stack.append((d, iter(adj.get(d, ()))))
                    path.append(d)
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
                path.pop()
        return None

    for s in sorted(adj):
        if color[s] == WHITE:
            cycle = dfs(s)
            if cycle is not None:
                return cycle
    return None


def check_fire_once(graph: MarkingGraph):
    """None if no path from the initial state fires the same transition twice,
    otherwise a witness path (list of edge indices) ending in the repetition."""
    # Edges on a cycle repeat trivially; otherwise look for a transition with
    # two occurrences where the first occurrence's target reaches the second.
    reach_cache: dict = {}

    def reaches(src: int, dst: int) -> bool:
        if src == dst:
            return True
        if src not in reach_cache:
            seen = {src}
            q = deque([src])
            while q:
                u = q.popleft()
                for e in graph.out_edges[u]:
                    v = graph.edges[e][2]
                    if v not in seen:
                        seen.add(v)
                        q.append(v)
            reach_cache[src] = seen
        return dst in reach_cache[src]

    by_transition: dict = {}
    for idx, (s, t, d) in enumerate(graph.edges):
        by_transition.setdefault(t, []).append(idx)
    for t, occurrences in sorted(by_transition.items()):
        for e1 in occurrences:
            for e2 in occurrences:
                _, _, d1 = graph.edges[e1]
                s2, _, _ = graph.edges[e2]
                if reaches(d1, s2):
                    return _witness_path(graph, e1, e2)
    return None


def _witness_path(graph: MarkingGraph, first_edge: int, second_edge: int) -> list:
    prefix = _edge_path(graph, graph.initial, graph.edges[first_edge][0])
    middle = _edge_path(graph, graph.edges[first_edge][2], graph.edges[second_edge][0])
    return prefix + [first_edge] + middle + [second_edge]


def _edge_path(graph: MarkingGraph, src: int, dst: int) -> list:
    if src == dst:
        return []
    back = {src: None}
    q = deque([src])
    while q:
        u = q.popleft()
        for e in graph.out_edges[u]:
            v = graph.edges[e][2]
            if v not in back:
                back[v] = e
                if v == dst:
                    path = []
                    while back[v] is not None:
                        path.append(back[v])
                        v = graph.edges[back[v]][0]
                    return path[::-1]
                q.append(v)
    raise AssertionError("no path between supposedly connected states")


def check_monotone(graph: MarkingGraph, places: Iterable[int]):
    """Verify the once-marked-stays-marked property for the given places.

    Returns None or a (edge index, place index) witness where firing dropped
    an occupied place back to zero.
    """
    wanted = tuple(places)
    for idx, (s, _, d) in enumerate(graph.edges):
        ms, md = graph.states[s], graph.states[d]
        for p in wanted:
            if ms[p] >= 1 and md[p] < 1:
                return (idx, p)
    return None
