"""From marking graphs to Markov automata, CTMCs and measures.

Vanishing markings (at least one immediate transition enabled) branch
instantaneously: enabled immediate transitions grouped by partition form the
nondeterministic choices, and inside one choice the transition weights give
the probabilities.  Tangible markings race their timed transitions
exponentially.  A deterministic automaton (one choice everywhere) collapses
to a CTMC by redistributing rates through the vanishing layers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .gspn import Gspn, IMMEDIATE, Marking, MarkingGraph, TIMED


@dataclass
class MarkovAutomaton:
    n_states: int
    initial: int
    goal: frozenset                    # states whose marking satisfies the predicate
    vanishing: list                    # per state flag
    choices: list                      # per vanishing state: [ [(prob, target)], ... ]
    markovian: list                    # per tangible state: [(rate, target), ...]
    markings: list                     # per state, for diagnostics

    def is_goal(self, state: int) -> bool:
        return state in self.goal


@dataclass
class Ctmc:
    states: list                       # marking-graph state ids, tangible only
    initial_distribution: dict         # state -> probability
    rates: dict                        # state -> [(rate, state), ...]
    goal: frozenset

    def exit_rate(self, s) -> float:
        return sum(r for r, _ in self.rates.get(s, ()))


class NondeterministicModelError(ValueError):
    pass


def goal_failed_top(net: Gspn, tree, node_name: Optional[str] = None) -> Callable:
    """Predicate: the named node's Failed place holds a token (top by default)."""
    name = node_name if node_name is not None else tree.node(tree.top).name
    idx = net.place_index(f"Failed_{name}")
    return lambda marking: marking[idx] >= 1


def extract_ma(graph: MarkingGraph, net: Gspn, goal_predicate: Callable) -> MarkovAutomaton:
    n = len(graph.states)
    choices: list = [None] * n
    markovian: list = [None] * n
    goal = frozenset(i for i, m in enumerate(graph.states) if goal_predicate(m))

    for s in range(n):
        if graph.vanishing[s]:
            by_partition: dict = {}
            for e in graph.out_edges[s]:
                _, t, d = graph.edges[e]
                tr = net.transitions[t]
                by_partition.setdefault(tr.partition, []).append((tr.weight, d))
            state_choices = []
            for partition in sorted(by_partition):
                entries = by_partition[partition]
                total = sum(w for w, _ in entries)
                state_choices.append([(w / total, d) for w, d in entries])
            choices[s] = state_choices
        else:
            markovian[s] = [
                (net.transitions[t].weight, d)
                for e in graph.out_edges[s]
                for _, t, d in [graph.edges[e]]
            ]
    return MarkovAutomaton(
        n_states=n,
        initial=graph.initial,
        goal=goal,
        vanishing=list(graph.vanishing),
        choices=choices,
        markovian=markovian,
        markings=list(graph.states),
    )


def is_deterministic(ma: MarkovAutomaton) -> bool:
    return all(
        not v or len(ma.choices[s]) == 1 for s, v in enumerate(ma.vanishing)
    )


def _successors(ma: MarkovAutomaton, s: int):
    if ma.vanishing[s]:
        for choice in ma.choices[s]:
            for _, d in choice:
                yield d
    else:
        for _, d in ma.markovian[s]:
            yield d


def _topological_order(ma: MarkovAutomaton):
    """Reverse-topological state order, or None if the automaton has cycles."""
    indeg = [0] * ma.n_states
    for s in range(ma.n_states):
        for d in _successors(ma, s):
            indeg[d] += 1
    queue = [s for s in range(ma.n_states) if indeg[s] == 0]
    order = []
    while queue:
        s = queue.pop()
        order.append(s)
        for d in _successors(ma, s):
            indeg[d] -= 1
            if indeg[d] == 0:
                queue.append(d)
    if len(order) != ma.n_states:
        return None
    return order[::-1]


def reach_min_max(
    ma: MarkovAutomaton,
    epsilon: float = 1e-10,
    max_iterations: int = 10**6,
) -> dict:
    """Unbounded goal reachability, minimised and maximised over schedulers.

    Markovian states branch with their embedded probabilities; vanishing
    states take the min/max over their choices.  On the acyclic automata
    produced by translated fault trees a single backward pass is exact; for
    cyclic nets the computation falls back to value iteration from below,
    which converges to the least fixed point.
    """
    order = _topological_order(ma)

    def solve(select) -> list:
        values = [0.0] * ma.n_states
        for s in ma.goal:
            values[s] = 1.0
        if order is not None:
            for s in order:
                if s in ma.goal:
                    continue
                values[s] = _bellman(ma, s, values, select)
            return values
        for _ in range(max_iterations):
            delta = 0.0
            for s in range(ma.n_states):
                if s in ma.goal:
                    continue
                fresh = _bellman(ma, s, values, select)
                delta = max(delta, abs(fresh - values[s]))
                values[s] = fresh
            if delta <= epsilon:
                break
        return values

    vmin = solve(min)
    vmax = solve(max)
    return {"min": vmin[ma.initial], "max": vmax[ma.initial]}


def _bellman(ma, s, values, select):
    if ma.vanishing[s]:
        if not ma.choices[s]:
            return 0.0
        return select(
            sum(p * values[d] for p, d in choice) for choice in ma.choices[s]
        )
    edges = ma.markovian[s]
    if not edges:
        return 0.0
    total = sum(r for r, _ in edges)
    return sum((r / total) * values[d] for r, d in edges)


def eliminate_vanishing(ma: MarkovAutomaton) -> Ctmc:
    """Collapse the instantaneous layer of a deterministic automaton.

    Every vanishing state owns exactly one probability distribution; chasing
    those distributions (they are acyclic, no time-traps) yields for each
    vanishing state its absorption distribution over tangible states.  A path
    that passes a goal-marked vanishing state keeps counting as reaching the
    goal: the tangible states it can end in are added to the goal set.
    """
    if not is_deterministic(ma):
        raise NondeterministicModelError(
            "vanishing-state elimination needs a deterministic automaton; "
            "this one has a real scheduling choice"
        )

    absorb_cache: dict = {}
    in_progress: set = set()
    goal_through: set = set()

    def absorb(s: int) -> dict:
        """Distribution over tangible states reached from vanishing state s."""
        if s in absorb_cache:
            return absorb_cache[s]
        if s in in_progress:
            raise NondeterministicModelError(
                "cycle of immediate transitions (time-trap) during elimination"
            )
        in_progress.add(s)
        result: dict = {}
        (choice,) = ma.choices[s] or ([],)
        for p, d in choice:
            if ma.vanishing[d]:
                for target, q in absorb(d).items():
                    result[target] = result.get(target, 0.0) + p * q
            else:
                result[d] = result.get(d, 0.0) + p
        in_progress.discard(s)
        absorb_cache[s] = result
        if s in ma.goal:
            goal_through.update(result)
        return result

    tangible = [s for s in range(ma.n_states) if not ma.vanishing[s]]
    if ma.vanishing[ma.initial]:
        initial = dict(absorb(ma.initial))
    else:
        initial = {ma.initial: 1.0}

    rates: dict = {}
    for s in tangible:
        merged: dict = {}
        for rate, d in ma.markovian[s]:
            if ma.vanishing[d]:
                for target, q in absorb(d).items():
                    merged[target] = merged.get(target, 0.0) + rate * q
            else:
                merged[d] = merged.get(d, 0.0) + rate
        rates[s] = sorted(merged.items(), key=lambda kv: kv[0])
        rates[s] = [(r, t) for t, r in rates[s]]

    goal = frozenset(
        s for s in tangible if s in ma.goal or s in goal_through
    )
    return Ctmc(
        states=tangible,
        initial_distribution=initial,
        rates=rates,
        goal=goal,
    )


def absorption_probability(ctmc: Ctmc, epsilon: float = 1e-14,
                           max_iterations: int = 10**6) -> float:
    """Probability of ever visiting the goal set, by value iteration on the
    embedded jump chain (exact single pass when the chain is acyclic)."""
    values = {s: (1.0 if s in ctmc.goal else 0.0) for s in ctmc.states}
    indeg = {s: 0 for s in ctmc.states}
    for s in ctmc.states:
        for _, d in ctmc.rates.get(s, ()):
            indeg[d] += 1
    queue = [s for s in ctmc.states if indeg[s] == 0]
    order = []
    while queue:
        s = queue.pop()
        order.append(s)
        for _, d in ctmc.rates.get(s, ()):
            indeg[d] -= 1
            if indeg[d] == 0:
                queue.append(d)
    acyclic = len(order) == len(ctmc.states)

    def step(s):
        edges = ctmc.rates.get(s, ())
        total = sum(r for r, _ in edges)
        if total == 0.0:
            return values[s]
        return sum((r / total) * values[d] for r, d in edges)

    if acyclic:
        for s in reversed(order):
            if s not in ctmc.goal:
                values[s] = step(s)
    else:
        for _ in range(max_iterations):
            delta = 0.0
            for s in ctmc.states:
                if s in ctmc.goal:
                    continue
                fresh = step(s)
                delta = max(delta, abs(fresh - values[s]))
                values[s] = fresh
            if delta <= epsilon:
                break
    return sum(p * values[s] for s, p in ctmc.initial_distribution.items())


def unreliability(ctmc: Ctmc, t: float, tolerance: float = 1e-9) -> float:
    """Probability that the goal set has been reached by time t.

    Goal states are made absorbing, then the transient distribution is
    evaluated by uniformisation; the Poisson weights are truncated once the
    remaining tail is far below the requested tolerance.
    """
    if t < 0:
        raise ValueError("mission time must be nonnegative")
    goal_mass0 = sum(
        p for s, p in ctmc.initial_distribution.items() if s in ctmc.goal
    )
    if t == 0.0:
        return goal_mass0

    rates = {
        s: ([] if s in ctmc.goal else ctmc.rates.get(s, []))
        for s in ctmc.states
    }
    max_exit = max(
        (sum(r for r, _ in edges) for edges in rates.values()), default=0.0
    )
    if max_exit == 0.0:
        return goal_mass0

    uniform_rate = 1.02 * max_exit
    # One-step matrix of the uniformised chain, rows only for non-goal states.
    rows: dict = {}
    for s in ctmc.states:
        if s in ctmc.goal:
            continue
        row = {}
        exit_rate = sum(r for r, _ in rates[s])
        stay = 1.0 - exit_rate / uniform_rate
        if stay:
            row[s] = stay
        for r, d in rates[s]:
            row[d] = row.get(d, 0.0) + r / uniform_rate
        rows[s] = row

    pi = {
        s: p for s, p in ctmc.initial_distribution.items() if s not in ctmc.goal
    }
    goal_mass = goal_mass0
    lam = uniform_rate * t
    tail_bound = tolerance * 1e-3
    result = 0.0
    accumulated = 0.0
    k = 0
    while accumulated < 1.0 - tail_bound:
        weight = _poisson_term(lam, k)
        result += weight * goal_mass
        accumulated += weight
        fresh: dict = {}
        new_goal = goal_mass
        for s, p in pi.items():
            for d, q in rows[s].items():
                if d in ctmc.goal:
                    new_goal += p * q
                else:
                    fresh[d] = fresh.get(d, 0.0) + p * q
        pi = fresh
        goal_mass = new_goal
        k += 1
        if k > 10_000_000:
            raise RuntimeError("uniformisation failed to converge")
    # Remaining tail: the goal mass can only grow, so crediting the current
    # mass to all further terms errs by less than the tail bound.
    result += (1.0 - accumulated) * goal_mass
    return min(1.0, max(0.0, result))


def _poisson_term(lam: float, k: int) -> float:
    return math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1))
