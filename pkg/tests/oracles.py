"""Independent reference computations the test suite checks the library
against.  Everything here goes through numpy linear solves or closed-form
probability, never through the library's own iteration code."""

import itertools
import math

import numpy as np


def scheduler_values(ma):
    """Reachability value for every deterministic memoryless scheduler.

    The marking graphs of translated trees are acyclic, so memoryless
    deterministic schedulers attain the optimum; enumerating them and solving
    each induced chain exactly brackets min and max.
    """
    nondet = [
        s
        for s in range(ma.n_states)
        if ma.vanishing[s] and len(ma.choices[s]) > 1
    ]
    options = [range(len(ma.choices[s])) for s in nondet]
    values = []
    for combo in itertools.product(*options):
        pick = dict(zip(nondet, combo))
        values.append(_chain_value(ma, pick))
    return values


def scheduler_min_max(ma, cap=200_000):
    nondet = [
        s
        for s in range(ma.n_states)
        if ma.vanishing[s] and len(ma.choices[s]) > 1
    ]
    count = 1
    for s in nondet:
        count *= len(ma.choices[s])
    if count > cap:
        raise RuntimeError(f"scheduler space too large to enumerate ({count})")
    values = scheduler_values(ma)
    return min(values), max(values)


def _chain_value(ma, pick):
    """Probability of reaching the goal in the Markov chain induced by fixing
    one choice per nondeterministic state; solved as a linear system."""
    n = ma.n_states
    A = np.eye(n)
    b = np.zeros(n)
    for s in range(n):
        if s in ma.goal:
            b[s] = 1.0
            continue
        if ma.vanishing[s]:
            if not ma.choices[s]:
                continue
            choice = ma.choices[s][pick.get(s, 0)]
            for p, d in choice:
                A[s, d] -= p
        else:
            edges = ma.markovian[s]
            total = sum(r for r, _ in edges)
            if total == 0.0:
                continue
            for r, d in edges:
                A[s, d] -= r / total
    return float(np.linalg.solve(A, b)[ma.initial])


def ctmc_absorption(ctmc):
    """Goal absorption probability of a CTMC via one dense linear solve."""
    states = list(ctmc.states)
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    A = np.eye(n)
    b = np.zeros(n)
    for s in states:
        i = index[s]
        if s in ctmc.goal:
            b[i] = 1.0
            continue
        edges = ctmc.rates.get(s, ())
        total = sum(r for r, _ in edges)
        if total == 0.0:
            continue
        for r, d in edges:
            A[i, index[d]] -= r / total
    x = np.linalg.solve(A, b)
    return float(
        sum(p * x[index[s]] for s, p in ctmc.initial_distribution.items())
    )


def static_tree_unreliability(tree, node_id, t):
    """Closed-form failure probability of an and/or tree of independent
    exponential components (valid only without shared subtrees)."""
    node = tree.node(node_id)
    if node.kind == "be":
        return 1.0 - math.exp(-node.type.active_rate * t)
    child_values = [static_tree_unreliability(tree, c, t) for c in node.children]
    if node.kind == "and":
        out = 1.0
        for v in child_values:
            out *= v
        return out
    if node.kind == "or":
        out = 1.0
        for v in child_values:
            out *= 1.0 - v
        return 1.0 - out
    raise ValueError(f"not a static node: {node.kind}")
