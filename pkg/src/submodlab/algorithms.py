"""The five trace-producing algorithms of the lab.

Every run returns a :class:`RunTrace` whose per-iteration records are plain
JSON-serializable dicts; replaying a trace (same inputs, same seed) must
reproduce it bit-for-bit. The two randomized algorithms expose their uniform
draws through small "choice process" objects so that the verification module
can expand the exact same choice tree exhaustively.

Runs are single-threaded and deterministic; independent trials with distinct
seeds may execute concurrently without shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .continuous import ContinuousOracle, Polytope, masked_update
from .matroids import (Matroid, PSystem, common_rank, contract,
                       max_weight_common_independent, psystem_greedy_marginal)
from .oracles import ResidualOracle, SetFunctionOracle, elements_of, mask_of

CEIL_GUARD = 1e-9  # tolerant ceiling: float ratios that are mathematically
                   # integral (e.g. ln 4 / ln 2) must not round up


@dataclass
class RunTrace:
    """One algorithm run: per-iteration records, final solution, seed."""

    algorithm: str
    params: dict
    seed: int | None
    iterations: list[dict] = field(default_factory=list)
    final: object = None
    meta: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        return float(self.meta["value"])


def _round_rng(seed: int, round_index: int) -> np.random.Generator:
    # per-round generators derived from (seed, round) so the sampled path
    # and the exhaustive tree share the same per-node choice sets
    return np.random.default_rng([int(seed), int(round_index)])


# ---------------------------------------------------------------------------
# continuous algorithms


def masked_frank_wolfe(g: ContinuousOracle, h: ContinuousOracle,
                       polytope: Polytope, epsilon: float) -> RunTrace:
    """Masked (measured-greedy) Frank-Wolfe on F = g + h over a down-closed
    polytope: ceil(1/epsilon) rounds of s = lmo((1-y) ⊙ grad F(y)) followed
    by y += step * (1-y) ⊙ s.

    ``g`` must be certified monotone; both components must be nonnegative
    (our oracle constructors certify this). The trace records the running
    coordinate cap 1 - (1-step)^i alongside each iterate.
    """
    if not (0.0 < epsilon <= 1.0):
        raise ValueError("epsilon must lie in (0, 1]")
    if g.n != h.n or polytope.n != g.n:
        raise ValueError("oracles and polytope must share the dimension")
    if not g.monotone:
        raise ValueError("the first objective must be certified monotone")
    rounds = max(1, math.ceil(1.0 / epsilon - CEIL_GUARD))
    step = 1.0 / rounds
    y = np.zeros(g.n)
    records = []
    for i in range(rounds):
        gradient = g.grad(y) + h.grad(y)
        direction = polytope.lmo((1.0 - y) * gradient)
        y = masked_update(y, direction, step)
        records.append({
            "round": i,
            "direction": direction.tolist(),
            "point": y.tolist(),
            "value": float(g.value(y) + h.value(y)),
            "mask_cap": 1.0 - (1.0 - step) ** (i + 1),
        })
    return RunTrace(
        algorithm="masked-frank-wolfe",
        params={"epsilon": float(epsilon)},
        seed=None,
        iterations=records,
        final=y.tolist(),
        meta={
            "rounds": rounds,
            "step": step,
            "value": float(g.value(y) + h.value(y)),
            "in_polytope": bool(polytope.member(y)),
        },
    )


def frank_wolfe(f: ContinuousOracle, polytope: Polytope,
                iterations: int, declared_gamma: float | None = None
                ) -> RunTrace:
    """Projection-free conditional gradient from 0 with constant steps 1/K:
    v = lmo(grad F(x)), x += step * v, the final step clipped so the step
    masses add up to exactly 1 (making x a convex combination of polytope
    members and the origin).
    """
    if iterations < 1:
        raise ValueError("need at least one iteration")
    if polytope.n != f.n:
        raise ValueError("oracle and polytope must share the dimension")
    if not f.monotone:
        raise ValueError("objective must be certified monotone")
    k_total = int(iterations)
    x = np.zeros(f.n)
    mass = 0.0
    records = []
    for k in range(k_total):
        direction = polytope.lmo(f.grad(x))
        # last round takes exactly the remaining mass; for k >= 2 this makes
        # the final total bit-exactly 1.0
        step = (1.0 - mass) if k == k_total - 1 else 1.0 / k_total
        x = x + step * direction
        mass = mass + step
        records.append({
            "round": k,
            "direction": direction.tolist(),
            "step": step,
            "point": x.tolist(),
            "value": float(f.value(x)),
            "mass": mass,
        })
    meta = {
        "iterations": k_total,
        "step_mass": mass,
        "value": float(f.value(x)),
        "in_polytope": bool(polytope.member(x)),
    }
    if declared_gamma is not None:
        meta["declared_gamma"] = float(declared_gamma)
    return RunTrace(
        algorithm="frank-wolfe",
        params={"iterations": k_total},
        seed=None,
        iterations=records,
        final=x.tolist(),
        meta=meta,
    )


# ---------------------------------------------------------------------------
# bicriteria multi-pass greedy


def bicriteria_rounds(p: int, epsilon: float) -> int:
    """ceil(ln(1/eps) / ln((p+1)/p)), floored at one pass."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if int(p) != p or p < 1:
        raise ValueError("p must be a positive integer")
    ratio = math.log(1.0 / epsilon) / math.log((p + 1.0) / p)
    return max(1, math.ceil(ratio - CEIL_GUARD))


def authors_conjecture_rounds(p: int, epsilon: float) -> int:
    """ceil(log_{p+1}(1/eps)): the smaller, audited round count."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if int(p) != p or p < 1:
        raise ValueError("p must be a positive integer")
    ratio = math.log(1.0 / epsilon) / math.log(p + 1.0)
    return max(1, math.ceil(ratio - CEIL_GUARD))


def multipass_greedy(f: SetFunctionOracle, system: PSystem,
                     epsilon: float) -> RunTrace:
    """Union of ell = bicriteria_rounds(p, eps) greedy passes; pass i runs
    marginal greedy for f(· | S_{i-1}) over the p-system, so the output is
    covered by ell independent sets (the bicriteria certificate, stored in
    the trace).
    """
    if f.monotone is not True:
        raise ValueError("objective must be certified monotone")
    if system.n != f.n:
        raise ValueError("oracle and system must share the ground set")
    rounds = bicriteria_rounds(system.p, epsilon)
    chosen = 0
    records = []
    passes = []
    for i in range(rounds):
        residual = ResidualOracle(f, elements_of(chosen))
        part = psystem_greedy_marginal(residual, system)
        chosen |= mask_of(part, f.n)
        passes.append(sorted(part))
        records.append({
            "round": i,
            "added": sorted(part),
            "value": f.value_mask(chosen),
        })
    final = elements_of(chosen)
    certificate_ok = all(system.indep(t) for t in passes) and \
        sorted(set().union(*passes)) == final if passes else True
    return RunTrace(
        algorithm="multipass-greedy",
        params={"epsilon": float(epsilon), "p": system.p},
        seed=None,
        iterations=records,
        final=final,
        meta={
            "rounds": rounds,
            "value": f.value_mask(chosen),
            "independent_sets": passes,
            "certificate_ok": bool(certificate_ok),
        },
    )


# ---------------------------------------------------------------------------
# randomized greedy with dummy padding (cardinality constraint)


class DummyGreedyProcess:
    """Choice tree of dummy-padded random greedy under a cardinality budget.

    2k dummy elements (ids n .. n+2k-1) have zero marginal everywhere; each
    of the k rounds offers the k candidates maximizing the summed marginals,
    ties resolved toward real elements and then lower ids, and the algorithm
    draws one uniformly.
    """

    def __init__(self, f: SetFunctionOracle, k: int):
        if not 1 <= k <= f.n:
            raise ValueError("budget k must satisfy 1 <= k <= n")
        self.f = f
        self.k = int(k)

    def initial(self) -> tuple:
        return ()

    def leaf_count(self) -> int:
        return self.k ** self.k  # every round draws from exactly k candidates

    def real_mask(self, state: tuple) -> int:
        return mask_of((u for u in state if u < self.f.n), self.f.n)

    def choices(self, state: tuple):
        if len(state) == self.k:
            return None
        real = self.real_mask(state)
        taken = set(state)
        scored = []
        for u in range(self.f.n):
            if u in taken:
                continue
            scored.append((-self.f.marginal_mask(u, real), 0, u))
        for d in range(self.f.n, self.f.n + 2 * self.k):
            if d in taken:
                continue
            scored.append((0.0, 1, d))
        scored.sort()
        return tuple(u for _, _, u in scored[:self.k])

    def step(self, state: tuple, choice: int) -> tuple:
        return state + (int(choice),)

    def final_value(self, state: tuple) -> float:
        return self.f.value_mask(self.real_mask(state))

    def final_set(self, state: tuple) -> list[int]:
        return sorted(u for u in state if u < self.f.n)


def random_greedy_dummies(f: SetFunctionOracle, k: int, seed: int) -> RunTrace:
    """Run the dummy-padded random greedy; returns the real part of S_k."""
    proc = DummyGreedyProcess(f, k)
    state = proc.initial()
    records = []
    for i in range(k):
        options = proc.choices(state)
        pick = int(_round_rng(seed, i).integers(len(options)))
        u = options[pick]
        marg = f.marginal_mask(u, proc.real_mask(state)) if u < f.n else 0.0
        state = proc.step(state, u)
        records.append({
            "round": i,
            "candidates": list(options),
            "chosen": u,
            "is_dummy": u >= f.n,
            "marginal": marg,
            "value": proc.final_value(state),
        })
    return RunTrace(
        algorithm="random-greedy-dummies",
        params={"k": int(k)},
        seed=int(seed),
        iterations=records,
        final=proc.final_set(state),
        meta={"value": proc.final_value(state)},
    )


# ---------------------------------------------------------------------------
# random greedy for the intersection of two matroids


class IntersectionGreedyProcess:
    """Choice tree of random greedy under two matroid constraints.

    While some element extends the current set in both matroids: weight the
    remaining elements by their marginals, take the maximum-weight common
    independent set of both contracted matroids (no size target), and add a
    uniformly random member.
    """

    def __init__(self, f: SetFunctionOracle, m1: Matroid, m2: Matroid):
        if f.n != m1.n or f.n != m2.n:
            raise ValueError("oracle and matroids must share the ground set")
        if f.monotone is not True:
            raise ValueError("objective must be certified monotone")
        self.f = f
        self.m1 = m1
        self.m2 = m2

    def initial(self) -> int:
        return 0

    def choices(self, mask: int):
        n = self.f.n
        ground = []
        extendable = False
        for u in range(n):
            bit = 1 << u
            if mask & bit:
                continue
            ground.append(u)
            if self.m1.indep_mask(mask | bit) and self.m2.indep_mask(mask | bit):
                extendable = True
        if not extendable:
            return None
        current = elements_of(mask)
        weights = np.zeros(n)
        for u in ground:
            weights[u] = self.f.marginal_mask(u, mask)
        best = max_weight_common_independent(
            contract(self.m1, current), contract(self.m2, current),
            weights, ground=ground)
        if not best:
            raise ValueError(
                "all feasible marginals are negative; oracle is not monotone")
        return tuple(best)

    def step(self, mask: int, choice: int) -> int:
        return mask | (1 << int(choice))

    def final_value(self, mask: int) -> float:
        return self.f.value_mask(mask)

    def final_set(self, mask: int) -> list[int]:
        return elements_of(mask)


def random_greedy_intersection(f: SetFunctionOracle, m1: Matroid, m2: Matroid,
                               seed: int) -> RunTrace:
    """Run random greedy for two matroids (while-loop form).

    Each round also records whether the fixed-round variant that demands a
    common completion of size (max common rank - round + 1) could have
    proceeded; ``meta["fixed_rounds_would_crash"]`` flags traces where that
    variant would have run out of feasible sets.
    """
    proc = IntersectionGreedyProcess(f, m1, m2)
    rank = common_rank(m1, m2)
    state = proc.initial()
    records = []
    i = 0
    while (options := proc.choices(state)) is not None:
        i += 1
        pick = int(_round_rng(seed, i - 1).integers(len(options)))
        u = options[pick]
        current = elements_of(state)
        remaining = [v for v in range(f.n) if not (state >> v) & 1]
        needed = rank - i + 1
        contracted_rank = common_rank(
            contract(m1, current), contract(m2, current), ground=remaining)
        marg = f.marginal_mask(u, state)
        state = proc.step(state, u)
        records.append({
            "round": i - 1,
            "candidates": list(options),
            "chosen": u,
            "marginal": marg,
            "value": proc.final_value(state),
            "fixed_round_size": needed,
            "fixed_round_feasible": bool(contracted_rank >= needed),
        })
    crash = (len(records) < rank) or \
        any(not r["fixed_round_feasible"] for r in records)
    return RunTrace(
        algorithm="random-greedy-intersection",
        params={},
        seed=int(seed),
        iterations=records,
        final=proc.final_set(state),
        meta={
            "value": proc.final_value(state),
            "rounds": len(records),
            "max_common_rank": rank,
            "fixed_rounds_would_crash": bool(crash),
        },
    )
