"""Set-function value oracles, seeded instance generators, and exact
measurement of submodularity, the submodularity ratio, and the monotonicity
ratio on small ground sets.

Subsets are iterables of element ids (0..n-1) at the API surface. Internally
every oracle materializes a dense value table indexed by bitmask, which keeps
the exhaustive measurements exact and cheap at desk scale.

Oracles are immutable after construction (the table cache fills once,
idempotently) and safe to share across concurrent evaluators; every
measurement here is a pure function of the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

REL_TOL = 1e-9

TABLE_LIMIT = 20          # 2^n value-table entries
SUBMODULARITY_LIMIT = 14  # all (A, B) pairs
GAMMA_LIMIT = 12          # all (A, B) pairs with B disjoint from A
MONOTONICITY_LIMIT = 14   # all nested pairs via superset-min sweep


class CapabilityError(RuntimeError):
    """An exact enumeration was requested beyond its supported size."""


@dataclass(frozen=True)
class GroundSet:
    """Ground set {0, ..., n-1}."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set needs at least one element")

    def elements(self) -> range:
        return range(self.n)


def mask_of(subset: Iterable[int], n: int) -> int:
    mask = 0
    for u in subset:
        u = int(u)
        if not 0 <= u < n:
            raise ValueError(f"element {u} outside ground set of size {n}")
        mask |= 1 << u
    return mask


def elements_of(mask: int) -> list[int]:
    out = []
    u = 0
    while mask:
        if mask & 1:
            out.append(u)
        mask >>= 1
        u += 1
    return out


class SetFunctionOracle:
    """Nonnegative set-function value oracle backed by a dense value table.

    ``monotone`` is a certified hint: True only when the construction
    guarantees monotonicity, False when it guarantees the opposite, None when
    unknown (measure with :func:`monotonicity_ratio` instead).
    """

    family = "abstract"

    def __init__(self, ground: GroundSet, monotone: bool | None = None):
        self.ground = ground
        self.monotone = monotone
        self._table: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.ground.n

    def _build_table(self) -> np.ndarray:
        raise NotImplementedError

    def table(self) -> np.ndarray:
        """All 2^n values, indexed by subset bitmask. Cached, read-only."""
        if self._table is None:
            if self.n > TABLE_LIMIT:
                raise CapabilityError(
                    f"value table needs n <= {TABLE_LIMIT}, got n = {self.n}")
            tab = np.ascontiguousarray(self._build_table(), dtype=float)
            if float(tab.min()) < 0.0:
                raise ValueError("oracle produced a negative value")
            tab.setflags(write=False)
            self._table = tab
        return self._table

    def value_mask(self, mask: int) -> float:
        return float(self.table()[mask])

    def value(self, subset: Iterable[int]) -> float:
        return self.value_mask(mask_of(subset, self.n))

    def marginal_mask(self, u: int, mask: int) -> float:
        bit = 1 << u
        if mask & bit:
            raise ValueError(f"element {u} already in the set")
        tab = self.table()
        return float(tab[mask | bit] - tab[mask])


class ModularOracle(SetFunctionOracle):
    """f(S) = sum of per-element weights; weights must be nonnegative."""

    family = "modular"

    def __init__(self, weights: Sequence[float]):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a nonempty vector")
        if float(w.min()) < 0.0:
            raise ValueError("modular oracle weights must be nonnegative")
        super().__init__(GroundSet(w.size), monotone=True)
        self.weights = w

    def _build_table(self) -> np.ndarray:
        tab = np.zeros(1 << self.n)
        for u in range(self.n):
            half = 1 << u
            tab[half:2 * half] = tab[:half] + self.weights[u]
        return tab


class CoverageOracle(SetFunctionOracle):
    """Weighted coverage: element u covers a subset of a weighted universe."""

    family = "coverage"

    def __init__(self, n: int, covers: Sequence[Iterable[int]],
                 universe_weights: Sequence[float]):
        if len(covers) != n:
            raise ValueError("need one cover per ground element")
        w = np.asarray(universe_weights, dtype=float)
        if w.ndim != 1 or (w.size and float(w.min()) < 0.0):
            raise ValueError("universe weights must be nonnegative")
        if w.size > 62:
            raise ValueError("universe too large for bitmask covers")
        super().__init__(GroundSet(n), monotone=True)
        self.covers = tuple(frozenset(int(i) for i in c) for c in covers)
        for cov in self.covers:
            if any(not 0 <= i < w.size for i in cov):
                raise ValueError("cover refers to an unknown universe item")
        self.universe_weights = w
        self._cover_masks = tuple(
            sum(1 << i for i in cov) for cov in self.covers)

    def _build_table(self) -> np.ndarray:
        size = 1 << self.n
        unions = np.zeros(size, dtype=np.int64)
        for mask in range(1, size):
            lsb = mask & -mask
            unions[mask] = unions[mask ^ lsb] | self._cover_masks[lsb.bit_length() - 1]
        tab = np.zeros(size)
        for j in range(self.universe_weights.size):
            tab += self.universe_weights[j] * ((unions >> j) & 1)
        return tab


class CutOracle(SetFunctionOracle):
    """Undirected weighted cut: f(S) = total weight crossing (S, complement)."""

    family = "cut"

    def __init__(self, n: int, edges: Sequence[tuple[int, int, float]]):
        super().__init__(GroundSet(n), monotone=False)
        cleaned = []
        for a, b, w in edges:
            a, b, w = int(a), int(b), float(w)
            if a == b:
                raise ValueError("self-loops carry no cut weight")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError("edge endpoint outside ground set")
            if w < 0.0:
                raise ValueError("edge weights must be nonnegative")
            cleaned.append((min(a, b), max(a, b), w))
        self.edges = tuple(cleaned)

    def _build_table(self) -> np.ndarray:
        masks = np.arange(1 << self.n, dtype=np.int64)
        tab = np.zeros(1 << self.n)
        for a, b, w in self.edges:
            tab += w * (((masks >> a) ^ (masks >> b)) & 1)
        return tab


class PerturbedOracle(SetFunctionOracle):
    """Coverage base plus seeded per-subset additive noise, floored at zero.

    With ``monotone_noise`` the noise table is replaced by its running max
    over subsets, so the perturbed function stays monotone (and is certified
    as such); otherwise monotonicity is unknown and should be measured.
    """

    family = "synthetic-perturbed"

    def __init__(self, base: CoverageOracle, delta: float, seed: int,
                 monotone_noise: bool = False):
        if delta < 0.0:
            raise ValueError("noise amplitude must be nonnegative")
        super().__init__(GroundSet(base.n),
                         monotone=True if monotone_noise else None)
        self.base = base
        self.delta = float(delta)
        self.seed = int(seed)
        self.monotone_noise = bool(monotone_noise)

    def _build_table(self) -> np.ndarray:
        noise = np.random.default_rng(self.seed).uniform(
            -self.delta, self.delta, 1 << self.n)
        if self.monotone_noise:
            for u in range(self.n):
                bit = 1 << u
                view = noise.reshape(-1, 2 * bit)
                np.maximum(view[:, bit:], view[:, :bit], out=view[:, bit:])
        return np.maximum(0.0, self.base.table() + noise)


class ResidualOracle(SetFunctionOracle):
    """f(base ∪ ·) for a fixed base set; elements of the base get marginal 0."""

    def __init__(self, base_oracle: SetFunctionOracle, fixed: Iterable[int]):
        super().__init__(base_oracle.ground, monotone=base_oracle.monotone)
        self.base_oracle = base_oracle
        self.fixed_mask = mask_of(fixed, base_oracle.n)
        self.family = f"residual({base_oracle.family})"

    def _build_table(self) -> np.ndarray:
        idx = np.arange(1 << self.n) | self.fixed_mask
        return self.base_oracle.table()[idx]


def marginal(f: SetFunctionOracle, u: int, subset: Iterable[int]) -> float:
    """f(S + u) - f(S); requires u not already in S. May be negative."""
    return f.marginal_mask(int(u), mask_of(subset, f.n))


def is_submodular_bruteforce(f: SetFunctionOracle, tol: float = REL_TOL):
    """Check f(A) + f(B) >= f(A|B) + f(A&B) over every pair of subsets.

    Returns (True, None), or (False, (A, B)) with one violating pair as
    element lists. Exhaustive, so n is capped at SUBMODULARITY_LIMIT.
    """
    if f.n > SUBMODULARITY_LIMIT:
        raise CapabilityError(
            f"submodularity check needs n <= {SUBMODULARITY_LIMIT}")
    tab = f.table()
    atol = tol * max(1.0, float(tab.max()))
    idx = np.arange(1 << f.n)
    for a in range(1 << f.n):
        deficit = (tab[a | idx] + tab[a & idx]) - (tab[a] + tab)
        bad = np.nonzero(deficit > atol)[0]
        if bad.size:
            return False, (elements_of(a), elements_of(int(bad[0])))
    return True, None


def _gamma_with_witness(f: SetFunctionOracle, tol: float = REL_TOL):
    if f.n > GAMMA_LIMIT:
        raise CapabilityError(f"submodularity ratio needs n <= {GAMMA_LIMIT}")
    tab = f.table()
    scale = max(1.0, float(np.abs(tab).max()))
    best = math.inf
    witness = None
    for a in range(1 << f.n):
        comp_bits = [u for u in range(f.n) if not (a >> u) & 1]
        if not comp_bits:
            continue
        c = len(comp_bits)
        masks = np.zeros(1 << c, dtype=np.int64)
        sums = np.zeros(1 << c)
        for i, u in enumerate(comp_bits):
            half = 1 << i
            masks[half:2 * half] = masks[:half] | (1 << u)
            sums[half:2 * half] = sums[:half] + (tab[a | (1 << u)] - tab[a])
        denom = tab[a | masks] - tab[a]
        pos = denom > tol * scale
        if not bool(pos.any()):
            continue
        ratios = sums[pos] / denom[pos]
        j = int(np.argmin(ratios))
        if float(ratios[j]) < best:
            best = float(ratios[j])
            witness = (a, int(masks[pos][j]))
    if witness is None:
        return 1.0, None
    pair = (elements_of(witness[0]), elements_of(witness[1]))
    if best >= 1.0 - tol:
        return 1.0, pair
    return max(0.0, best), pair


def submodularity_ratio(f: SetFunctionOracle) -> float:
    """Largest gamma with sum_{u in B} f(u|A) >= gamma * f(B|A) for all A, B.

    Pairs with f(B|A) <= 0 are skipped (the inequality is vacuous for
    monotone f there); the result is clamped to [0, 1] and values within
    relative 1e-9 of 1 snap to exactly 1.
    """
    gamma, _ = _gamma_with_witness(f)
    return gamma


def _m_with_witness(f: SetFunctionOracle, tol: float = REL_TOL):
    if f.n > MONOTONICITY_LIMIT:
        raise CapabilityError(
            f"monotonicity ratio needs n <= {MONOTONICITY_LIMIT}")
    tab = f.table()
    scale = float(tab.max())
    if scale <= 0.0:
        return 1.0, None  # identically zero: degenerate convention
    sup_min = tab.copy()
    for u in range(f.n):
        bit = 1 << u
        view = sup_min.reshape(-1, 2 * bit)
        np.minimum(view[:, :bit], view[:, bit:], out=view[:, :bit])
    pos = tab > tol * max(1.0, scale)
    if not bool(pos.any()):
        return 1.0, None
    ratios = sup_min[pos] / tab[pos]
    j = int(np.argmin(ratios))
    best = float(ratios[j])
    s_mask = int(np.nonzero(pos)[0][j])
    target = sup_min[s_mask]
    t_mask = s_mask
    for m in range(1 << f.n):
        if (m & s_mask) == s_mask and tab[m] == target:
            t_mask = m
            break
    pair = (elements_of(s_mask), elements_of(t_mask))
    if best >= 1.0 - tol:
        return 1.0, pair
    return max(0.0, best), pair


def monotonicity_ratio(f: SetFunctionOracle) -> float:
    """min over S ⊆ T with f(S) > 0 of f(T)/f(S), clamped to [0, 1].

    Returns 1 for the identically-zero oracle. Values within relative 1e-9
    of 1 snap to exactly 1.
    """
    m, _ = _m_with_witness(f)
    return m


@dataclass(frozen=True)
class RatioMeasurement:
    """Measured submodularity ratio gamma and monotonicity ratio m.

    Witnesses are the (smaller set, larger set) pairs attaining each minimum,
    or None when the minimum is vacuous. ``nonmonotone_caveat`` flags that
    gamma was measured on a non-monotone oracle over positive-marginal pairs
    only.
    """

    gamma: float
    m: float
    gamma_witness: tuple[list[int], list[int]] | None
    m_witness: tuple[list[int], list[int]] | None
    nonmonotone_caveat: bool


def measure_ratios(f: SetFunctionOracle) -> RatioMeasurement:
    m, m_wit = _m_with_witness(f)
    gamma, g_wit = _gamma_with_witness(f)
    return RatioMeasurement(gamma=gamma, m=m, gamma_witness=g_wit,
                            m_witness=m_wit, nonmonotone_caveat=m < 1.0)


# ---------------------------------------------------------------------------
# seeded instance generators


def random_modular(n: int, seed: int, low: float = 0.2,
                   high: float = 1.8) -> ModularOracle:
    rng = np.random.default_rng(seed)
    return ModularOracle(rng.uniform(low, high, n))


def random_coverage(n: int, seed: int,
                    universe: int | None = None) -> CoverageOracle:
    rng = np.random.default_rng(seed)
    m = universe if universe is not None else max(6, int(1.4 * n))
    weights = rng.uniform(0.25, 1.25, m)
    covers = []
    for _ in range(n):
        size = int(rng.integers(1, max(2, m // 3) + 1))
        covers.append(sorted(rng.choice(m, size=size, replace=False).tolist()))
    return CoverageOracle(n, covers, weights)


def random_cut(n: int, seed: int, edge_prob: float = 0.5) -> CutOracle:
    if n < 2:
        raise ValueError("cut instances need n >= 2")
    rng = np.random.default_rng(seed)
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < edge_prob:
                edges.append((a, b, float(rng.uniform(0.1, 1.0))))
    if not edges:
        edges.append((0, 1, float(rng.uniform(0.1, 1.0))))
    return CutOracle(n, edges)


def random_perturbed(n: int, delta: float, seed: int,
                     monotone: bool = False,
                     base: CoverageOracle | None = None) -> PerturbedOracle:
    if base is None:
        base = random_coverage(n, seed ^ 0x5EED)
    return PerturbedOracle(base, delta, seed, monotone_noise=monotone)
