"""Keyword-combination search: CSA, hidden-nest CSA, and an NSGA-II baseline.

Candidate solutions live in a continuous relaxation x ∈ [0,1]^K; the
keyword combination is {k : x_k ≥ 0.5} (never allowed to go empty).  Two
objectives are computed against a corpus match profile: a balance
objective f1 (population std of weighted keyword frequencies, minimized)
and a relevance objective f2 (mean per-document weighted match score,
maximized).  Keyword weights are dynamic: each iteration re-normalizes
how often the current population uses each keyword, so recorded
objective pairs from different iterations reflect different weightings.
Every evaluation is archived and the run's front is the non-dominated
subset of that archive.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .corpus import MatchProfile
from .errors import ConfigError, DataError
from .keywords import update_weights

__all__ = [
    "RunConfig",
    "RunHistory",
    "levy_step",
    "fitness_balance",
    "fitness_relevance",
    "evaluate_masks",
    "canonical_weights",
    "enumerate_true_front",
    "run_csa",
    "run_hncsa",
    "run_nsga2",
    "run",
]

ALGOS = ("csa", "hncsa", "nsga2")


@dataclass(frozen=True)
class RunConfig:
    """Parameters for one optimizer run."""

    algo: str
    seed: int
    n_nests: int = 25
    iterations: int = 100
    pa: float = 0.25
    alpha: float = 0.01
    beta: float = 1.5
    hncsa_gamma: float = 1.0
    hncsa_eps: float = 1.0
    crossover_rate: float = 0.9

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise ConfigError(f"unknown algorithm {self.algo!r}; expected one of {ALGOS}")
        if not (0.0 < self.pa < 1.0):
            raise ConfigError(f"pa must be in (0,1), got {self.pa}")
        if not (1.0 < self.beta <= 2.0):
            raise ConfigError(f"beta must be in (1,2], got {self.beta}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.n_nests < 2:
            raise ConfigError(f"n_nests must be >= 2, got {self.n_nests}")
        if self.alpha < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if not (0.0 <= self.crossover_rate <= 1.0):
            raise ConfigError(f"crossover_rate must be in [0,1], got {self.crossover_rate}")

    def to_dict(self) -> Dict[str, object]:
        return {
            "algo": self.algo,
            "seed": self.seed,
            "n_nests": self.n_nests,
            "iterations": self.iterations,
            "pa": self.pa,
            "alpha": self.alpha,
            "beta": self.beta,
            "hncsa_gamma": self.hncsa_gamma,
            "hncsa_eps": self.hncsa_eps,
            "crossover_rate": self.crossover_rate,
        }


@dataclass
class RunHistory:
    """Per-iteration bookkeeping plus the archive-derived final front.

    ``iterations[t]`` records the running best (f2 − f1 scalar, never
    worsening), the iteration's rank-best objectives, a population
    digest, and the hidden nest id (HN-CSA only, else None).
    ``final_front`` entries are (combo tokens, f1, f2) as evaluated;
    ``final_population`` is the last population under its final weights.
    """

    algo: str
    seed: int
    config: Dict[str, object]
    pool: Tuple[str, ...]
    iterations: List[Dict[str, object]] = field(default_factory=list)
    final_front: List[Dict[str, object]] = field(default_factory=list)
    final_population: List[Dict[str, object]] = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "algo": self.algo,
            "seed": self.seed,
            "config": self.config,
            "pool": list(self.pool),
            "iterations": self.iterations,
            "final_front": self.final_front,
            "final_population": self.final_population,
        }
        return json.dumps(payload, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "RunHistory":
        payload = json.loads(text)
        return cls(
            algo=payload["algo"],
            seed=payload["seed"],
            config=payload["config"],
            pool=tuple(payload["pool"]),
            iterations=payload["iterations"],
            final_front=payload["final_front"],
            final_population=payload["final_population"],
        )


# ---------------------------------------------------------------------------
# Lévy flights
# ---------------------------------------------------------------------------


def _mantegna_sigma(beta: float) -> float:
    num = math.gamma(1.0 + beta) * math.sin(math.pi * beta / 2.0)
    den = math.gamma((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0)
    return (num / den) ** (1.0 / beta)


def levy_step(beta: float, alpha: float, rng: np.random.Generator, size: int = 1):
    """Heavy-tailed step vector via the Mantegna construction, scaled by alpha."""
    if not (1.0 < beta <= 2.0):
        raise ConfigError(f"beta must be in (1,2], got {beta}")
    if alpha < 0:
        raise ConfigError(f"alpha must be >= 0, got {alpha}")
    sigma = _mantegna_sigma(beta)
    u = rng.normal(0.0, sigma, size)
    v = rng.normal(0.0, 1.0, size)
    return alpha * u / np.abs(v) ** (1.0 / beta)


# ---------------------------------------------------------------------------
# fitness
# ---------------------------------------------------------------------------


def fitness_balance(combo: Sequence[int], profile: MatchProfile, weights) -> float:
    """Population std of weighted keyword frequencies over the combo (lower = better)."""
    combo = tuple(combo)
    if not combo:
        raise ConfigError("combo must be non-empty")
    w = np.asarray(weights, dtype=float)
    totals = profile.counts.sum(axis=1)
    values = w[list(combo)] * totals[list(combo)]
    return float(np.std(values))


def fitness_relevance(combo: Sequence[int], profile: MatchProfile, weights) -> float:
    """Mean per-document weighted match score over the combo (higher = better)."""
    combo = tuple(combo)
    if not combo:
        raise ConfigError("combo must be non-empty")
    if profile.counts.shape[1] == 0:
        raise DataError("cannot evaluate relevance on an empty corpus")
    w = np.asarray(weights, dtype=float)
    idx = list(combo)
    denom = float(w[idx].sum())
    if denom <= 0.0:
        return 0.0
    per_doc = (w[idx, None] * profile.counts[idx, :]).sum(axis=0) / denom
    return float(per_doc.mean())


def evaluate_masks(masks: np.ndarray, counts: np.ndarray, weights: np.ndarray):
    """Vectorized (f1, f2) for a batch of combo masks under one weight vector."""
    if counts.shape[1] == 0:
        raise DataError("cannot evaluate on an empty corpus")
    masks_f = masks.astype(float)
    w = np.asarray(weights, dtype=float)
    totals = counts.sum(axis=1).astype(float)
    wt = w * totals
    cnt = masks_f.sum(axis=1)
    s1 = masks_f @ wt
    s2 = masks_f @ (wt * wt)
    mean = s1 / cnt
    var = np.maximum(s2 / cnt - mean * mean, 0.0)
    f1 = np.sqrt(var)
    denom = masks_f @ w
    weighted = masks_f @ (w[:, None] * counts)
    f2 = np.zeros(masks.shape[0])
    ok = denom > 0.0
    f2[ok] = (weighted[ok] / denom[ok, None]).mean(axis=1)
    return f1, f2


def canonical_weights(profile: MatchProfile) -> np.ndarray:
    """Weights normalized from total corpus match counts (population-independent)."""
    totals = profile.counts.sum(axis=1)
    freq = {k: int(t) for k, t in zip(profile.pool, totals)}
    weights = update_weights(freq)
    return weights.vector(profile.pool)


# ---------------------------------------------------------------------------
# dominance helpers (minimize f1, maximize f2)
# ---------------------------------------------------------------------------


def _dominates(f1a: float, f2a: float, f1b: float, f2b: float) -> bool:
    return f1a <= f1b and f2a >= f2b and (f1a < f1b or f2a > f2b)


def _nondominated_values(values: List[Tuple[float, float]]) -> set:
    """Subset of distinct (f1, f2) values not dominated by any other value."""
    distinct = sorted(set(values), key=lambda p: (p[0], -p[1]))
    keep = set()
    best_f2 = -math.inf
    i = 0
    while i < len(distinct):
        f1_level = distinct[i][0]
        # distinct is f2-descending within a level; entry i has the level max.
        if distinct[i][1] > best_f2:
            keep.add(distinct[i])
            best_f2 = distinct[i][1]
        while i < len(distinct) and distinct[i][0] == f1_level:
            i += 1
    return keep


class _Archive:
    """Deduplicated record of every (combo, f1, f2) evaluation in a run."""

    def __init__(self, pool: Sequence[str]):
        self.pool = tuple(pool)
        self._seen = set()
        self.entries: List[Tuple[Tuple[int, ...], float, float]] = []

    def add_batch(self, masks: np.ndarray, f1: np.ndarray, f2: np.ndarray):
        for i in range(masks.shape[0]):
            combo = tuple(np.flatnonzero(masks[i]).tolist())
            key = (combo, float(f1[i]), float(f2[i]))
            if key not in self._seen:
                self._seen.add(key)
                self.entries.append(key)

    def front(self) -> List[Dict[str, object]]:
        values = [(e[1], e[2]) for e in self.entries]
        keep = _nondominated_values(values)
        rows = [e for e in self.entries if (e[1], e[2]) in keep]
        rows.sort(key=lambda e: (e[1], -e[2], e[0]))
        return [
            {"combo": [self.pool[i] for i in combo], "f1": f1, "f2": f2}
            for combo, f1, f2 in rows
        ]


# ---------------------------------------------------------------------------
# shared run machinery
# ---------------------------------------------------------------------------


def _force_nonempty(masks: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Ensure every row has at least one keyword: switch on the row argmax."""
    empty = ~masks.any(axis=1)
    if empty.any():
        masks = masks.copy()
        masks[empty, np.argmax(x[empty], axis=1)] = True
    return masks


def _masks_from_x(x: np.ndarray) -> np.ndarray:
    return _force_nonempty(x >= 0.5, x)


def _usage_weights(masks: np.ndarray, pool: Sequence[str]) -> np.ndarray:
    usage = masks.sum(axis=0).astype(float)
    freq = {k: float(u) for k, u in zip(pool, usage)}
    return update_weights(freq).vector(pool)


def _rank_scores(f1: np.ndarray, f2: np.ndarray) -> np.ndarray:
    """Scalarization rank(f2) − rank(f1); higher is better."""
    order1 = np.argsort(f1, kind="stable")
    order2 = np.argsort(f2, kind="stable")
    r1 = np.empty(len(f1), dtype=np.int64)
    r2 = np.empty(len(f2), dtype=np.int64)
    r1[order1] = np.arange(len(f1))
    r2[order2] = np.arange(len(f2))
    return r2 - r1


def _best_index(scores: np.ndarray, f1: np.ndarray, masks: np.ndarray) -> int:
    """Max score; ties broken by lower f1, then lexicographic combo order."""
    best = int(np.argmax(scores))
    candidates = np.flatnonzero(scores == scores[best])
    if len(candidates) > 1:
        def key(i):
            return (f1[i], tuple(np.flatnonzero(masks[i]).tolist()))

        best = min(candidates, key=key)
    return int(best)


def _digest(x: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(x).tobytes()).hexdigest()[:16]


class _GBest:
    """Running best solution under the fixed scalar f2 − f1."""

    def __init__(self):
        self.scalar = -math.inf
        self.f1 = math.nan
        self.f2 = math.nan
        self.combo: Tuple[int, ...] = ()

    def update_batch(self, masks: np.ndarray, f1: np.ndarray, f2: np.ndarray):
        scal = f2 - f1
        i = int(np.argmax(scal))
        if scal[i] > self.scalar:
            self.scalar = float(scal[i])
            self.f1 = float(f1[i])
            self.f2 = float(f2[i])
            self.combo = tuple(np.flatnonzero(masks[i]).tolist())


def _check_inputs(config: RunConfig, profile: MatchProfile):
    if profile.counts.shape[1] == 0:
        raise DataError("cannot optimize over an empty corpus")
    if len(profile.pool) == 0:
        raise ConfigError("keyword pool is empty")


def _finalize(
    history: RunHistory,
    archive: _Archive,
    masks: np.ndarray,
    f1: np.ndarray,
    f2: np.ndarray,
):
    history.final_front = archive.front()
    history.final_population = [
        {
            "combo": [history.pool[k] for k in np.flatnonzero(masks[i])],
            "f1": float(f1[i]),
            "f2": float(f2[i]),
        }
        for i in range(masks.shape[0])
    ]


def _capture_best(
    pool: Sequence[str], best_i: int, f1: np.ndarray, f2: np.ndarray, masks: np.ndarray
) -> Dict[str, object]:
    return {
        "f1": float(f1[best_i]),
        "f2": float(f2[best_i]),
        "combo": [pool[k] for k in np.flatnonzero(masks[best_i])],
    }


def _iteration_record(
    t: int,
    gbest: _GBest,
    pool: Sequence[str],
    iter_best: Dict[str, object],
    x: np.ndarray,
    hidden: Optional[int],
) -> Dict[str, object]:
    return {
        "iteration": t,
        "gbest": {
            "scalar": gbest.scalar,
            "f1": gbest.f1,
            "f2": gbest.f2,
            "combo": [pool[k] for k in gbest.combo],
        },
        "iter_best": iter_best,
        "digest": _digest(x),
        "hidden_nest": hidden,
    }


# ---------------------------------------------------------------------------
# CSA and HN-CSA
# ---------------------------------------------------------------------------


def _run_cuckoo(config: RunConfig, profile: MatchProfile, hidden_nest: bool) -> RunHistory:
    _check_inputs(config, profile)
    pool = profile.pool
    counts = profile.counts.astype(float)
    n, kdim = config.n_nests, len(pool)

    root = np.random.SeedSequence(config.seed)
    children = root.spawn(n + 1)
    run_rng = np.random.Generator(np.random.PCG64(children[0]))
    nest_rngs = [np.random.Generator(np.random.PCG64(c)) for c in children[1:]]

    x = run_rng.uniform(0.0, 1.0, size=(n, kdim))
    history = RunHistory(
        algo=config.algo, seed=config.seed, config=config.to_dict(), pool=pool
    )
    archive = _Archive(pool)
    gbest = _GBest()
    n_abandon = min(int(round(config.pa * n)), n - 1)

    masks = _masks_from_x(x)
    for t in range(config.iterations):
        weights = _usage_weights(masks, pool)
        f1, f2 = evaluate_masks(masks, counts, weights)
        archive.add_batch(masks, f1, f2)
        gbest.update_batch(masks, f1, f2)
        scores = _rank_scores(f1, f2)
        best_i = _best_index(scores, f1, masks)
        iter_best = _capture_best(pool, best_i, f1, f2, masks)

        if hidden_nest:
            cand = x.copy()
            order = np.argsort(-scores, kind="stable")
            pool_order = [i for i in order if i != best_i]
            n_exploit = len(pool_order) // 2
            exploit = pool_order[:n_exploit]
            explore = pool_order[n_exploit:]
            bx = x[best_i]
            for i in exploit:
                dist = float(np.linalg.norm(bx - x[i]))
                cand[i] = x[i] + (bx - x[i]) * math.exp(-config.hncsa_gamma * dist)
            for i in explore:
                cand[i] = x[i] + levy_step(
                    config.beta, config.hncsa_eps * config.alpha, nest_rngs[i], kdim
                )
            updated = [i for i in pool_order]
        else:
            cand = np.empty_like(x)
            for i in range(n):
                cand[i] = x[i] + levy_step(config.beta, config.alpha, nest_rngs[i], kdim)
            updated = list(range(n))
        np.clip(cand, 0.0, 1.0, out=cand)
        cand_masks = _masks_from_x(cand)

        cf1, cf2 = evaluate_masks(cand_masks, counts, weights)
        archive.add_batch(cand_masks, cf1, cf2)
        gbest.update_batch(cand_masks, cf1, cf2)

        # replacement at the iteration barrier, run RNG in nest order
        for i in updated:
            if _dominates(cf1[i], cf2[i], f1[i], f2[i]):
                replace = True
            elif _dominates(f1[i], f2[i], cf1[i], cf2[i]):
                replace = False
            else:
                replace = run_rng.random() < 0.5
            if replace:
                x[i] = cand[i]
                masks[i] = cand_masks[i]
                f1[i], f2[i] = cf1[i], cf2[i]

        # abandon the worst fraction (hidden best protected by construction)
        scores = _rank_scores(f1, f2)
        if n_abandon > 0:
            order = np.argsort(scores, kind="stable")
            worst = [i for i in order if not (hidden_nest and i == best_i)]
            worst = worst[:n_abandon]
            for i in worst:
                x[i] = run_rng.uniform(0.0, 1.0, size=kdim)
            fresh = _masks_from_x(x[worst])
            masks[worst] = fresh
            ff1, ff2 = evaluate_masks(fresh, counts, weights)
            archive.add_batch(fresh, ff1, ff2)
            gbest.update_batch(fresh, ff1, ff2)
            f1[worst], f2[worst] = ff1, ff2

        history.iterations.append(
            _iteration_record(
                t, gbest, pool, iter_best, x,
                hidden=best_i if hidden_nest else None,
            )
        )

    weights = _usage_weights(masks, pool)
    f1, f2 = evaluate_masks(masks, counts, weights)
    archive.add_batch(masks, f1, f2)
    gbest.update_batch(masks, f1, f2)
    _finalize(history, archive, masks, f1, f2)
    return history


def run_csa(config: RunConfig, profile: MatchProfile) -> RunHistory:
    """Classic cuckoo search with Lévy flights and Pareto-greedy replacement."""
    return _run_cuckoo(config, profile, hidden_nest=False)


def run_hncsa(config: RunConfig, profile: MatchProfile) -> RunHistory:
    """CSA plus the hidden-nest step: the rank-best nest sits out each
    iteration's updates while the better half contracts toward it and the
    worse half takes scaled Lévy perturbations."""
    return _run_cuckoo(config, profile, hidden_nest=True)


# ---------------------------------------------------------------------------
# NSGA-II baseline
# ---------------------------------------------------------------------------


def fast_nondominated_sort(f1: np.ndarray, f2: np.ndarray) -> np.ndarray:
    """Front rank per individual for (minimize f1, maximize f2)."""
    n = len(f1)
    dominated_by = [[] for _ in range(n)]
    domination_count = np.zeros(n, dtype=np.int64)
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            if _dominates(f1[a], f2[a], f1[b], f2[b]):
                dominated_by[a].append(b)
            elif _dominates(f1[b], f2[b], f1[a], f2[a]):
                domination_count[a] += 1
    ranks = np.full(n, -1, dtype=np.int64)
    current = [i for i in range(n) if domination_count[i] == 0]
    rank = 0
    while current:
        nxt = []
        for a in current:
            ranks[a] = rank
            for b in dominated_by[a]:
                domination_count[b] -= 1
                if domination_count[b] == 0:
                    nxt.append(b)
        current = nxt
        rank += 1
    return ranks


def crowding_distance(f1: np.ndarray, f2: np.ndarray, members: Sequence[int]) -> Dict[int, float]:
    dist = {i: 0.0 for i in members}
    if len(members) <= 2:
        return {i: math.inf for i in members}
    for values in (f1, f2):
        order = sorted(members, key=lambda i: values[i])
        span = values[order[-1]] - values[order[0]]
        dist[order[0]] = math.inf
        dist[order[-1]] = math.inf
        if span <= 0:
            continue
        for pos in range(1, len(order) - 1):
            i = order[pos]
            if not math.isinf(dist[i]):
                dist[i] += (values[order[pos + 1]] - values[order[pos - 1]]) / span
    return dist


def _nsga_metrics(f1, f2):
    ranks = fast_nondominated_sort(f1, f2)
    crowd = np.zeros(len(f1))
    for rank in range(ranks.max() + 1):
        members = np.flatnonzero(ranks == rank).tolist()
        for i, d in crowding_distance(f1, f2, members).items():
            crowd[i] = d
    return ranks, crowd


def run_nsga2(config: RunConfig, profile: MatchProfile) -> RunHistory:
    """Textbook NSGA-II over bitmask combos (binary tournament, uniform
    crossover at ``crossover_rate``, per-bit mutation 1/K)."""
    _check_inputs(config, profile)
    pool = profile.pool
    counts = profile.counts.astype(float)
    n, kdim = config.n_nests, len(pool)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed)))

    def force_nonempty(masks):
        empty = ~masks.any(axis=1)
        for i in np.flatnonzero(empty):
            masks[i, rng.integers(kdim)] = True
        return masks

    masks = force_nonempty(rng.random((n, kdim)) < 0.5)
    history = RunHistory(
        algo=config.algo, seed=config.seed, config=config.to_dict(), pool=pool
    )
    archive = _Archive(pool)
    gbest = _GBest()

    for t in range(config.iterations):
        weights = _usage_weights(masks, pool)
        f1, f2 = evaluate_masks(masks, counts, weights)
        archive.add_batch(masks, f1, f2)
        gbest.update_batch(masks, f1, f2)
        ranks, crowd = _nsga_metrics(f1, f2)
        best_i = _best_index(_rank_scores(f1, f2), f1, masks)
        iter_best = _capture_best(pool, best_i, f1, f2, masks)

        def tournament():
            a, b = rng.integers(n, size=2)
            if ranks[a] != ranks[b]:
                return a if ranks[a] < ranks[b] else b
            if crowd[a] != crowd[b]:
                return a if crowd[a] > crowd[b] else b
            return a

        offspring = np.empty_like(masks)
        for pair in range(0, n, 2):
            pa, pb = masks[tournament()].copy(), masks[tournament()].copy()
            if rng.random() < config.crossover_rate:
                swap = rng.random(kdim) < 0.5
                pa[swap], pb[swap] = pb[swap], pa[swap].copy()
            offspring[pair] = pa
            if pair + 1 < n:
                offspring[pair + 1] = pb
        flip = rng.random((n, kdim)) < (1.0 / kdim)
        offspring = force_nonempty(offspring ^ flip)

        of1, of2 = evaluate_masks(offspring, counts, weights)
        archive.add_batch(offspring, of1, of2)
        gbest.update_batch(offspring, of1, of2)

        all_masks = np.vstack([masks, offspring])
        all_f1 = np.concatenate([f1, of1])
        all_f2 = np.concatenate([f2, of2])
        all_ranks, all_crowd = _nsga_metrics(all_f1, all_f2)
        order = sorted(range(2 * n), key=lambda i: (all_ranks[i], -all_crowd[i]))
        chosen = order[:n]
        masks = all_masks[chosen]
        f1_sel, f2_sel = all_f1[chosen], all_f2[chosen]

        history.iterations.append(
            _iteration_record(t, gbest, pool, iter_best, masks.astype(float), hidden=None)
        )

    weights = _usage_weights(masks, pool)
    f1, f2 = evaluate_masks(masks, counts, weights)
    archive.add_batch(masks, f1, f2)
    gbest.update_batch(masks, f1, f2)
    _finalize(history, archive, masks, f1, f2)
    return history


def run(config: RunConfig, profile: MatchProfile) -> RunHistory:
    """Dispatch on ``config.algo``."""
    if config.algo == "csa":
        return run_csa(config, profile)
    if config.algo == "hncsa":
        return run_hncsa(config, profile)
    return run_nsga2(config, profile)


# ---------------------------------------------------------------------------
# exhaustive oracle (small pools)
# ---------------------------------------------------------------------------


def enumerate_true_front(
    profile: MatchProfile, weights: Optional[np.ndarray] = None, max_pool: int = 16
) -> List[Dict[str, object]]:
    """Exhaust all non-empty combos and return the non-dominated ones.

    Intended for small pools (guarded at ``max_pool``); weights default to
    the canonical corpus-frequency weights so the result is a fixed,
    reproducible reference front.
    """
    kdim = len(profile.pool)
    if kdim > max_pool:
        raise ConfigError(f"pool of {kdim} keywords is too large to exhaust")
    if weights is None:
        weights = canonical_weights(profile)
    n_combos = (1 << kdim) - 1
    masks = np.zeros((n_combos, kdim), dtype=bool)
    for m in range(1, n_combos + 1):
        for k in range(kdim):
            if m >> k & 1:
                masks[m - 1, k] = True
    f1, f2 = evaluate_masks(masks, profile.counts.astype(float), weights)
    archive = _Archive(profile.pool)
    archive.add_batch(masks, f1, f2)
    return archive.front()
