import itertools
import math

import numpy as np
import pytest

import fgfusion.optimizer as opt_mod
from fgfusion.errors import ConfigError, DataError
from fgfusion.optimizer import (
    RunConfig,
    RunHistory,
    canonical_weights,
    enumerate_true_front,
    evaluate_masks,
    fitness_balance,
    levy_step,
    run,
)

ALGOS = ("hncsa", "csa", "nsga2")


def _quick(algo, seed, **kw):
    kw.setdefault("iterations", 15)
    kw.setdefault("n_nests", 10)
    return RunConfig(algo=algo, seed=seed, **kw)


# --- objective oracles -----------------------------------------------------


def _oracle_objectives(mask, counts, weights):
    """Straight transcription of the two fitness definitions."""
    idx = [i for i, m in enumerate(mask) if m]
    totals = counts.sum(axis=1)
    vals = [weights[i] * totals[i] for i in idx]
    f1 = float(np.std(vals))
    wsum = sum(weights[i] for i in idx)
    if wsum == 0.0:
        return f1, 0.0
    per_doc = counts[idx, :].T @ np.array([weights[i] for i in idx]) / wsum
    return f1, float(per_doc.mean())


def test_evaluate_masks_matches_oracle(k6_profile):
    counts = k6_profile.counts.astype(float)
    weights = canonical_weights(k6_profile)
    kdim = len(k6_profile.pool)
    masks = np.array(
        [[(m >> k) & 1 for k in range(kdim)] for m in range(1, 1 << kdim)], dtype=bool
    )
    f1, f2 = evaluate_masks(masks, counts, weights)
    for row, mask in enumerate(masks):
        of1, of2 = _oracle_objectives(mask, counts, weights)
        assert f1[row] == pytest.approx(of1, abs=1e-12)
        assert f2[row] == pytest.approx(of2, abs=1e-12)


def test_singleton_mask_has_zero_spread(k6_profile):
    kdim = len(k6_profile.pool)
    masks = np.eye(kdim, dtype=bool)
    f1, _ = evaluate_masks(masks, k6_profile.counts.astype(float), canonical_weights(k6_profile))
    assert np.all(f1 == 0.0)


def test_zero_weight_combo_contributes_nothing():
    counts = np.array([[3.0, 1.0], [2.0, 2.0]])
    masks = np.array([[True, False]])
    f1, f2 = evaluate_masks(masks, counts, np.array([0.0, 1.0]))
    assert f2[0] == 0.0


def test_fitness_balance_agrees_with_batch(k6_profile):
    weights = canonical_weights(k6_profile)
    combo = (0, 2, 3)
    mask = np.zeros((1, len(k6_profile.pool)), dtype=bool)
    mask[0, list(combo)] = True
    f1, _ = evaluate_masks(mask, k6_profile.counts.astype(float), weights)
    assert fitness_balance(combo, k6_profile, weights) == pytest.approx(f1[0], abs=1e-12)


def test_canonical_weights_normalized(k6_profile):
    w = canonical_weights(k6_profile)
    assert abs(w.sum() - 1.0) <= 1e-9
    assert np.all(w >= 0.0)


# --- exhaustive front oracle ------------------------------------------------


def test_enumerate_true_front_matches_brute_force(k6_profile):
    counts = k6_profile.counts.astype(float)
    weights = canonical_weights(k6_profile)
    kdim = len(k6_profile.pool)
    values = {}
    for m in range(1, 1 << kdim):
        mask = tuple((m >> k) & 1 for k in range(kdim))
        values[mask] = _oracle_objectives(mask, counts, weights)
    keep = set()
    for a, (f1a, f2a) in values.items():
        dominated = any(
            (f1b <= f1a and f2b >= f2a and (f1b < f1a or f2b > f2a))
            for b, (f1b, f2b) in values.items()
            if b != a
        )
        if not dominated:
            keep.add(frozenset(k6_profile.pool[k] for k, bit in enumerate(a) if bit))
    got = {frozenset(e["combo"]) for e in enumerate_true_front(k6_profile)}
    assert got == keep


def test_enumerate_guards_pool_size(demo_profile):
    with pytest.raises(ConfigError):
        enumerate_true_front(demo_profile, max_pool=16)


# --- run() contracts ----------------------------------------------------------


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(algo="genetic", seed=0)
    with pytest.raises(ConfigError):
        RunConfig(algo="csa", seed=0, pa=1.5)
    with pytest.raises(ConfigError):
        RunConfig(algo="csa", seed=0, beta=2.5)
    with pytest.raises(ConfigError):
        RunConfig(algo="csa", seed=0, n_nests=1)


@pytest.mark.parametrize("algo", ALGOS)
def test_front_is_nondominated(algo, k6_profile):
    hist = run(_quick(algo, seed=3), k6_profile)
    front = [(e["f1"], e["f2"]) for e in hist.final_front]
    assert front
    for (f1a, f2a), (f1b, f2b) in itertools.permutations(front, 2):
        assert not (f1a <= f1b and f2a >= f2b and (f1a < f1b or f2a > f2b))


@pytest.mark.parametrize("algo", ("csa", "hncsa"))
def test_gbest_scalar_never_worsens(algo, k6_profile):
    hist = run(_quick(algo, seed=5), k6_profile)
    scalars = [rec["gbest"]["scalar"] for rec in hist.iterations]
    assert all(b >= a for a, b in zip(scalars, scalars[1:]))


@pytest.mark.parametrize("algo", ALGOS)
def test_fixed_seed_is_bit_identical(algo, k6_profile):
    a = run(_quick(algo, seed=11), k6_profile).to_json()
    b = run(_quick(algo, seed=11), k6_profile).to_json()
    assert a == b


def test_different_seeds_diverge(k6_profile):
    a = run(_quick("hncsa", seed=0), k6_profile).to_json()
    b = run(_quick("hncsa", seed=1), k6_profile).to_json()
    assert a != b


def test_history_round_trips_through_json(k6_profile):
    hist = run(_quick("hncsa", seed=2), k6_profile)
    again = RunHistory.from_json(hist.to_json())
    assert again.to_json() == hist.to_json()


def test_hidden_nest_recorded_only_for_hncsa(k6_profile):
    hn = run(_quick("hncsa", seed=1), k6_profile)
    plain = run(_quick("csa", seed=1), k6_profile)
    assert all(rec["hidden_nest"] is not None for rec in hn.iterations)
    assert all(rec["hidden_nest"] is None for rec in plain.iterations)


@pytest.mark.parametrize("algo", ("csa", "hncsa"))
def test_positions_stay_clamped(algo, k6_profile, monkeypatch):
    # big alpha guarantees raw Levy proposals leave the box before clamping
    seen = []
    original = opt_mod._masks_from_x

    def checking(x):
        seen.append((float(np.min(x)), float(np.max(x))))
        return original(x)

    monkeypatch.setattr(opt_mod, "_masks_from_x", checking)
    run(_quick(algo, seed=7, alpha=5.0), k6_profile)
    assert seen
    assert all(lo >= 0.0 and hi <= 1.0 for lo, hi in seen)


def test_levy_step_heavy_tail_and_scaling():
    rng = np.random.default_rng(0)
    steps = levy_step(1.5, 0.01, rng, size=20_000)
    assert steps.shape == (20_000,)
    # alpha scales linearly; a zero alpha kills the walk
    rng_a = np.random.default_rng(1)
    rng_b = np.random.default_rng(1)
    a = levy_step(1.5, 0.01, rng_a, size=100)
    b = levy_step(1.5, 0.02, rng_b, size=100)
    assert np.allclose(2.0 * a, b)
    assert np.all(levy_step(1.5, 0.0, np.random.default_rng(2), size=10) == 0.0)
    with pytest.raises(ConfigError):
        levy_step(1.0, 0.01, rng)


def test_empty_corpus_is_rejected(k6_profile):
    empty = np.zeros((len(k6_profile.pool), 0))
    with pytest.raises(DataError):
        evaluate_masks(np.ones((1, len(k6_profile.pool)), dtype=bool), empty, canonical_weights(k6_profile))
