from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from prunefair.masking import (
    apply_mask,
    build_mask,
    mask_from_tensor,
    mask_jaccard,
    mask_to_tensor,
)
from prunefair.scoring import ScoreInputs, score


def test_half_ratio_hand_example():
    scores = np.array([[0.4, 0.8], [1.2, 1.6]])
    mask = build_mask(scores, 0.5)
    assert mask.keep.tolist() == [[False, False], [True, True]]
    assert mask.sparsity == 0.5
    assert mask.granularity == "per_layer"


def test_ratio_zero_and_one():
    scores = np.arange(6.0).reshape(2, 3)
    none = build_mask(scores, 0.0)
    assert none.keep.all() and none.sparsity == 0.0
    everything = build_mask(scores, 1.0)
    assert (~everything.keep).all() and everything.sparsity == 1.0


def test_budget_uses_floor():
    scores = np.arange(9.0).reshape(3, 3)
    mask = build_mask(scores, 0.5)  # floor(4.5) = 4
    assert int((~mask.keep).sum()) == 4
    assert mask.sparsity == 4 / 9


def test_per_row_budget():
    scores = np.array([[1.0, 2.0], [4.0, 3.0]])
    mask = build_mask(scores, 0.5, granularity="per_row")
    assert mask.keep.tolist() == [[False, True], [True, False]]
    assert mask.granularity == "per_row"


def test_ties_break_toward_lower_row_major_index():
    scores = np.zeros((2, 3))
    mask = build_mask(scores, 0.5)  # k = 3, all scores equal
    assert mask.keep.tolist() == [[False, False, False], [True, True, True]]
    per_row = build_mask(np.zeros((2, 4)), 0.5, granularity="per_row")
    assert per_row.keep.tolist() == [[False, False, True, True]] * 2


def test_exact_counts_across_ratios():
    rng = np.random.default_rng(77)
    for _ in range(50):
        m, n = rng.integers(2, 12), rng.integers(2, 12)
        scores = rng.standard_normal((m, n)) ** 2
        for ratio in np.arange(0.1, 1.0, 0.1):
            mask = build_mask(scores, float(ratio))
            assert int((~mask.keep).sum()) == int(ratio * m * n)
            per_row = build_mask(scores, float(ratio), granularity="per_row")
            assert int((~per_row.keep).sum()) == m * int(ratio * n)


def test_growing_ratio_gives_nested_pruned_sets():
    rng = np.random.default_rng(13)
    scores = rng.uniform(0, 1, (9, 11))
    for granularity in ("per_layer", "per_row"):
        previous = None
        for ratio in np.linspace(0.0, 1.0, 21):
            pruned = ~build_mask(scores, float(ratio), granularity).keep
            if previous is not None:
                assert (previous <= pruned).all()  # subset as boolean implication
            previous = pruned


def test_pruned_scores_never_exceed_kept_scores():
    rng = np.random.default_rng(31)
    for _ in range(25):
        scores = rng.choice([0.1, 0.2, 0.3, 0.7], size=(6, 7))  # force ties
        mask = build_mask(scores, 0.4)
        pruned_vals = scores[~mask.keep]
        kept_vals = scores[mask.keep]
        if pruned_vals.size and kept_vals.size:
            assert pruned_vals.max() <= kept_vals.min() or np.isclose(
                pruned_vals.max(), kept_vals.min()
            )


def test_deterministic_under_thread_pools():
    rng = np.random.default_rng(3)
    matrices = [rng.uniform(0, 1, (8, 8)) for _ in range(50)]
    serial = [build_mask(s, 0.4).keep.tobytes() for s in matrices]
    for workers in (1, 2, 4):
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parallel = list(pool.map(lambda s: build_mask(s, 0.4).keep.tobytes(), matrices))
        assert parallel == serial


def test_mask_respects_score_order():
    inp = ScoreInputs(
        weight=np.array([[1.0, 2.0], [3.0, 4.0]]),
        act_norm=np.ones(2),
        grad_norm=np.ones((2, 2)),
    )
    mask = build_mask(score("magnitude", inp), 0.25)
    assert mask.keep.tolist() == [[False, True], [True, True]]


def test_build_mask_validation():
    scores = np.ones((2, 2))
    with pytest.raises(ValueError):
        build_mask(scores, -0.1)
    with pytest.raises(ValueError):
        build_mask(scores, 1.1)
    with pytest.raises(ValueError):
        build_mask(scores, 0.5, granularity="per_column")
    with pytest.raises(ValueError):
        build_mask(np.array([1.0, 2.0]), 0.5)
    with pytest.raises(ValueError):
        build_mask(scores * np.inf, 0.5)


def test_apply_mask_zeroes_only_pruned_cells():
    w = np.array([[1.0, -2.0], [3.0, -4.0]], dtype=np.float32)
    mask = build_mask(np.abs(w), 0.5)
    out = apply_mask(w, mask)
    assert out.dtype == w.dtype
    assert out.tolist() == [[0.0, 0.0], [3.0, -4.0]]
    assert w.tolist() == [[1.0, -2.0], [3.0, -4.0]]  # input untouched
    with pytest.raises(ValueError):
        apply_mask(np.ones((3, 2)), mask)


def test_jaccard_values():
    a = build_mask(np.array([[0.0, 1.0], [2.0, 3.0]]), 0.5)  # prunes cells 0, 1
    b = build_mask(np.array([[0.0, 3.0], [1.0, 2.0]]), 0.5)  # prunes cells 0, 2
    assert mask_jaccard(a, a) == 1.0
    assert mask_jaccard(a, b) == pytest.approx(1.0 / 3.0)
    empty = build_mask(np.ones((2, 2)), 0.0)
    assert mask_jaccard(empty, empty) == 1.0  # nothing pruned on either side
    disjoint_a = build_mask(np.array([[0.0, 1.0]]), 0.5)
    disjoint_b = build_mask(np.array([[1.0, 0.0]]), 0.5)
    assert mask_jaccard(disjoint_a, disjoint_b) == 0.0
    with pytest.raises(ValueError):
        mask_jaccard(a, disjoint_a)


def test_mask_serialization_round_trip():
    mask = build_mask(np.arange(12.0).reshape(3, 4), 0.25)
    tensor = mask_to_tensor(mask)
    assert set(np.unique(tensor)) <= {0.0, 1.0}
    back = mask_from_tensor(tensor)
    assert np.array_equal(back.keep, mask.keep)
    assert back.sparsity == mask.sparsity
    with pytest.raises(ValueError):
        mask_from_tensor(np.array([[0.5, 1.0]]))
