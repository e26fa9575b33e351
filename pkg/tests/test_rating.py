import json
import random

import pytest

from prunefair.rating import (
    ComparisonRecord,
    EloTable,
    apply_comparison,
    expected_score,
    fleiss_kappa,
    format_table,
    new_table,
    read_comparisons,
    read_vote_counts,
    run_comparisons,
    standings,
)


def kappa_oracle(counts):
    """Straight transcription of the agreement formula, no shortcuts."""
    r = sum(counts[0])
    n = len(counts)
    k = len(counts[0])
    p_bar = sum((sum(c * c for c in row) - r) / (r * (r - 1)) for row in counts) / n
    p_e = sum((sum(row[j] for row in counts) / (n * r)) ** 2 for j in range(k))
    return (p_bar - p_e) / (1.0 - p_e)


def test_expected_score_examples():
    assert expected_score(1400.0, 1400.0) == 0.5
    assert expected_score(1450.6, 1350.0) == pytest.approx(0.6409, abs=5e-5)
    assert expected_score(1200.0, 1600.0) + expected_score(1600.0, 1200.0) == pytest.approx(1.0)


def test_expected_score_monotonicity():
    assert expected_score(1500.0, 1400.0) > expected_score(1450.0, 1400.0)
    assert expected_score(1400.0, 1500.0) < expected_score(1400.0, 1450.0)


def test_record_majority_winner():
    assert ComparisonRecord("x", "y", ("a", "b", "a")).winner() == "x"
    assert ComparisonRecord("x", "y", ("b", "b", "a")).winner() == "y"
    assert ComparisonRecord("x", "y", ("b", "b", "b")).winner() == "y"


def test_record_validation():
    with pytest.raises(ValueError):
        ComparisonRecord("x", "x", ("a", "a", "a"))
    with pytest.raises(ValueError):
        ComparisonRecord("x", "y", ("a", "a"))
    with pytest.raises(ValueError):
        ComparisonRecord("x", "y", ("a", "a", "tie"))


def test_even_match_moves_exactly_eight_points():
    table = new_table(["x", "y"])
    apply_comparison(table, ComparisonRecord("x", "y", ("a", "b", "a")))
    assert table.ratings == {"x": 1408.0, "y": 1392.0}
    assert table.comparisons_seen == 1


def test_favorite_gains_less():
    table = new_table(["x", "y"])
    table.ratings["x"] = 1600.0
    apply_comparison(table, ComparisonRecord("x", "y", ("a", "a", "b")))
    assert table.ratings["x"] - 1600.0 == pytest.approx(3.8440, abs=1e-4)
    assert table.ratings["y"] - 1400.0 == pytest.approx(-3.8440, abs=1e-4)


def test_upset_pays_out_more_than_eight():
    table = new_table(["x", "y"])
    table.ratings["x"] = 1600.0
    apply_comparison(table, ComparisonRecord("x", "y", ("b", "b", "a")))
    assert table.ratings["y"] - 1400.0 == pytest.approx(16.0 - 3.8440, abs=1e-4)


def test_zero_sum_over_random_history():
    rng = random.Random(31)
    methods = ["m%d" % i for i in range(5)]
    table = new_table(methods)
    start_total = sum(table.ratings.values())
    for _ in range(200):
        a, b = rng.sample(methods, 2)
        votes = tuple(rng.choice("ab") for _ in range(3))
        apply_comparison(table, ComparisonRecord(a, b, votes))
        assert sum(table.ratings.values()) == pytest.approx(start_total, abs=1e-9)
    assert table.comparisons_seen == 200


def test_processing_order_matters_but_is_deterministic():
    recs = [
        ComparisonRecord("x", "y", ("a", "a", "b")),
        ComparisonRecord("y", "z", ("a", "a", "a")),
        ComparisonRecord("x", "z", ("b", "b", "b")),
        ComparisonRecord("z", "y", ("a", "b", "a")),
    ]
    fwd = run_comparisons(new_table(["x", "y", "z"]), recs).ratings
    fwd2 = run_comparisons(new_table(["x", "y", "z"]), recs).ratings
    rev = run_comparisons(new_table(["x", "y", "z"]), recs[::-1]).ratings
    assert fwd == fwd2
    assert fwd != rev


def test_dominance_after_thirty_comparisons():
    others = ["m%d" % i for i in range(4)]
    table = new_table(["champ"] + others)
    for i in range(30):
        apply_comparison(table, ComparisonRecord("champ", others[i % 4], ("a", "a", "a")))
    ranked = standings(table)
    assert ranked[0][0] == "champ"
    assert ranked[0][1] > max(r for m, r in ranked[1:]) + 50


def test_unknown_method_rejected():
    table = new_table(["x", "y"])
    with pytest.raises(ValueError):
        apply_comparison(table, ComparisonRecord("x", "ghost", ("a", "a", "a")))


def test_new_table_rejects_duplicates():
    with pytest.raises(ValueError):
        new_table(["x", "x"])


def test_standings_tie_breaks_by_name():
    table = EloTable(ratings={"beta": 1400.0, "alpha": 1400.0, "zeta": 1500.0})
    assert [m for m, _ in standings(table)] == ["zeta", "alpha", "beta"]


def test_format_table_fixture():
    table = EloTable(
        ratings={
            "hgla": 1450.6,
            "sparsegpt": 1420.3,
            "wanda": 1404.2,
            "gblm_pruner": 1374.9,
            "gblm_gradient": 1350.0,
        }
    )
    out = format_table(table)
    assert out.splitlines() == [
        "hgla           1450.6",
        "sparsegpt      1420.3",
        "wanda          1404.2",
        "gblm_pruner    1374.9",
        "gblm_gradient  1350.0",
    ]
    assert out.endswith("\n")


def test_read_comparisons_preserves_file_order(tmp_path):
    path = tmp_path / "cmp.jsonl"
    rows = [
        {"method_a": "x", "method_b": "y", "votes": ["a", "a", "b"]},
        {"method_a": "y", "method_b": "z", "votes": ["b", "b", "b"]},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n\n")
    recs = read_comparisons(path)
    assert [(r.method_a, r.method_b) for r in recs] == [("x", "y"), ("y", "z")]
    assert recs[1].winner() == "z"


def test_read_comparisons_errors(tmp_path):
    path = tmp_path / "cmp.jsonl"
    path.write_text("{oops\n")
    with pytest.raises(ValueError, match="line 1"):
        read_comparisons(path)
    path.write_text('{"method_a": "x"}\n')
    with pytest.raises(ValueError, match="line 1"):
        read_comparisons(path)


def test_kappa_unanimous_is_one():
    assert fleiss_kappa([[3, 0], [0, 3]]) == 1.0
    # all votes in one category makes chance agreement 1; defined as 1
    assert fleiss_kappa([[3, 0], [3, 0]]) == 1.0


def test_kappa_derived_fixture():
    counts = [[2, 1], [1, 2], [3, 0], [0, 3]]
    value = fleiss_kappa(counts)
    assert value == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert value == pytest.approx(kappa_oracle(counts), abs=1e-12)


def test_kappa_matches_oracle_on_random_tables():
    rng = random.Random(13)
    for _ in range(50):
        r = rng.randint(2, 6)
        k = rng.randint(2, 4)
        rows = []
        for _ in range(rng.randint(2, 8)):
            row = [0] * k
            for _ in range(r):
                row[rng.randrange(k)] += 1
            rows.append(row)
        p_j = [sum(row[j] for row in rows) for j in range(k)]
        if max(p_j) == sum(p_j):
            continue  # degenerate single-category table, handled elsewhere
        assert fleiss_kappa(rows) == pytest.approx(kappa_oracle(rows), abs=1e-12)


def test_kappa_column_permutation_invariance():
    counts = [[2, 1, 0], [0, 1, 2], [1, 1, 1], [3, 0, 0]]
    swapped = [[row[2], row[0], row[1]] for row in counts]
    assert fleiss_kappa(counts) == pytest.approx(fleiss_kappa(swapped), abs=1e-12)


def test_kappa_validation():
    with pytest.raises(ValueError):
        fleiss_kappa([])
    with pytest.raises(ValueError):
        fleiss_kappa([[1, 0], [0, 1]])  # one rater
    with pytest.raises(ValueError):
        fleiss_kappa([[3, 0], [1, 1]])  # inconsistent sums
    with pytest.raises(ValueError):
        fleiss_kappa([[2, 1], [1, 2, 0]])  # ragged
    with pytest.raises(ValueError):
        fleiss_kappa([[2.5, 0.5], [1, 2]])  # non-count
    with pytest.raises(ValueError):
        fleiss_kappa([[-1, 4], [2, 1]])  # negative


def test_read_vote_counts(tmp_path):
    path = tmp_path / "votes.jsonl"
    path.write_text('[3, 0]\n{"counts": [1, 2]}\n\n')
    assert read_vote_counts(path) == [[3, 0], [1, 2]]
    path.write_text('"nope"\n')
    with pytest.raises(ValueError, match="line 1"):
        read_vote_counts(path)
