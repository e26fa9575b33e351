"""Elo aggregation of pairwise human comparisons and Fleiss' kappa.

Every comparison carries exactly three votes, so a majority always
exists. Updates are strictly sequential in input order: the winner gains
K * (1 - E_winner) and the loser gains K * (0 - E_loser), which keeps the
rating pool zero-sum to machine precision. Ratings start at 1400 with
K = 16 and are stored in 64-bit floats.
"""

import json
from dataclasses import dataclass

DEFAULT_INITIAL_RATING = 1400.0
DEFAULT_K_FACTOR = 16.0
VOTES_PER_COMPARISON = 3


@dataclass(frozen=True)
class ComparisonRecord:
    method_a: str
    method_b: str
    votes: tuple  # of "a" / "b", exactly three

    def __post_init__(self):
        if self.method_a == self.method_b:
            raise ValueError("comparison pits %r against itself" % (self.method_a,))
        if len(self.votes) != VOTES_PER_COMPARISON:
            raise ValueError(
                "comparison needs exactly %d votes, got %d"
                % (VOTES_PER_COMPARISON, len(self.votes))
            )
        bad = [v for v in self.votes if v not in ("a", "b")]
        if bad:
            raise ValueError("votes must be 'a' or 'b', got %r" % (bad[0],))

    def winner(self) -> str:
        return self.method_a if self.votes.count("a") >= 2 else self.method_b


@dataclass
class EloTable:
    ratings: dict  # method -> rating
    k_factor: float = DEFAULT_K_FACTOR
    comparisons_seen: int = 0


def new_table(methods, initial_rating=DEFAULT_INITIAL_RATING, k_factor=DEFAULT_K_FACTOR) -> EloTable:
    methods = list(methods)
    if len(set(methods)) != len(methods):
        raise ValueError("duplicate method names")
    return EloTable(ratings={m: float(initial_rating) for m in methods}, k_factor=k_factor)


def expected_score(rating_a, rating_b) -> float:
    """Win probability of the first player under the logistic model."""
    return 1.0 / (1.0 + 10.0 ** ((rating_b - rating_a) / 400.0))


def apply_comparison(table, record) -> EloTable:
    """Consume one comparison, mutating and returning the table."""
    for m in (record.method_a, record.method_b):
        if m not in table.ratings:
            raise ValueError("unknown method %r" % (m,))
    win = record.winner()
    lose = record.method_b if win == record.method_a else record.method_a
    e_win = expected_score(table.ratings[win], table.ratings[lose])
    e_lose = expected_score(table.ratings[lose], table.ratings[win])
    table.ratings[win] += table.k_factor * (1.0 - e_win)
    table.ratings[lose] += table.k_factor * (0.0 - e_lose)
    table.comparisons_seen += 1
    return table


def run_comparisons(table, records) -> EloTable:
    for rec in records:
        apply_comparison(table, rec)
    return table


def standings(table):
    """(method, rating) pairs, best first; ties broken by name."""
    return sorted(table.ratings.items(), key=lambda kv: (-kv[1], kv[0]))


def format_table(table) -> str:
    """One 'method rating' line per method, ratings to one decimal."""
    width = max(len(m) for m in table.ratings)
    return "\n".join("%-*s  %.1f" % (width, m, r) for m, r in standings(table)) + "\n"


def read_comparisons(path):
    """Load {method_a, method_b, votes} JSON lines in file order."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError("bad JSON at line %d: %s" % (lineno, exc)) from exc
            try:
                records.append(
                    ComparisonRecord(
                        method_a=obj["method_a"],
                        method_b=obj["method_b"],
                        votes=tuple(obj["votes"]),
                    )
                )
            except (KeyError, TypeError) as exc:
                raise ValueError("line %d is not a comparison record" % lineno) from exc
    return records


def fleiss_kappa(counts) -> float:
    """Agreement beyond chance for items rated by a fixed rater count.

    counts is an [n_items, n_categories] table of votes per category; all
    rows must sum to the same rater count r >= 2. Perfect agreement on a
    single category makes chance agreement 1; that 0/0 case is defined as
    kappa = 1 because observed agreement is also perfect.
    """
    rows = [list(map(float, row)) for row in counts]
    if not rows:
        raise ValueError("need at least one item")
    n_cats = len(rows[0])
    r = sum(rows[0])
    if r < 2:
        raise ValueError("need at least two raters, got %d" % int(r))
    for idx, row in enumerate(rows):
        if len(row) != n_cats:
            raise ValueError("row %d has %d categories, expected %d" % (idx, len(row), n_cats))
        if any(c < 0 or c != int(c) for c in row):
            raise ValueError("row %d holds a non-count entry" % idx)
        if sum(row) != r:
            raise ValueError(
                "row %d sums to %d, expected %d raters" % (idx, int(sum(row)), int(r))
            )
    n_items = len(rows)
    p_i = [(sum(c * c for c in row) - r) / (r * (r - 1)) for row in rows]
    p_bar = sum(p_i) / n_items
    p_j = [sum(row[j] for row in rows) / (n_items * r) for j in range(n_cats)]
    p_e = sum(p * p for p in p_j)
    if p_e == 1.0:
        return 1.0
    return (p_bar - p_e) / (1.0 - p_e)


def read_vote_counts(path):
    """Load kappa input: one JSON array of per-category counts per line,
    or objects carrying a 'counts' field."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError("bad JSON at line %d: %s" % (lineno, exc)) from exc
            if isinstance(obj, dict):
                obj = obj.get("counts")
            if not isinstance(obj, list):
                raise ValueError("line %d is not a count row" % lineno)
            rows.append(obj)
    return rows
