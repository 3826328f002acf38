"""Reference implementations the tests trust over the code under test.

Everything here is written the slow, obvious way and imports nothing from
the package: expected values in the test modules were computed (or are
recomputed at run time) against these.
"""

from __future__ import annotations


def levenshtein_matrix(a: str, b: str) -> int:
    """Full-matrix dynamic programming edit distance."""
    rows, cols = len(a) + 1, len(b) + 1
    d = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        d[i][0] = i
    for j in range(cols):
        d[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            d[i][j] = min(
                d[i - 1][j] + 1,
                d[i][j - 1] + 1,
                d[i - 1][j - 1] + (0 if a[i - 1] == b[j - 1] else 1),
            )
    return d[rows - 1][cols - 1]


def levenshtein_confidence(a: str, b: str) -> float:
    return 1.0 - levenshtein_matrix(a, b) / max(len(a), len(b), 1)


def jaccard(xs, ys) -> float:
    sx, sy = set(xs), set(ys)
    union = sx | sy
    if not union:
        return 0.0
    return len(sx & sy) / len(union)


def first_year(value: str) -> str | None:
    """First run of four consecutive digits, scanning left to right."""
    for i in range(len(value) - 3):
        window = value[i : i + 4]
        if window.isdigit():
            return window
    return None


def enumerate_value_sets(
    triples: list[tuple[str, str, str, bool]],
    roots: list[str],
    max_depth: int,
) -> dict[tuple[str, ...], set[str]]:
    """Literal values per predicate path, found by naive traversal.

    Triples are (subject, predicate, object, object_is_literal) with terms
    pre-rendered to strings by the caller.  A predicate may appear at most
    once per path.
    """
    outgoing: dict[str, list[tuple[str, str, bool]]] = {}
    for s, p, o, is_literal in triples:
        outgoing.setdefault(s, []).append((p, o, is_literal))

    values: dict[tuple[str, ...], set[str]] = {}

    def walk(node: str, path: tuple[str, ...]) -> None:
        for predicate, obj, is_literal in outgoing.get(node, []):
            if predicate in path:
                continue
            extended = path + (predicate,)
            if is_literal:
                values.setdefault(extended, set()).add(obj)
            elif len(extended) < max_depth:
                walk(obj, extended)

    for root in roots:
        walk(root, ())
    return values


def brute_suggestions(
    source_triples: list[tuple[str, str, str, bool]],
    source_roots: list[str],
    target_triples: list[tuple[str, str, str, bool]],
    target_roots: list[str],
    max_depth: int = 2,
) -> dict[tuple[tuple[str, ...], tuple[str, ...]], float]:
    """Jaccard of normalized literal value sets for every path pair, zeros omitted."""

    def normalize(values: set[str]) -> set[str]:
        return {v.strip().lower() for v in values}

    source_sets = {
        path: normalize(vals) for path, vals in enumerate_value_sets(source_triples, source_roots, max_depth).items()
    }
    target_sets = {
        path: normalize(vals) for path, vals in enumerate_value_sets(target_triples, target_roots, max_depth).items()
    }
    scores: dict[tuple[tuple[str, ...], tuple[str, ...]], float] = {}
    for source_path, source_values in source_sets.items():
        for target_path, target_values in target_sets.items():
            score = jaccard(source_values, target_values)
            if score > 0:
                scores[(source_path, target_path)] = score
    return scores
