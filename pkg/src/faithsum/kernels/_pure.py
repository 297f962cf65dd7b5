"""Pure-Python kernels; the fallback when the compiled extension is absent.

Semantics are mirrored exactly by ``_native.pyx`` (same iteration order,
same accumulation order) so both backends produce identical results.
"""

from __future__ import annotations


def lcs_length(a, b):
    """Length of the longest common subsequence of two int sequences."""
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    prev = [0] * (m + 1)
    curr = [0] * (m + 1)
    for i in range(1, n + 1):
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                curr[j] = prev[j - 1] + 1
            else:
                pj = prev[j]
                cj = curr[j - 1]
                curr[j] = pj if pj >= cj else cj
        prev, curr = curr, prev
    return prev[m]


def edit_distance(a, b):
    """Levenshtein distance between two int sequences (unit costs)."""
    n, m = len(a), len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    prev = list(range(m + 1))
    curr = [0] * (m + 1)
    for i in range(1, n + 1):
        curr[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            best = prev[j - 1] + cost
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if curr[j - 1] + 1 < best:
                best = curr[j - 1] + 1
            curr[j] = best
        prev, curr = curr, prev
    return prev[m]


def power_iteration(weights, damping, epsilon, max_iterations):
    """Damped power iteration over a weighted graph.

    ``weights`` is an n x n matrix (any sequence of row sequences).
    Each sweep computes score_i = (1 - d) + d * sum_j M_ji * score_j with
    M the row-normalized weight matrix; rows with zero out-weight are
    skipped (isolated vertices settle at 1 - d).  Returns
    ``(scores, iterations)`` where iterations counts completed sweeps.
    """
    n = len(weights)
    rows = [[float(x) for x in row] for row in weights]
    out_sum = [sum(row) for row in rows]
    base = 1.0 - damping
    scores = [1.0] * n
    iterations = 0
    for _ in range(max_iterations):
        incoming = [0.0] * n
        for j in range(n):
            oj = out_sum[j]
            if oj <= 0.0:
                continue
            contrib = damping * scores[j] / oj
            row = rows[j]
            for i in range(n):
                wji = row[i]
                if wji != 0.0:
                    incoming[i] += contrib * wji
        delta = 0.0
        for i in range(n):
            new = base + incoming[i]
            d = new - scores[i]
            if d < 0.0:
                d = -d
            if d > delta:
                delta = d
            scores[i] = new
        iterations += 1
        if delta < epsilon:
            break
    return scores, iterations
