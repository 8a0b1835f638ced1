"""Exact output distributions of the sampling algorithms under ideal draws.

The harness runs the real algorithm implementations over every possible
sequence of draw outcomes, weighting each path by its exact probability,
and accumulates the induced distribution as exact rationals.  Paths are
explored by replaying a growing outcome script against the algorithm and
branching wherever the script runs out.

Where an algorithm consumes a uniform integer on {1..m}, the branch is
over the m values with probability 1/m each: for mask-reject on IID
uniform bits every mu-bit pattern is equally likely and a rejection
restarts the draw from an identical state, so the geometric series over
rejection prefixes collapses to exactly 1/m per accepted value.  A
non-uniform per-draw distribution can be supplied instead to model the
biased integer methods.

Two algorithms need their randomness enumerated at a coarser granularity
than raw draws:

* pikk sorts fractions, so its output depends only on their relative
  order; for IID continuous uniforms every rank order has probability
  exactly 1/n! and ties have probability zero.  The harness runs the real
  pikk once per rank order.
* vitter_z turns one fraction v into a skip length: skip = s exactly when
  v lies in [q(s), q(s-1)), where q(s) is a product of rationals.  The
  harness computes those cell boundaries exactly, branches over the cells
  with their exact widths, and hands the real code a representative v
  from strictly inside each cell; the implementation still derives the
  skip itself.  The implementation accumulates q in floats, but at the
  sizes enumerated here every cell is wider than 1e-3 while float error
  stays below 1e-14, so a representative can never be seen on the wrong
  side of a boundary.

random_indices without replacement rejects duplicates; a duplicate draw
leaves the algorithm state unchanged, so the next accepted value is
distributed as the draw distribution conditioned on the unseen values
(the same geometric collapse).  The harness enumerates duplicate-free
scripts with those collapsed weights; the rejection code path itself is
exercised by scripted unit tests.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from fractions import Fraction

from .sampling import (
    ScriptedSource,
    cormen_sample,
    fisher_yates,
    pikk,
    random_indices,
    reservoir_r,
    vitter_z,
)

__all__ = [
    "exact_subset_distribution",
    "exact_permutation_distribution",
    "uniform_subset_reference",
    "ENUMERABLE_ALGORITHMS",
]


class _NeedInt(Exception):
    def __init__(self, m):
        self.m = m


class _NeedFraction(Exception):
    pass


class _Replay:
    """Feeds a recorded outcome script to an algorithm; raises when the
    algorithm asks for a draw beyond the script."""

    def __init__(self, script):
        self._script = script
        self._pos = 0
        self.draws = 0

    def randint(self, m: int) -> int:
        if self._pos >= len(self._script):
            raise _NeedInt(m)
        kind, value, m_recorded = self._script[self._pos]
        if kind != "i" or m_recorded != m:
            raise AssertionError("replay diverged from recorded draw sequence")
        self._pos += 1
        self.draws += 1
        return value

    def fraction(self) -> float:
        if self._pos >= len(self._script):
            raise _NeedFraction()
        kind, value, _ = self._script[self._pos]
        if kind != "f":
            raise AssertionError("replay diverged from recorded draw sequence")
        self._pos += 1
        return value

    fraction_nonzero = fraction

    @property
    def words_used(self) -> int:
        return 0

    def fully_consumed(self) -> bool:
        return self._pos == len(self._script)


def _uniform(m: int) -> dict[int, Fraction]:
    p = Fraction(1, m)
    return {v: p for v in range(1, m + 1)}


def _enumerate_int_paths(run, draw_dist=None):
    """DFS over integer-draw outcomes of ``run(source) -> outcome``.

    draw_dist(m) -> {value: Fraction} gives the per-draw distribution
    (uniform when omitted).  Returns {outcome: Fraction}; the masses sum
    to exactly 1.
    """
    dist = draw_dist or _uniform
    results: dict = defaultdict(Fraction)
    stack = [((), Fraction(1))]
    while stack:
        script, prob = stack.pop()
        src = _Replay(script)
        try:
            outcome = run(src)
        except _NeedInt as need:
            for v, p in dist(need.m).items():
                if p:
                    stack.append((script + (("i", v, need.m),), prob * p))
            continue
        if not src.fully_consumed():
            raise AssertionError("algorithm finished without using all draws")
        results[outcome] += prob
    total = sum(results.values())
    if total != 1:
        raise AssertionError(f"path probabilities sum to {total}, not 1")
    return dict(results)


def _enumerate_collapsed_distinct(run, n: int, draw_dist=None):
    """Like _enumerate_int_paths but for draw-until-distinct rejection on
    {1..n}: scripts are duplicate-free and each accepted value v after the
    distinct prefix 'seen' carries weight p(v) / (1 - p(seen))."""
    base = (draw_dist or _uniform)(n)
    results: dict = defaultdict(Fraction)
    stack = [((), Fraction(1))]
    while stack:
        script, prob = stack.pop()
        src = _Replay(script)
        try:
            outcome = run(src)
        except _NeedInt as need:
            if need.m != n:
                raise AssertionError("collapsed enumeration expects draws on {1..n}")
            seen = {entry[1] for entry in script}
            denom = 1 - sum(base[s] for s in seen)
            for v, p in base.items():
                if v not in seen and p:
                    stack.append((script + (("i", v, n),), prob * p / denom))
            continue
        if not src.fully_consumed():
            raise AssertionError("algorithm finished without using all draws")
        results[outcome] += prob
    total = sum(results.values())
    if total != 1:
        raise AssertionError(f"path probabilities sum to {total}, not 1")
    return dict(results)


def _pikk_subsets(n: int, k: int):
    results: dict = defaultdict(Fraction)
    p = Fraction(1, math.factorial(n))
    for order in itertools.permutations(range(n)):
        # item with rank r in the order gets the r-th smallest fraction
        fracs = [0.0] * n
        for rank, item in enumerate(order):
            fracs[item] = (rank + 1) / (n + 2)
        sample = pikk(ScriptedSource(fractions=fracs), n, k)
        results[sample.as_set()] += p
    return dict(results)


def _skip_cells(k: int, t: int, remaining: int):
    """Exact skip-length cells for the sequential-search phase at state t.

    Yields (skip, probability, representative_v) for skip = 0..remaining-1
    plus one tail cell (skip >= remaining, probability q(remaining-1))
    whose representative drives the real code past the end of the stream.
    """
    q_prev = Fraction(1)
    q = Fraction(t + 1 - k, t + 1)  # q(0) = P(skip >= 1)
    for s in range(remaining):
        yield s, q_prev - q, float((q + q_prev) / 2)
        q_prev = q
        q *= Fraction(t + s + 2 - k, t + s + 2)
    if q_prev > 0:
        yield remaining, q_prev, float(q_prev / 2)  # tail: stream exhausts


def _vitter_subsets(n: int, k: int):
    stream = range(1, n + 1)
    results: dict = defaultdict(Fraction)
    # frame: script so far, its probability, records seen, records consumed
    stack = [((), Fraction(1), k, k)]
    while stack:
        script, prob, t, consumed = stack.pop()
        src = _Replay(script)
        try:
            sample = vitter_z(stream, k, src)
        except _NeedFraction:
            remaining = n - consumed
            for s, p, v in _skip_cells(k, t, remaining):
                if p:
                    stack.append(
                        (script + (("f", v, None),), prob * p, t + s + 1, consumed + s + 1)
                    )
            continue
        except _NeedInt as need:
            if need.m != k:
                raise AssertionError("vitter slot draw should be on {1..k}")
            p = Fraction(1, k)
            for v in range(1, k + 1):
                stack.append((script + (("i", v, k),), prob * p, t, consumed))
            continue
        if not src.fully_consumed():
            raise AssertionError("algorithm finished without using all draws")
        results[sample.as_set()] += prob
    total = sum(results.values())
    if total != 1:
        raise AssertionError(f"path probabilities sum to {total}, not 1")
    return dict(results)


ENUMERABLE_ALGORITHMS = (
    "pikk",
    "fisher_yates",
    "random_indices",
    "cormen",
    "reservoir_r",
    "vitter_z",
)


def exact_subset_distribution(algorithm: str, n: int, k: int, draw_dist=None):
    """Exact distribution over k-subsets of {1..n} induced by an algorithm.

    draw_dist(m) -> {value: Fraction}, optional, replaces the uniform
    integer-draw distribution (not supported for pikk or vitter_z, whose
    extra randomness is fraction-valued).
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if algorithm == "pikk":
        if draw_dist is not None:
            raise ValueError("pikk enumeration does not take a draw distribution")
        return _pikk_subsets(n, k)
    if algorithm == "fisher_yates":
        return _enumerate_int_paths(
            lambda src: frozenset(fisher_yates(src, n).items[:k]), draw_dist
        )
    if algorithm == "random_indices":
        return _enumerate_collapsed_distinct(
            lambda src: random_indices(src, n, k).as_set(), n, draw_dist
        )
    if algorithm == "cormen":
        return _enumerate_int_paths(
            lambda src: cormen_sample(src, n, k).as_set(), draw_dist
        )
    if algorithm == "reservoir_r":
        return _enumerate_int_paths(
            lambda src: reservoir_r(range(1, n + 1), k, src).as_set(), draw_dist
        )
    if algorithm == "vitter_z":
        if draw_dist is not None:
            raise ValueError("vitter_z enumeration does not take a draw distribution")
        return _vitter_subsets(n, k)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def exact_permutation_distribution(n: int, draw_dist=None):
    """Exact distribution over full permutations produced by fisher_yates."""
    return _enumerate_int_paths(lambda src: fisher_yates(src, n).items, draw_dist)


def uniform_subset_reference(n: int, k: int) -> dict:
    p = Fraction(1, math.comb(n, k))
    return {
        frozenset(c): p for c in itertools.combinations(range(1, n + 1), k)
    }
