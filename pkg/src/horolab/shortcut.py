"""Search for bilipschitz embeddings of scaled cycles into a graph.

A scaled n-cycle embeds with constant K when some f: {0..n-1} -> V satisfies

    (lam/K) * d_C(i,j)  <=  d(f(i), f(j))  <=  K * lam * d_C(i,j)

for every index pair, where d_C is the cycle metric.  A graph in which, for
some K > 1, only boundedly many cycle lengths admit such embeddings (for all
large scales lam) has bounded "circle approximation" behavior; the searches
here probe that on finite targets.

The search assigns f(0), f(1), ... by depth-first backtracking.  Candidates
for f(i) are pre-filtered through the distance bracket against f(0) using one
BFS row, then checked against every assigned image.  All comparisons are
exact integer cross-multiplications of the rational constants.  A capped
search reports "unknown", never a false "none".
"""

from __future__ import annotations

import csv
import io as _io
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InputError
from .graph import DistanceOracle, Graph

FOUND = "found"
NONE = "none"
UNKNOWN = "unknown"
NOT_SEARCHED = "not_searched"


@dataclass(frozen=True)
class LambdaGrid:
    """Inclusive rational interval with step, e.g. [2, 4] by 1/4."""

    lo: Fraction
    hi: Fraction
    step: Fraction

    def __post_init__(self):
        if self.step <= 0:
            raise InputError("lambda step must be positive")

    def values(self) -> list[Fraction]:
        out = []
        v = self.lo
        while v <= self.hi:
            out.append(v)
            v += self.step
        return out

    @classmethod
    def of(cls, lo, hi, step="1/4") -> "LambdaGrid":
        return cls(Fraction(lo), Fraction(hi), Fraction(step))


@dataclass(frozen=True)
class ShortcutQuery:
    cycle_length: int
    bilipschitz: Fraction
    lambdas: LambdaGrid
    target: Graph
    restrict: tuple[int, ...] | None = None
    f0_candidates: tuple[int, ...] | None = None  # orbit representatives
    node_cap: int = 2_000_000

    def __post_init__(self):
        if self.cycle_length < 3:
            raise InputError("cycle length must be >= 3")
        if self.bilipschitz < 1:
            raise InputError("bilipschitz constant must be >= 1")
        if self.node_cap < 1:
            raise InputError("node cap must be positive")


@dataclass(frozen=True)
class CycleEmbedding:
    images: tuple[int, ...]
    lam: Fraction
    k_achieved: Fraction


@dataclass(frozen=True)
class SearchOutcome:
    """``exhaustive`` means the status is definitive: the search ran to its
    natural end (witness found, or full grid refuted) without hitting the
    node cap."""

    status: str  # found | none | unknown | not_searched
    embedding: CycleEmbedding | None
    nodes_expanded: int
    exhaustive: bool


def cycle_metric(n: int) -> list[list[int]]:
    return [[min(abs(i - j), n - abs(i - j)) for j in range(n)] for i in range(n)]


def embedding_distortion(
    oracle: DistanceOracle, images: Sequence[int], lam: Fraction, bilipschitz: Fraction
) -> Fraction:
    """Re-verify an embedding pair by pair; the largest per-pair distortion.

    Raises InputError if any pair violates the bilipschitz bracket for
    ``bilipschitz`` (used as the post-hoc soundness check on every witness).
    """
    n = len(images)
    dc = cycle_metric(n)
    worst = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            d = oracle.distance(images[i], images[j])
            ref = lam * dc[i][j]
            if bilipschitz * d < ref or Fraction(d) > bilipschitz * ref:
                raise InputError(
                    f"pair ({i}, {j}): distance {d} outside bracket for lam={lam}"
                )
            if d:
                worst = max(worst, Fraction(d) / ref, ref / Fraction(d))
    return worst


class _CapExceeded(Exception):
    pass


def _search_one_lambda(
    query: ShortcutQuery,
    lam: Fraction,
    oracle: DistanceOracle,
    budget: list[int],
) -> tuple[int, ...] | None:
    """First embedding at one scale, or None.  ``budget`` holds the shared
    remaining node allowance (mutated in place)."""
    n = query.cycle_length
    k = query.bilipschitz
    dc = cycle_metric(n)

    ln, ld = lam.numerator, lam.denominator
    kn, kd = k.numerator, k.denominator

    def pair_ok(dist: int, dcij: int) -> bool:
        # lam*dc/K <= d   and   d <= K*lam*dc, cross-multiplied
        return ln * kd * dcij <= dist * ld * kn and dist * ld * kd <= kn * ln * dcij

    allowed = None
    if query.restrict is not None:
        allowed = np.zeros(query.target.num_vertices, dtype=bool)
        allowed[list(query.restrict)] = True

    f0_pool = query.f0_candidates
    if f0_pool is None:
        f0_pool = tuple(range(query.target.num_vertices))
    if query.restrict is not None:
        f0_pool = tuple(v for v in f0_pool if allowed[v])

    for f0 in f0_pool:
        row0 = oracle.row(f0)
        # bracket against f(0) filters each slot's candidate list
        candidates: list[np.ndarray] = [np.array([f0])]
        feasible = True
        for i in range(1, n):
            dci = dc[0][i]
            lo_ok = ln * kd * dci <= row0 * (ld * kn)
            hi_ok = row0 * (ld * kd) <= kn * ln * dci
            mask = lo_ok & hi_ok
            if allowed is not None:
                mask &= allowed
            cand = np.nonzero(mask)[0]
            if len(cand) == 0:
                feasible = False
                break
            candidates.append(cand)
        if not feasible:
            continue

        chosen: list[int] = [f0]
        rows = [row0]

        def extend(i: int) -> tuple[int, ...] | None:
            if i == n:
                return tuple(chosen)
            for w in candidates[i]:
                w = int(w)
                ok = True
                for j in range(1, i):  # j = 0 already filtered
                    if not pair_ok(int(rows[j][w]), dc[j][i]):
                        ok = False
                        break
                if not ok:
                    continue
                budget[0] -= 1
                if budget[0] < 0:
                    raise _CapExceeded
                chosen.append(w)
                rows.append(oracle.row(w))
                hit = extend(i + 1)
                if hit is not None:
                    return hit
                chosen.pop()
                rows.pop()
            return None

        hit = extend(1)
        if hit is not None:
            return hit
    return None


def bilipschitz_cycle_search(query: ShortcutQuery) -> SearchOutcome:
    """Scan the scale grid in ascending order; the first witness wins.

    The outcome's ``exhaustive`` flag is set only when every scale in the
    grid was fully searched.
    """
    if not query.target.is_connected():
        raise InputError("target graph must be connected")
    lams = query.lambdas.values()
    if not lams:
        return SearchOutcome(NOT_SEARCHED, None, 0, False)

    oracle = DistanceOracle(query.target)
    budget = [query.node_cap]
    for lam in lams:
        try:
            hit = _search_one_lambda(query, lam, oracle, budget)
        except _CapExceeded:
            return SearchOutcome(UNKNOWN, None, query.node_cap, False)
        if hit is not None:
            k_achieved = embedding_distortion(oracle, hit, lam, query.bilipschitz)
            emb = CycleEmbedding(images=hit, lam=lam, k_achieved=k_achieved)
            return SearchOutcome(FOUND, emb, query.node_cap - budget[0], True)
    return SearchOutcome(NONE, None, query.node_cap - budget[0], True)


# -- profiles ---------------------------------------------------------------


@dataclass(frozen=True)
class ProfileRow:
    cycle_length: int
    bilipschitz: Fraction
    lam: Fraction | None
    status: str
    nodes_expanded: int
    exhaustive: bool
    seconds: float


@dataclass(frozen=True)
class ShortcutProfile:
    target_size: int
    rows: tuple[ProfileRow, ...]

    def to_csv(self) -> str:
        buf = _io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["n", "K", "lambda", "status", "nodes", "seconds"])
        for r in self.rows:
            writer.writerow([
                r.cycle_length, str(r.bilipschitz),
                "" if r.lam is None else str(r.lam),
                r.status, r.nodes_expanded, f"{r.seconds:.6f}",
            ])
        return buf.getvalue()

    def to_json_rows(self, embeddings: dict[int, CycleEmbedding] | None = None) -> list[dict]:
        out = []
        for r in self.rows:
            row = {
                "n": r.cycle_length,
                "K": str(r.bilipschitz),
                "lambda": None if r.lam is None else str(r.lam),
                "status": r.status,
                "nodes": r.nodes_expanded,
                "exhaustive": r.exhaustive,
            }
            if embeddings and r.cycle_length in embeddings:
                e = embeddings[r.cycle_length]
                row["witness"] = {
                    "images": list(e.images),
                    "lambda": str(e.lam),
                    "K_achieved": str(e.k_achieved),
                }
            out.append(row)
        return out


def shortcut_profile(
    target: Graph,
    bilipschitz: Fraction,
    n_list: Sequence[int],
    lambdas: LambdaGrid,
    node_cap: int = 2_000_000,
    restrict: Sequence[int] | None = None,
    threads: int = 1,
) -> tuple[ShortcutProfile, dict[int, CycleEmbedding]]:
    """One search row per cycle length.  Every scale of an unsuccessful row is
    searched; nothing learned at one (n, lam) cell prunes another.  Rows are
    independent, so they may fan out over ``threads``; results are collected
    in row order either way."""

    def run_one(n: int) -> tuple[ProfileRow, CycleEmbedding | None]:
        t0 = time.perf_counter()
        query = ShortcutQuery(
            cycle_length=n,
            bilipschitz=Fraction(bilipschitz),
            lambdas=lambdas,
            target=target,
            restrict=None if restrict is None else tuple(restrict),
            node_cap=node_cap,
        )
        outcome = bilipschitz_cycle_search(query)
        row = ProfileRow(
            cycle_length=n,
            bilipschitz=Fraction(bilipschitz),
            lam=outcome.embedding.lam if outcome.embedding else None,
            status=outcome.status,
            nodes_expanded=outcome.nodes_expanded,
            exhaustive=outcome.exhaustive,
            seconds=time.perf_counter() - t0,
        )
        return row, outcome.embedding

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, n_list))
    else:
        results = [run_one(n) for n in n_list]

    witnesses = {row.cycle_length: emb for row, emb in results if emb is not None}
    return ShortcutProfile(target_size=target.num_vertices,
                           rows=tuple(row for row, _ in results)), witnesses
