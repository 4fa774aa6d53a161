"""Balanced team formation.

Students are split into ``k = ceil(n / team_size)`` teams whose sizes differ by
at most one. :func:`fold_assign` builds a starting partition by pairing the
extremes of the score ranking, :func:`local_search` then applies
best-improvement single-student swaps until the population variance of the
team means cannot be lowered. :func:`exact_min_variance` enumerates every
partition for small cohorts and serves as the oracle for the heuristic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from statistics import median
from typing import Iterable, Mapping, Union

import numpy as np

from equiteam.errors import CohortTooSmall, InstanceTooLarge, InvalidTeamSize, PartitionError
from equiteam.survey import EquityScore

SWAP_TOLERANCE = 1e-9
EXACT_LIMIT = 12

Scores = Union[Mapping[str, int], Iterable[EquityScore]]


def _totals(scores: Scores) -> dict[str, int]:
    if isinstance(scores, Mapping):
        return dict(scores)
    totals = {}
    for s in scores:
        if s.roll in totals:
            raise PartitionError(f"duplicate roll {s.roll!r}")
        totals[s.roll] = s.total
    return totals


def size_profile(n: int, team_size: int) -> list[int]:
    """Team sizes for ``n`` students: ``ceil(n / team_size)`` teams, larger ones first."""
    if isinstance(team_size, bool) or not isinstance(team_size, int) or team_size < 2:
        raise InvalidTeamSize(f"team size must be an integer >= 2, got {team_size!r}")
    if n < team_size:
        raise CohortTooSmall(f"cohort of {n} is smaller than the team size {team_size}")
    k = -(-n // team_size)
    q, r = divmod(n, k)
    return [q + 1] * r + [q] * (k - r)


@dataclass(frozen=True)
class TeamAssignment:
    """Ordered teams of roll identifiers plus the totals of every member.

    Members inside a team are kept sorted by roll. ``team_size`` is the target
    the assignment was built for and does not take part in equality.
    """

    teams: tuple[tuple[str, ...], ...]
    totals: Mapping[str, int]
    team_size: int = field(default=0, compare=False)

    def __post_init__(self):
        teams = tuple(tuple(sorted(t)) for t in self.teams)
        object.__setattr__(self, "teams", teams)
        object.__setattr__(self, "totals", dict(self.totals))
        if not self.team_size:
            object.__setattr__(self, "team_size", max((len(t) for t in teams), default=0))
        members = [r for t in teams for r in t]
        if len(members) != len(set(members)):
            raise PartitionError("teams are not disjoint")
        if set(members) != set(self.totals):
            raise PartitionError("teams do not cover exactly the scored cohort")
        if any(not t for t in teams):
            raise PartitionError("empty team")
        sizes = [len(t) for t in teams]
        if sizes and max(sizes) - min(sizes) > 1:
            raise PartitionError(f"team sizes {sorted(set(sizes))} differ by more than one")

    @property
    def sums(self) -> list[int]:
        return [sum(self.totals[r] for r in t) for t in self.teams]

    @property
    def means(self) -> list[Fraction]:
        return [Fraction(s, len(t)) for s, t in zip(self.sums, self.teams)]

    def team_of(self) -> dict[str, int]:
        return {r: i for i, t in enumerate(self.teams) for r in t}


@dataclass(frozen=True)
class BalanceMetrics:
    means: tuple[Fraction, ...]
    variance: Fraction
    range_width: Fraction


def _pvariance(values) -> Fraction:
    values = [Fraction(v) for v in values]
    mu = sum(values, Fraction(0)) / len(values)
    return sum(((v - mu) ** 2 for v in values), Fraction(0)) / len(values)


def balance_metrics(assign: TeamAssignment) -> BalanceMetrics:
    means = tuple(assign.means)
    return BalanceMetrics(means, _pvariance(means), max(means) - min(means))


def fold_assign(scores: Scores, team_size: int = 4) -> TeamAssignment:
    """Greedy fold pairing of the descending score ranking.

    The first pass gives team ``i`` the ``i``-th highest and ``i``-th lowest
    student. Each later pass folds up to ``k`` more pairs off the ends of the
    remaining ranking; a pair whose mean is above the pass median joins the
    open team with the smallest sum, any other pair the open team with the
    largest sum. A pair that no longer fits any team is attached member by
    member under the same rule.
    """
    totals = _totals(scores)
    caps = size_profile(len(totals), team_size)
    k = len(caps)
    order = sorted(totals, key=lambda r: (-totals[r], r))
    teams: list[list[str]] = [[] for _ in range(k)]
    sums = [0] * k

    lo, hi = 0, len(order) - 1

    def next_unit():
        nonlocal lo, hi
        if lo == hi:
            unit = [order[lo]]
        else:
            unit = [order[lo], order[hi]]
            hi -= 1
        lo += 1
        return unit

    for t in range(k):
        unit = next_unit()
        teams[t].extend(unit)
        sums[t] += sum(totals[r] for r in unit)

    def attach(unit, above):
        open_teams = [t for t in range(k) if caps[t] - len(teams[t]) >= len(unit)]
        if not open_teams:
            for r in unit:
                attach([r], totals[r] > pass_median)
            return
        if above:
            t = min(open_teams, key=lambda t: (sums[t], t))
        else:
            t = min(open_teams, key=lambda t: (-sums[t], t))
        teams[t].extend(unit)
        sums[t] += sum(totals[r] for r in unit)

    while lo <= hi:
        units = []
        while len(units) < k and lo <= hi:
            units.append(next_unit())
        unit_means = [Fraction(sum(totals[r] for r in u), len(u)) for u in units]
        pass_median = median(unit_means)
        for unit, mean in zip(units, unit_means):
            attach(unit, mean > pass_median)

    return TeamAssignment(tuple(map(tuple, teams)), totals, team_size)


@dataclass(frozen=True)
class Swap:
    team_a: int
    roll_a: str
    team_b: int
    roll_b: str


@dataclass(frozen=True)
class SearchResult:
    """Outcome of :func:`local_search`.

    ``variances`` holds the exact variance before the first swap and after
    every accepted swap, so ``len(variances) == len(swaps) + 1``.
    """

    assignment: TeamAssignment
    swaps: tuple[Swap, ...]
    variances: tuple[Fraction, ...]


def _best_swap(teams, totals, tol):
    rolls = [r for t in teams for r in t]
    team_idx = np.array([i for i, t in enumerate(teams) for _ in t])
    vals = np.array([totals[r] for r in rolls], dtype=float)
    counts = np.array([len(t) for t in teams], dtype=float)
    sums = np.array([sum(totals[r] for r in t) for t in teams], dtype=float)
    k = len(teams)

    means = sums / counts
    dev = means - means.mean()

    # swap student a (team i) with b (team j): mean_i += d/c_i, mean_j -= d/c_j, d = v_b - v_a
    d = vals[None, :] - vals[:, None]
    ti, tj = team_idx[:, None], team_idx[None, :]
    di = d / counts[ti]
    dj = -d / counts[tj]
    shift = (di + dj) / k
    decrease = -((2 * dev[ti] * di + di * di) + (2 * dev[tj] * dj + dj * dj)) / k + shift * shift

    valid = ti < tj
    decrease = np.where(valid, decrease, -np.inf)
    best = decrease.max()
    if not best > tol:
        return None
    # rows/cols are ordered by (team, roll): the first candidate in row-major order
    # is the lexicographically smallest (team_a, roll_a, team_b, roll_b)
    candidates = valid & (decrease > tol) & (decrease >= best - tol)
    a, b = np.unravel_index(np.argmax(candidates), candidates.shape)
    return Swap(int(team_idx[a]), rolls[a], int(team_idx[b]), rolls[b])


def local_search(assign: TeamAssignment, tol: float = SWAP_TOLERANCE) -> SearchResult:
    """Best-improvement swap descent on the variance of team means.

    Every cross-team exchange of two students is scored; the swap with the
    largest decrease is applied (decreases within ``tol`` of the best count as
    ties, settled by the smallest ``(team, roll, team, roll)``). Stops when no
    swap lowers the variance by more than ``tol``.
    """
    totals = assign.totals
    teams = [sorted(t) for t in assign.teams]
    swaps = []
    variances = [balance_metrics(assign).variance]
    while True:
        swap = _best_swap(teams, totals, tol)
        if swap is None:
            break
        ta, tb = teams[swap.team_a], teams[swap.team_b]
        ta.remove(swap.roll_a)
        tb.remove(swap.roll_b)
        ta.append(swap.roll_b)
        tb.append(swap.roll_a)
        ta.sort()
        tb.sort()
        swaps.append(swap)
        variances.append(_pvariance(Fraction(sum(totals[r] for r in t), len(t)) for t in teams))
    result = TeamAssignment(tuple(map(tuple, teams)), totals, assign.team_size)
    return SearchResult(result, tuple(swaps), tuple(variances))


def local_search_rebalance(assign: TeamAssignment, tol: float = SWAP_TOLERANCE) -> TeamAssignment:
    return local_search(assign, tol).assignment


def form_teams(scores: Scores, team_size: int = 4) -> SearchResult:
    """Fold pairing followed by swap local search."""
    return local_search(fold_assign(scores, team_size))


def exact_min_variance(scores: Scores, team_size: int, limit: int = EXACT_LIMIT) -> TeamAssignment:
    """Globally variance-minimal assignment by exhaustive enumeration (``n <= limit``).

    Among optimal assignments the one with the lexicographically smallest
    listing of roll-sorted teams (teams ordered by their first roll) wins.
    """
    totals = _totals(scores)
    n = len(totals)
    if n > limit:
        raise InstanceTooLarge(f"exact search is limited to {limit} students, got {n}")
    caps = size_profile(n, team_size)
    k = len(caps)
    big, small = caps[0], caps[-1]
    n_big = caps.count(big)
    rolls = sorted(totals)
    vals = [totals[r] for r in rolls]
    scale = math.lcm(big, small)

    best_obj = None
    best_listing = None

    def visit(remaining, n_big_left, n_small_left, blocks):
        nonlocal best_obj, best_listing
        if not remaining:
            # k^2 * scale^2 * variance, kept integral
            scaled = [sum(vals[i] for i in b) * (scale // len(b)) for b in blocks]
            obj = k * sum(m * m for m in scaled) - sum(scaled) ** 2
            listing = tuple(tuple(rolls[i] for i in b) for b in blocks)
            if best_obj is None or (obj, listing) < (best_obj, best_listing):
                best_obj, best_listing = obj, listing
            return
        anchor, rest = remaining[0], remaining[1:]
        options = []
        if n_big_left:
            options.append((big, n_big_left - 1, n_small_left))
        if n_small_left:
            options.append((small, n_big_left, n_small_left - 1))
        for size, nb, ns in options:
            for mates in combinations(rest, size - 1):
                chosen = set(mates)
                left = tuple(i for i in rest if i not in chosen)
                visit(left, nb, ns, blocks + [(anchor, *mates)])

    visit(tuple(range(n)), n_big, k - n_big, [])
    return TeamAssignment(best_listing, totals, team_size)


def random_assign(scores: Scores, team_size: int, seed: int) -> TeamAssignment:
    """Seeded uniform shuffle of the roll-sorted cohort, chunked into the size profile."""
    totals = _totals(scores)
    caps = size_profile(len(totals), team_size)
    rolls = sorted(totals)
    random.Random(seed).shuffle(rolls)
    teams, start = [], 0
    for c in caps:
        teams.append(tuple(rolls[start:start + c]))
        start += c
    return TeamAssignment(tuple(teams), totals, team_size)
