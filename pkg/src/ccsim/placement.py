"""User grouping, cache placement and the clique schedule driving delivery.

Users within a group hold identical caches and are separated spatially, so
the single-stream coded-caching algorithm only ever sees groups. That
algorithm is pluggable; the classic subset-type construction ships as
MNAlgorithm. Everything here is 1-based to keep reports aligned with how the
scheme is usually written down.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator

from .combinatorics import SubsetFamily, binomial, enumerate_subsets
from .errors import DivisibilityError, ParameterError


def build_groups(K: int, L: int) -> tuple[tuple[int, ...], ...]:
    """Split users 1..K into K/L groups of L; group g = {g, K'+g, ..., (L-1)K'+g}."""
    if K < 1 or L < 1:
        raise ParameterError(f"need K, L >= 1, got K={K}, L={L}")
    if K % L:
        raise DivisibilityError(
            f"L={L} must divide K={K}; use plan_memory_sharing otherwise")
    group_count = K // L
    return tuple(tuple(step * group_count + g for step in range(L))
                 for g in range(1, group_count + 1))


@dataclass(frozen=True)
class SubfileIndex:
    """Addresses one subfile: which file, and which slot of the subset family."""

    file_id: int
    tau_index: int


@dataclass(frozen=True)
class Clique:
    """One transmission slot: the groups served together and, aligned with
    them, the subset naming the subfile each group receives."""

    groups: tuple[int, ...]
    subfiles: tuple[tuple[int, ...], ...]

    def subfile_for(self, group: int) -> tuple[int, ...]:
        return self.subfiles[self.groups.index(group)]


class SingleStreamAlgorithm(ABC):
    """Placement rule plus clique schedule of a single-stream coded-caching
    algorithm over group_count virtual users.

    Contract: across the whole clique stream, every (group, non-cached
    subset) pair is served exactly once.
    """

    name: str = "abstract"

    @abstractmethod
    def subset_family(self, group_count: int, gamma: Fraction) -> SubsetFamily:
        """The subset family files are split along."""

    @abstractmethod
    def cache_indices(self, family: SubsetFamily) -> tuple[frozenset[int], ...]:
        """Per group, the family indices held in that group's cache."""

    @abstractmethod
    def iter_cliques(self, family: SubsetFamily) -> Iterator[Clique]:
        """Ordered clique stream with per-group subfile assignments."""

    @abstractmethod
    def iter_clique_groups(self, group_count: int,
                           gamma: Fraction) -> Iterator[tuple[int, ...]]:
        """Lean variant of iter_cliques: group tuples only, no assignments.
        Suitable for exhaustive coverage checks on large instances."""

    @abstractmethod
    def subfile_count(self, group_count: int, gamma: Fraction) -> int:
        """len(subset_family(...)) without materializing it."""

    @abstractmethod
    def clique_count(self, group_count: int, gamma: Fraction) -> int:
        """Number of cliques in the schedule without materializing it."""


class MNAlgorithm(SingleStreamAlgorithm):
    """Subset-type construction: split files along all t-subsets of the
    groups, cache at group g every subset containing g, then serve each
    (t+1)-subset of groups in one slot, giving each member group the subset
    formed by the others."""

    name = "mn"

    def _subset_size(self, group_count: int, gamma: Fraction) -> int:
        t = Fraction(group_count) * Fraction(gamma)
        if t.denominator != 1:
            raise DivisibilityError(
                f"group_count*gamma = {t} must be an integer; "
                "use plan_memory_sharing for these parameters")
        return int(t)

    def subset_family(self, group_count: int, gamma: Fraction) -> SubsetFamily:
        return enumerate_subsets(group_count, self._subset_size(group_count, gamma))

    def cache_indices(self, family: SubsetFamily) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(family.containing(g))
                     for g in range(1, family.ground_size + 1))

    def iter_cliques(self, family: SubsetFamily) -> Iterator[Clique]:
        size = family.subset_size + 1
        for chi in combinations(range(1, family.ground_size + 1), size):
            yield Clique(
                groups=chi,
                subfiles=tuple(chi[:i] + chi[i + 1:] for i in range(size)))

    def iter_clique_groups(self, group_count: int,
                           gamma: Fraction) -> Iterator[tuple[int, ...]]:
        size = self._subset_size(group_count, gamma) + 1
        return combinations(range(1, group_count + 1), size)

    def subfile_count(self, group_count: int, gamma: Fraction) -> int:
        return binomial(group_count, self._subset_size(group_count, gamma))

    def clique_count(self, group_count: int, gamma: Fraction) -> int:
        return binomial(group_count, self._subset_size(group_count, gamma) + 1)


@dataclass(frozen=True)
class PlacementLayout:
    """Complete receiver-side placement: groups, the subset family files are
    split along, and each group's cached subfile indices."""

    K: int
    L: int
    N: int
    gamma: Fraction
    groups: tuple[tuple[int, ...], ...]
    tau_family: SubsetFamily
    per_group_cache: tuple[frozenset[int], ...]
    algorithm: str

    @property
    def group_count(self) -> int:
        return len(self.groups)

    def group_of(self, user: int) -> int:
        if not 1 <= user <= self.K:
            raise ParameterError(f"user {user} outside 1..{self.K}")
        return (user - 1) % self.group_count + 1

    def group_members(self, group: int) -> tuple[int, ...]:
        return self.groups[group - 1]

    def cache_of(self, user: int) -> frozenset[int]:
        """Subfile indices cached by a user (identical within a group)."""
        return self.per_group_cache[self.group_of(user) - 1]

    def non_cached(self, user: int) -> frozenset[int]:
        cached = self.cache_of(user)
        return frozenset(i for i in range(len(self.tau_family)) if i not in cached)

    def to_text(self) -> str:
        lines = [
            f"K: {self.K}",
            f"L: {self.L}",
            f"N: {self.N}",
            f"gamma: {self.gamma}",
            f"algorithm: {self.algorithm}",
            f"group_count: {self.group_count}",
            f"subpacketization: {len(self.tau_family)}",
        ]
        for g, members in enumerate(self.groups, start=1):
            lines.append(f"group {g}: " + " ".join(str(u) for u in members))
        lines.append("tau_family: " + " ".join(
            "(" + ",".join(map(str, subset)) + ")" for subset in self.tau_family))
        for g, cache in enumerate(self.per_group_cache, start=1):
            subsets = " ".join(
                "(" + ",".join(map(str, self.tau_family[i])) + ")"
                for i in sorted(cache))
            lines.append(f"cache group {g}: {subsets}")
        return "\n".join(lines) + "\n"


def build_placement(K: int, L: int, gamma: Fraction, N: int,
                    algorithm: SingleStreamAlgorithm | None = None) -> PlacementLayout:
    """Construct the placement for K users, L antennas and library size N.

    Requires L | K and an integer group_count*gamma (equivalently L | K*gamma
    for integer K*gamma). The resulting layout stores subfile indices only;
    payloads are attached by the delivery simulator.
    """
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    algorithm = algorithm if algorithm is not None else MNAlgorithm()
    gamma = Fraction(gamma)
    if not 0 <= gamma <= 1:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma}")
    groups = build_groups(K, L)
    family = algorithm.subset_family(len(groups), gamma)
    cache = algorithm.cache_indices(family)
    if len(cache) != len(groups):
        raise ParameterError(
            f"algorithm {algorithm.name!r} produced {len(cache)} cache sets "
            f"for {len(groups)} groups")
    for g, indices in enumerate(cache, start=1):
        if Fraction(len(indices), len(family)) != gamma:
            raise ParameterError(
                f"algorithm {algorithm.name!r} broke the cache budget for "
                f"group {g}: {len(indices)}/{len(family)} != {gamma}")
    return PlacementLayout(K=K, L=L, N=N, gamma=gamma, groups=groups,
                           tau_family=family, per_group_cache=cache,
                           algorithm=algorithm.name)


def mn_delivery_cliques(group_count: int, gamma: Fraction) -> list[Clique]:
    """Materialized clique schedule of the subset-type construction."""
    alg = MNAlgorithm()
    return list(alg.iter_cliques(alg.subset_family(group_count, Fraction(gamma))))
