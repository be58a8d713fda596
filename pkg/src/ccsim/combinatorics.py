"""Exact combinatorial primitives: arbitrary-precision binomials, ordered
subset families and exact rationals.

Subset families are 1-based and lexicographically ordered; the position of a
subset within its family is the canonical subfile index used by placement
layouts and delivery reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator

from .errors import ParameterError

# Cache ratios, delays, DoF values and split fractions are all kept exact.
Rational = Fraction


def binomial(n: int, k: int) -> int:
    """n choose k as an exact big integer; 0 whenever k < 0 or k > n."""
    if n < 0:
        raise ParameterError(f"binomial: n must be nonnegative, got {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _check_sizes(ground_size: int, subset_size: int) -> None:
    if ground_size < 0 or not 0 <= subset_size <= ground_size:
        raise ParameterError(
            f"need 0 <= subset_size <= ground_size, got "
            f"({ground_size}, {subset_size})")


def iter_subsets(ground_size: int, subset_size: int) -> Iterator[tuple[int, ...]]:
    """Lexicographic stream of all subset_size-subsets of {1..ground_size}."""
    _check_sizes(ground_size, subset_size)
    return combinations(range(1, ground_size + 1), subset_size)


@dataclass(frozen=True)
class SubsetFamily:
    """All subsets of {1..ground_size} of one fixed size, in lexicographic
    order. Indices into this order identify subfiles everywhere else."""

    ground_size: int
    subset_size: int
    subsets: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.subsets)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.subsets)

    def __getitem__(self, index: int) -> tuple[int, ...]:
        return self.subsets[index]

    @cached_property
    def _ranks(self) -> dict[tuple[int, ...], int]:
        return {subset: index for index, subset in enumerate(self.subsets)}

    def index_of(self, subset: Iterable[int]) -> int:
        """Lexicographic rank of a member subset; raises if not a member."""
        sub = tuple(subset)
        try:
            return self._ranks[sub]
        except KeyError:
            raise ParameterError(f"{sub} is not a member of this family") from None

    def containing(self, element: int) -> tuple[int, ...]:
        """Indices of every subset that contains the given element."""
        return tuple(i for i, s in enumerate(self.subsets) if element in s)


def enumerate_subsets(ground_size: int, subset_size: int) -> SubsetFamily:
    """Materialize the complete lexicographic family of binomial(n, k) subsets."""
    return SubsetFamily(ground_size, subset_size,
                        tuple(iter_subsets(ground_size, subset_size)))
