"""Closed-form planning quantities for the grouped multicast scheme:
subpacketization, delay and DoF, plus the effective (subpacketization-capped)
caching gains and the related design thresholds.

All counts are exact big integers and all delays exact rationals; floats only
appear in the logarithmic bound formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .combinatorics import binomial
from .errors import DivisibilityError, ParameterError


@dataclass(frozen=True)
class SystemParams:
    """Broadcast system description: K single-antenna users, an L-antenna
    transmitter and a normalized per-user cache ratio gamma = M/N.

    A gamma whose K*gamma is not an integer is floored onto the feasible grid
    at construction time (the planner only operates on integer redundancy).
    """

    K: int
    L: int
    gamma: Fraction
    s_max: int | None = None

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ParameterError(f"K must be >= 1, got {self.K}")
        if self.L < 1:
            raise ParameterError(f"L must be >= 1, got {self.L}")
        g = Fraction(self.gamma)
        if not 0 <= g <= 1:
            raise ParameterError(f"gamma must lie in [0, 1], got {g}")
        object.__setattr__(self, "gamma", Fraction(math.floor(self.K * g), self.K))
        if self.s_max is not None and self.s_max < 1:
            raise ParameterError(f"s_max must be positive, got {self.s_max}")

    @property
    def cache_redundancy(self) -> int:
        """K*gamma: how many user caches hold each subfile."""
        return int(self.K * self.gamma)


@dataclass(frozen=True)
class GainReport:
    """Effective operating point under a subpacketization cap.

    Integer-valued gains are reported on the feasible parameter grid; any
    extra fractional improvement available from memory sharing between
    neighboring grid points is not included.
    """

    effective_K: int
    effective_gain: int
    effective_dof: int
    theoretical_gain: int
    theoretical_dof: int
    subpacketization: int
    lower_bound_gain: float


def subpacketization_single(K: int, t: int) -> int:
    """Subfiles per file needed by the single-stream scheme: C(K, t)."""
    if not 0 <= t <= K:
        raise ParameterError(f"need 0 <= t <= K, got t={t}, K={K}")
    return binomial(K, t)


def subpacketization_grouped(K: int, L: int, t: int) -> int:
    """Subfiles per file with L transmit antennas: C(K/L, t/L).

    Requires L | K and L | t; anything else must go through the
    memory-sharing planner.
    """
    if not 0 <= t <= K:
        raise ParameterError(f"need 0 <= t <= K, got t={t}, K={K}")
    if L < 1:
        raise ParameterError(f"L must be >= 1, got {L}")
    if K % L or t % L:
        raise DivisibilityError(
            f"L={L} must divide K={K} and K*gamma={t}; "
            "use plan_memory_sharing for these parameters")
    return binomial(K // L, t // L)


def theoretical_performance(params: SystemParams) -> tuple[int, Fraction]:
    """(sum DoF, normalized delay) without any subpacketization cap.

    When L >= K(1-gamma) the transmitter can serve everyone interference-free
    in one shot, so the delay is 1-gamma and the DoF equals K.
    """
    t = params.cache_redundancy
    remaining = params.K - t  # K(1-gamma) on the integer grid
    if params.L >= remaining:
        return params.K, Fraction(remaining, params.K)
    dof = params.L + t
    return dof, Fraction(remaining, dof)


def effective_K(gamma: Fraction, s_max: int | None = None, L: int = 1,
                K: int | None = None) -> int:
    """Largest feasible user count whose grouped subpacketization fits under
    the cap.

    Feasible counts k satisfy k*gamma integer, L | k and L | k*gamma. With
    K=None the search is unbounded (the cap alone limits it), which needs
    0 < gamma < 1. Returns 0 when no feasible count exists.
    """
    g = Fraction(gamma)
    if not 0 <= g <= 1:
        raise ParameterError(f"gamma must lie in [0, 1], got {g}")
    if L < 1:
        raise ParameterError(f"L must be >= 1, got {L}")
    if s_max is not None and s_max < 1:
        raise ParameterError(f"s_max must be positive, got {s_max}")
    if g == 0 or g == 1:
        # one subfile per file regardless of the user count
        if K is None:
            raise ParameterError("unbounded search requires 0 < gamma < 1")
        return (K // L) * L
    a, d = g.numerator, g.denominator
    step = d * math.lcm(L // math.gcd(L, d), L // math.gcd(L, a))
    if s_max is None:
        if K is None:
            raise ParameterError("either s_max or K must bound the search")
        return (K // step) * step
    best = 0
    cand = step
    while K is None or cand <= K:
        if binomial(cand // L, (cand * a // d) // L) > s_max:
            break
        best = cand
        cand += step
    return best


def effective_gain(params: SystemParams) -> GainReport:
    """Effective caching gain and DoF under the cap params.s_max.

    With L antennas the single-antenna operating point is scaled: the
    reachable user count is min(L * K1, K) and the gain min(L * G1, K*gamma),
    where K1/G1 come from the L=1 search under the same cap. The reported
    subpacketization is the one actually used at the grid operating point.
    """
    K, L, g, s_max = params.K, params.L, params.gamma, params.s_max
    t = params.cache_redundancy
    k1 = effective_K(g, s_max, 1, K)
    g1 = int(k1 * g)
    k_grid = effective_K(g, s_max, L, K)
    subpack = binomial(k_grid // L, int(k_grid * g) // L) if k_grid else 1
    if s_max is None:
        lower = float(t)
    elif t == 0:
        lower = 0.0
    else:
        lower = min(L * math.log(s_max) / (1 + math.log(1 / float(g))), float(t))
    return GainReport(
        effective_K=min(L * k1, K),
        effective_gain=min(L * g1, t),
        effective_dof=L + min(L * g1, t),
        theoretical_gain=t,
        theoretical_dof=L + t,
        subpacketization=subpack,
        lower_bound_gain=lower,
    )


def dof_multiplier_subpacketization(lam: Fraction, x: int) -> int:
    """Subfiles needed for a DoF equal to x times the multiplexing gain,
    when every 1/lam users share one transmit antenna: C(1/lam, x-1)."""
    lam = Fraction(lam)
    if lam <= 0 or (1 / lam).denominator != 1:
        raise ParameterError(f"1/lam must be a positive integer, got lam={lam}")
    if x < 1:
        raise ParameterError(f"x must be >= 1, got {x}")
    if lam * (x - 1) > 1:
        raise ParameterError(
            f"x={x} needs cache ratio lam*(x-1)={lam * (x - 1)} > 1")
    return binomial(int(1 / lam), x - 1)


def pd_lc_subpacketization(gamma: Fraction, K: int) -> Fraction:
    """Subfiles per file used by the reduced-subpacketization single-stream
    designs (placement-delivery arrays / linear codes): (1/gamma)^(K*gamma-1)."""
    g = Fraction(gamma)
    if not 0 < g < 1:
        raise ParameterError(f"need 0 < gamma < 1, got {g}")
    t = math.floor(K * g)
    if t < 1:
        raise ParameterError(f"K*gamma must be >= 1, got {K * g}")
    return (1 / g) ** (t - 1)


def pd_lc_elevated_gain(gamma: Fraction, s_max: int, L: int, K: int) -> float:
    """Effective caching gain when the reduced-subpacketization single-stream
    designs are elevated to L antennas:
    min(L * ln(s_max)/ln(1/gamma), K*gamma - L), floored at 0."""
    g = Fraction(gamma)
    if not 0 <= g < 1:
        raise ParameterError(f"need 0 <= gamma < 1, got {g}")
    if s_max < 1:
        raise ParameterError(f"s_max must be positive, got {s_max}")
    t = math.floor(K * g)
    if t <= L or g == 0:
        return 0.0
    value = min(L * math.log(s_max) / math.log(1 / float(g)), float(t - L))
    return max(value, 0.0)


def min_gamma_for_gain(gain: int, s_max: int, L: int = 1) -> float:
    """Smallest cache ratio that can still reach the target caching gain under
    the cap: s_max**(-L/gain). Decreasing in L."""
    if gain < 1:
        raise ParameterError(f"gain must be >= 1, got {gain}")
    if s_max < 2:
        raise ParameterError(f"s_max must be >= 2, got {s_max}")
    if L < 1:
        raise ParameterError(f"L must be >= 1, got {L}")
    return math.exp(-L / gain * math.log(s_max))
