"""Removing the divisibility constraints on the grouped scheme.

Phantom users pad K up to the next multiple of L; when the padded cache
redundancy still does not align with L, every file is split into two parts
cached at the bracketing feasible ratios, each part running the integer
scheme on the padded system. Delays come out exact: the analytic closed form
counts only real-user traffic, while the authoritative exact figure accounts
for every transmission of the padded system, phantom overhead included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .combinatorics import binomial
from .errors import ParameterError
from .formulas import SystemParams


def dof_gap_bound(K: int, L: int, gamma: Fraction) -> Fraction:
    """Multiplicative DoF loss allowed after removing the divisibility
    constraints: 2 while K*gamma <= L, then (q+1)/q with q = floor(K*gamma/L)."""
    t = math.floor(K * Fraction(gamma))
    if t <= L:
        return Fraction(2)
    q = t // L
    return Fraction(q + 1, q)


@dataclass(frozen=True)
class MemorySharingPlan:
    """Two-part split over a phantom-padded system.

    A fraction p of every file is cached at ratio gamma_prime, the rest at
    gamma_dprime; both subsystems satisfy the divisibility constraints on
    K_hat users. Degenerate plans (p = 1, subsystem_b None) reduce to the
    integer scheme on the padded system.
    """

    K: int
    L: int
    gamma: Fraction
    K_hat: int
    gamma_prime: Fraction
    gamma_dprime: Fraction
    p: Fraction
    subsystem_a: SystemParams
    subsystem_b: SystemParams | None
    total_subpacketization: int
    analytic_delay: Fraction
    exact_delay: Fraction
    gap_bound: Fraction

    @property
    def degenerate(self) -> bool:
        return self.subsystem_b is None

    @property
    def realized_dof(self) -> Fraction | None:
        """K(1-gamma) / exact_delay; None when nothing needs delivery."""
        remaining = self.K - int(self.K * self.gamma)
        if self.exact_delay == 0:
            return None
        return Fraction(remaining) / self.exact_delay

    def to_text(self) -> str:
        lines = [
            f"K: {self.K}",
            f"L: {self.L}",
            f"gamma: {self.gamma}",
            f"K_hat: {self.K_hat}",
            f"gamma_prime: {self.gamma_prime}",
            f"gamma_dprime: {self.gamma_dprime}",
            f"p: {self.p}",
            f"degenerate: {self.degenerate}",
            f"total_subpacketization: {self.total_subpacketization}",
            f"analytic_delay: {self.analytic_delay}",
            f"exact_delay: {self.exact_delay}",
            f"realized_dof: {self.realized_dof}",
            f"gap_bound: {self.gap_bound}",
        ]
        return "\n".join(lines) + "\n"

    csv_header = ("K", "L", "gamma", "K_hat", "gamma_prime", "gamma_dprime",
                  "p", "total_subpacketization", "analytic_delay",
                  "exact_delay", "realized_dof", "gap_bound")

    def csv_row(self) -> list[str]:
        dof = self.realized_dof
        return [str(self.K), str(self.L), str(self.gamma), str(self.K_hat),
                str(self.gamma_prime), str(self.gamma_dprime), str(self.p),
                str(self.total_subpacketization), str(self.analytic_delay),
                str(self.exact_delay), "" if dof is None else str(dof),
                str(self.gap_bound)]


def _part_delay(group_count: int, cached_per_group: int, weight: Fraction) -> Fraction:
    """Delay contributed by one file part: clique count times the duration of
    one transmission (part size over the part's subpacketization).

    Group g always contains the real user g <= K, so no transmission slot of
    the padded system is phantom-only and none can be skipped.
    """
    if weight == 0:
        return Fraction(0)
    cliques = binomial(group_count, cached_per_group + 1)
    return cliques * weight / binomial(group_count, cached_per_group)


def plan_memory_sharing(K: int, L: int, gamma: Fraction) -> MemorySharingPlan:
    """Derive the padded user count, the split ratios and fraction, exact and
    analytic delays, and the total subpacketization for arbitrary K, L.

    K*gamma must already be an integer (floor it upstream).
    """
    gamma = Fraction(gamma)
    if K < 1 or L < 1:
        raise ParameterError(f"need K, L >= 1, got K={K}, L={L}")
    if not 0 <= gamma <= 1:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma}")
    t = K * gamma
    if t.denominator != 1:
        raise ParameterError(
            f"K*gamma = {t} must be an integer; floor gamma onto the grid first")
    K_hat = ((K + L - 1) // L) * L
    groups = K_hat // L
    q = Fraction(K_hat, L) * gamma
    lo, hi = math.floor(q), math.ceil(q)
    g_lo = Fraction(L * lo, K_hat)
    g_hi = Fraction(L * hi, K_hat)
    if lo == hi:
        p = Fraction(1)
        subsystem_b = None
        total = binomial(groups, lo)
    else:
        p = (g_hi - gamma) / (g_hi - g_lo)
        subsystem_b = SystemParams(K_hat, L, g_hi)
        total = binomial(groups, lo) + binomial(groups, hi)

    exact = _part_delay(groups, lo, p) + _part_delay(groups, hi, 1 - p)
    analytic = Fraction(0)
    if p:
        analytic += K * p * (1 - g_lo) / (L + L * lo)
    if p != 1:
        analytic += K * (1 - p) * (1 - g_hi) / (L + L * hi)

    # padded-and-split subpacketization never exceeds K times the worse part;
    # with gamma = 1 nothing is delivered and the cap formula degenerates
    if t < K:
        cap = K * max(binomial(-(-K // L), int(t) // L + 1),
                      binomial(-(-K // L), -(-int(t) // L) + 1))
        assert total <= cap, f"subpacketization {total} exceeds bound {cap}"

    gap = dof_gap_bound(K, L, gamma)
    remaining = K - int(t)
    # the gap guarantee covers the regime where zero-forcing alone cannot
    # already serve everyone at once (L < K(1-gamma))
    if exact > 0 and L < remaining:
        assert Fraction(remaining) / exact >= Fraction(L + int(t)) / gap, (
            f"realized DoF fell outside the gap bound for K={K} L={L} "
            f"gamma={gamma}")

    return MemorySharingPlan(
        K=K, L=L, gamma=gamma, K_hat=K_hat, gamma_prime=g_lo,
        gamma_dprime=g_hi if subsystem_b is not None else g_lo, p=p,
        subsystem_a=SystemParams(K_hat, L, g_lo), subsystem_b=subsystem_b,
        total_subpacketization=total, analytic_delay=analytic,
        exact_delay=exact, gap_bound=gap)


def memory_sharing_delay(plan: MemorySharingPlan,
                         K: int | None = None) -> tuple[Fraction, Fraction]:
    """(analytic, exact) delay of a plan, re-derived from its split fields.

    The analytic figure charges only the real users' traffic
    m' = K p (1-gamma'), m'' = K (1-p) (1-gamma'') at the two subsystem DoFs;
    the exact figure enumerates every transmission of the padded system.
    """
    K = plan.K if K is None else K
    groups = plan.K_hat // plan.L
    lo = int(plan.K_hat * plan.gamma_prime) // plan.L
    hi = int(plan.K_hat * plan.gamma_dprime) // plan.L
    exact = (_part_delay(groups, lo, plan.p)
             + _part_delay(groups, hi, 1 - plan.p))
    analytic = Fraction(0)
    if plan.p:
        analytic += K * plan.p * (1 - plan.gamma_prime) / (plan.L + plan.L * lo)
    if plan.p != 1:
        analytic += (K * (1 - plan.p) * (1 - plan.gamma_dprime)
                     / (plan.L + plan.L * hi))
    return analytic, exact
