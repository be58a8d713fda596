from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest

from ccsim.combinatorics import binomial
from ccsim.errors import ParameterError
from ccsim.memory_sharing import (dof_gap_bound, memory_sharing_delay,
                                  plan_memory_sharing)


def enumerated_exact_delay(plan):
    """Independent oracle: literally walk every transmission of both
    subsystems of the padded system and add up the slot durations."""
    groups = plan.K_hat // plan.L
    members = [tuple(step * groups + g for step in range(plan.L))
               for g in range(1, groups + 1)]
    total = Fraction(0)
    for gamma_part, weight in ((plan.gamma_prime, plan.p),
                               (plan.gamma_dprime, 1 - plan.p)):
        if weight == 0:
            continue
        cached = int(plan.K_hat * gamma_part) // plan.L
        subfiles = binomial(groups, cached)
        duration = Fraction(weight) / subfiles
        for clique in combinations(range(1, groups + 1), cached + 1):
            served_real = [u for g in clique for u in members[g - 1]
                           if u <= plan.K]
            assert served_real, "phantom-only transmission should not occur"
            total += duration
    return total


class TestPlanMemorySharing:
    def test_worked_case(self):
        plan = plan_memory_sharing(7, 2, Fraction(2, 7))
        assert plan.K_hat == 8
        assert plan.gamma_prime == Fraction(1, 4)
        assert plan.gamma_dprime == Fraction(1, 2)
        assert plan.p == Fraction(6, 7)
        assert not plan.degenerate
        # per-part subfile counts 4 and 6
        assert plan.total_subpacketization == 4 + 6
        assert plan.subsystem_a.K == 8 and plan.subsystem_a.gamma == Fraction(1, 4)
        assert plan.subsystem_b.gamma == Fraction(1, 2)

    def test_degenerate_when_divisible(self):
        plan = plan_memory_sharing(50, 5, Fraction(3, 10))
        assert plan.degenerate
        assert plan.p == 1
        assert plan.K_hat == 50
        assert plan.gamma_prime == plan.gamma_dprime == Fraction(3, 10)
        assert plan.total_subpacketization == 120
        assert plan.exact_delay == plan.analytic_delay == Fraction(7, 4)

    def test_cache_budget_preserved(self):
        for K, L, a in ((7, 2, 2), (11, 3, 4), (13, 4, 6), (9, 5, 3), (23, 8, 7)):
            plan = plan_memory_sharing(K, L, Fraction(a, K))
            assert plan.p * plan.gamma_prime + (1 - plan.p) * plan.gamma_dprime \
                == Fraction(a, K)
            assert plan.gamma_prime <= Fraction(a, K) <= plan.gamma_dprime

    def test_split_fraction_lower_bound(self):
        # non-degenerate splits keep at least 1/K of each file in part one
        for K in range(2, 40):
            for L in range(2, 9):
                for a in range(0, K + 1):
                    plan = plan_memory_sharing(K, L, Fraction(a, K))
                    if not plan.degenerate:
                        assert plan.p >= Fraction(1, K)

    def test_non_integer_redundancy_rejected(self):
        with pytest.raises(ParameterError):
            plan_memory_sharing(7, 2, Fraction(1, 3))

    def test_gamma_zero_and_one(self):
        zero = plan_memory_sharing(7, 2, Fraction(0))
        assert zero.degenerate and zero.exact_delay == 4  # ceil(7/2) slots
        full = plan_memory_sharing(7, 2, Fraction(1))
        assert full.degenerate and full.exact_delay == 0


class TestDelays:
    def test_worked_case_exact_and_analytic(self):
        plan = plan_memory_sharing(7, 2, Fraction(2, 7))
        analytic, exact = memory_sharing_delay(plan, 7)
        assert exact == Fraction(29, 21)
        # m' = 7*(6/7)*(3/4) = 9/2 over DoF 4, m'' = 1/2 over DoF 6
        assert analytic == Fraction(9, 2) / 4 + Fraction(1, 2) / 6 == Fraction(29, 24)
        assert plan.exact_delay == exact
        assert plan.analytic_delay == analytic

    def test_exact_matches_enumeration_oracle(self):
        for K, L, a in ((7, 2, 2), (9, 4, 3), (10, 3, 4), (6, 4, 2),
                        (13, 2, 5), (11, 3, 0)):
            plan = plan_memory_sharing(K, L, Fraction(a, K))
            assert plan.exact_delay == enumerated_exact_delay(plan)

    def test_degenerate_padded_delay(self):
        # divisible redundancy but padded users: the single subsystem runs on
        # K_hat users
        plan = plan_memory_sharing(6, 4, Fraction(1, 2))
        assert plan.degenerate and plan.K_hat == 8
        assert plan.exact_delay == Fraction(8 - 4, 4 + 4) * 1  # K_hat(1-g)/(L+K_hat g)
        assert plan.analytic_delay == Fraction(6 - 3, 4 + 4)


class TestGapBound:
    def test_small_redundancy_bound_two(self):
        assert dof_gap_bound(7, 2, Fraction(2, 7)) == 2
        plan = plan_memory_sharing(7, 2, Fraction(2, 7))
        assert plan.realized_dof == Fraction(105, 29)
        assert plan.realized_dof >= Fraction(2 + 2, 2)

    def test_ratio_regions(self):
        # redundancy at 3.5x the antenna count: bound (3+1)/3
        assert dof_gap_bound(70, 4, Fraction(1, 5)) == Fraction(4, 3)
        assert dof_gap_bound(30, 2, Fraction(1, 2)) == Fraction(8, 7)

    def test_integer_case_gap_one(self):
        plan = plan_memory_sharing(50, 5, Fraction(3, 10))
        assert plan.realized_dof == 5 + 15

    def test_gap_holds_on_sweep(self):
        for K in range(2, 31):
            for L in range(1, 9):
                for a in range(0, K + 1):
                    if L >= K - a:  # interference-free regime: scheme unused
                        continue
                    plan = plan_memory_sharing(K, L, Fraction(a, K))
                    assert plan.realized_dof is not None
                    assert plan.realized_dof >= Fraction(L + a) / plan.gap_bound
