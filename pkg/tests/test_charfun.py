import itertools
from fractions import Fraction

import pytest

from fislab import charfun, props
from fislab.charfun import (CharacteristicTable, cf_axp, cf_cxp, cf_expected,
                            cf_generator, cf_similarity, cf_sum, cf_waxp,
                            cf_wcxp, cf_wvg, delta_i, delta_total, dual_table)
from fislab.explain import is_critical
from fislab.model import WeightedVotingGame, mask_of


def brute_expected(problem, fixed: set) -> Fraction:
    """Direct mean over raw tuples, independent of rank enumeration."""
    cls = problem.classifier
    total, count = 0, 0
    for x in itertools.product(*(d.values for d in cls.features)):
        if all(x[i - 1] == problem.v[i - 1] for i in fixed):
            total += cls.evaluate(x)
            count += 1
    return Fraction(total, count)


# ---------------------------------------------------------------------------
# expected value and similarity

def test_expected_value_chain(chain):
    table = cf_expected(chain)
    assert table.value(0) == Fraction(5, 16)
    assert table.value(chain.full_mask) == 1
    assert brute_expected(chain, set()) == Fraction(5, 16)


def test_expected_value_single(single):
    assert cf_expected(single).value(0) == Fraction(1, 2)


def test_expected_matches_brute_force_everywhere(chain):
    table = cf_expected(chain)
    for r in range(5):
        for c in itertools.combinations(range(1, 5), r):
            assert table.value(mask_of(c, 4)) == brute_expected(chain, set(c))


def test_similarity_chain(chain):
    table = cf_similarity(chain)
    assert table.value([1, 2]) == 1
    assert table.value(chain.full_mask) == 1
    assert table.value(0) == Fraction(5, 16)


def test_similarity_one_exactly_on_sufficient_subsets():
    for k in range(25):
        problem = props.random_problem(31, k, (2, 5))
        sim = cf_similarity(problem)
        suff = cf_waxp(problem)
        for mask in range(1 << problem.m):
            assert (sim[mask] == 1) == (suff[mask] == 1)


def test_similarity_vs_expected_boolean_relation():
    seen = set()
    for k in range(40):
        problem = props.random_problem(37, k, (2, 5))
        seen.add(problem.c)
        sim = cf_similarity(problem)
        exp = cf_expected(problem)
        for mask in range(1 << problem.m):
            if problem.c == 1:
                assert sim[mask] == exp[mask]
            else:
                assert sim[mask] == 1 - exp[mask]
    assert seen == {0, 1}  # both label cases exercised


# ---------------------------------------------------------------------------
# indicator tables

def test_minimal_indicator_chain(chain):
    table = cf_axp(chain)
    assert table.value([1, 2]) == 1
    assert table.value([1, 2, 3]) == 0  # sufficient but not minimal
    assert table.value(0) == 0


def test_sufficiency_indicator_chain(chain):
    table = cf_waxp(chain)
    ones = [mask for mask in range(16) if table[mask] == 1]
    assert ones == sorted([mask_of(s, 4) for s in
                           ([1, 2], [1, 2, 3], [1, 2, 4], [1, 3, 4], [1, 2, 3, 4])])
    assert table.value(0) == 0
    assert table.value(chain.full_mask) == 1


def test_contrastive_indicator_chain(chain):
    assert cf_wcxp(chain).value([1]) == 1


def test_generator_single_decider(single):
    table = cf_generator(single)
    assert [table[mask] for mask in range(4)] == [0, 1, 1, 1]


def test_generator_chain_ends(chain):
    table = cf_generator(chain)
    assert table.value(chain.full_mask) == 1  # vacuous
    assert table.value(0) == 0  # no single feature suffices


def test_wvg_table_and_minimal_coalitions():
    from fislab.scores import minimal_winning_coalitions
    game = WeightedVotingGame(3, (2, 1, 1))
    table = cf_wvg(game)
    assert table.value([1, 2]) == 1
    assert table.value([2, 3]) == 0
    assert [set(i + 1 for i in range(3) if s >> i & 1)
            for s in minimal_winning_coalitions(game)] == [{1, 2}, {1, 3}]
    for mask in range(8):
        for i in range(3):
            if not mask >> i & 1:
                assert table[mask | 1 << i] >= table[mask]


def test_wvg_quota_equals_total_weight():
    game = WeightedVotingGame(4, (2, 1, 1))
    table = cf_wvg(game)
    assert [mask for mask in range(8) if table[mask] == 1] == [0b111]


# ---------------------------------------------------------------------------
# sums and deltas

def test_sum_doubles_indicator(chain):
    table = cf_waxp(chain)
    double = cf_sum(table, table)
    for mask in range(16):
        assert double[mask] == 2 * table[mask]


def test_sum_of_expected_and_similarity_at_empty(chain):
    combined = cf_sum(cf_expected(chain), cf_similarity(chain))
    assert combined.value(0) == Fraction(10, 16)


def test_sum_with_zero_table_is_identity(chain):
    table = cf_expected(chain)
    zero = CharacteristicTable(charfun.CF_SUM, 4, (Fraction(0),) * 16, chain)
    assert cf_sum(table, zero).values == table.values


def test_sum_rejects_dimension_mismatch(chain, single):
    with pytest.raises(ValueError):
        cf_sum(cf_waxp(chain), cf_waxp(single))


def test_delta_examples(chain):
    table = cf_waxp(chain)
    assert delta_total(table, [1, 2, 3]) == 2
    assert delta_total(table, chain.full_mask) == 1
    for i in range(1, 5):
        assert delta_i(table, i, [i]) == table.value([i]) - table.value(0)
    with pytest.raises(ValueError):
        delta_i(table, 4, [1, 2])


def test_delta_on_sufficiency_is_criticality(chain):
    problems = [chain] + [props.random_problem(41, k, (2, 5)) for k in range(15)]
    for problem in problems:
        table = cf_waxp(problem)
        for mask in range(1, 1 << problem.m):
            for i in range(1, problem.m + 1):
                if mask >> (i - 1) & 1:
                    d = delta_i(table, i, mask)
                    assert d in (0, 1)
                    assert (d == 1) == is_critical(problem, i, mask)


def test_delta_is_linear_under_sum(chain):
    t1, t2 = cf_expected(chain), cf_waxp(chain)
    combined = cf_sum(t1, t2)
    for mask in range(1, 16):
        for i in range(1, 5):
            if mask >> (i - 1) & 1:
                assert delta_i(combined, i, mask) == \
                    delta_i(t1, i, mask) + delta_i(t2, i, mask)


# ---------------------------------------------------------------------------
# duality of the indicator tables

def test_sufficiency_contrastive_complement_relation():
    for k in range(20):
        problem = props.random_problem(43, k, (2, 6))
        suff = cf_waxp(problem)
        cont = cf_wcxp(problem)
        full = problem.full_mask
        for s in range(1 << problem.m):
            assert (suff[s] == 1) == (cont[full & ~s] == 0)


def test_dual_table_mapping(chain):
    assert dual_table(cf_waxp(chain)).values == cf_wcxp(chain).values
    assert dual_table(cf_axp(chain)).values == cf_cxp(chain).values
    assert dual_table(cf_expected(chain)).values == cf_expected(chain).values
    with pytest.raises(ValueError):
        dual_table(cf_wvg(WeightedVotingGame(1, (1, 1))))


def test_table_invariants_on_random_problems():
    for k in range(15):
        problem = props.random_problem(47, k, (2, 5))
        full = problem.full_mask
        suff = cf_waxp(problem)
        assert suff[full] == 1 and suff[0] == 0
        sim = cf_similarity(problem)
        assert sim[full] == 1
        assert all(0 <= v <= 1 for v in sim.values)
        assert cf_expected(problem)[full] == problem.c
        for mask in range(1 << problem.m):
            for i in range(problem.m):
                if not mask >> i & 1:
                    assert suff[mask | 1 << i] >= suff[mask]


def test_export_rational_strings(chain):
    exported = cf_expected(chain).export()
    assert exported[0] == "5/16"
    assert exported[15] == "1"
    assert len(exported) == 16
