from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fitland.core import build_histogram, global_proportions, pn_plus
from fitland.errors import InconsistentMultiplicity
from fitland.problems import (
    SatInstance,
    SpecError,
    SumOfTermsProblem,
    TspInstance,
    TspProblem,
    convolution_census,
    make_footnote_tsp,
    make_random_3sat,
    make_sum_of_terms,
    make_toy_fig3,
    parse_problem,
    tsp_census,
)
from fitland.problems.sat import expected_overlap, expected_overlap_with_replacement, flip_overlap_fraction
from fitland.problems.tsp import footnote_distances, load_tsp, tour_length_counts
from fitland.properties import modal_fitness

from oracles import (
    footnote_matrix,
    sum_count_inclusion_exclusion,
    sum_counts_bruteforce,
    tsp_counts_bruteforce,
    tsp_counts_dp,
)


# -- sum of terms --------------------------------------------------------------


def test_sum_of_terms_size():
    p = make_sum_of_terms(5, 5)
    assert p.size == 3125
    assert sum(1 for _ in p.enumerate()) == 3125


def test_sum_of_terms_lexicographic():
    sols = list(SumOfTermsProblem(2, 3).enumerate())
    assert sols == sorted(sols)
    assert sols[0] == (1, 1) and sols[-1] == (3, 3)


def test_sum_of_terms_small_histograms():
    assert build_histogram(SumOfTermsProblem(1, 3)).as_dict() == {1: 1, 2: 1, 3: 1}
    assert convolution_census(2, 2).as_dict() == {2: 1, 3: 2, 4: 1}


def test_sum_of_terms_symmetric(sum55_hist):
    for j in range(11):
        assert sum55_hist.count(15 - j) == sum55_hist.count(15 + j)


def test_convolution_matches_enumeration_5_5(sum55_hist):
    assert convolution_census(5, 5) == sum55_hist
    assert convolution_census(5, 5).as_dict() == sum_counts_bruteforce(5, 5)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6))
def test_convolution_matches_oracles(k, m):
    conv = convolution_census(k, m)
    assert conv.as_dict() == sum_counts_bruteforce(k, m)
    for s in range(k, k * m + 1):
        assert conv.count(s) == sum_count_inclusion_exclusion(k, m, s)


def test_sum_of_terms_neighbours():
    p = SumOfTermsProblem(3, 5)
    assert sorted(p.neighbours((1, 5, 3))) == [(1, 4, 3), (1, 5, 2), (1, 5, 4), (2, 5, 3)]
    for s in p.enumerate():
        for t in p.neighbours(s):
            assert abs(p.fitness(s) - p.fitness(t)) == 1


def test_sum_of_terms_budget_warning():
    with pytest.warns(UserWarning):
        make_sum_of_terms(30, 10)


# -- TSP ------------------------------------------------------------------------


def test_footnote_distance_sequence():
    seq = footnote_distances()
    assert len(seq) == 66
    assert seq[:4] == [1, 1, 1, 1] and seq[-3:] == [20, 20, 20]
    for v in range(1, 21):
        assert seq.count(v) == (4 if v <= 6 else 3)


def test_footnote_instance_corners():
    inst = make_footnote_tsp(12, 20)
    assert inst.d(1, 2) == 1
    assert inst.d(11, 12) == 20
    assert (inst.array() == footnote_matrix()).all()
    pairs = {(a, b) for a in range(1, 13) for b in range(a + 1, 13)}
    assert len(pairs) == 66


def test_footnote_bad_multiplicity():
    with pytest.raises(InconsistentMultiplicity):
        make_footnote_tsp(12, 19)


def test_footnote_solved_split():
    # 10 cities: 45 pairs = 3 x 4 + 11 x 3 over 14 values
    seq = footnote_distances(10, 14, quadruples=None)
    assert len(seq) == 45 and seq.count(3) == 4 and seq.count(4) == 3


def test_tsp_instance_validation():
    with pytest.raises(ValueError):
        TspInstance(2, ((0, 1), (2, 0)))
    with pytest.raises(ValueError):
        TspInstance(2, ((0, 0), (0, 0)))


def test_tsp_three_cities():
    inst = TspInstance(3, ((0, 1, 1), (1, 0, 1), (1, 1, 0)))
    assert tour_length_counts(inst, parallel=False) == {3: 2}
    assert tsp_census(inst).grid.to_original(tsp_census(inst).v_max) == 3


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_tsp_census_matches_bruteforce(n):
    rng = np.random.default_rng(n)
    D = rng.integers(1, 9, size=(n, n))
    D = np.triu(D, 1)
    D = D + D.T
    inst = TspInstance(n, tuple(map(tuple, D.tolist())))
    expected = tsp_counts_bruteforce(D)
    assert tour_length_counts(inst, parallel=False) == expected
    assert tour_length_counts(inst, parallel=True) == expected


def test_tsp_census_matches_dp_9_cities():
    D = footnote_matrix(12)[:9, :9].copy()
    inst = TspInstance(9, tuple(map(tuple, D.tolist())))
    assert tour_length_counts(inst) == tsp_counts_dp(D)


def test_tsp_relabel_invariance():
    D = footnote_matrix(12)[:8, :8].copy()
    perm = np.random.default_rng(3).permutation(8)
    P = D[np.ix_(perm, perm)]
    a = tour_length_counts(TspInstance(8, tuple(map(tuple, D.tolist()))))
    b = tour_length_counts(TspInstance(8, tuple(map(tuple, P.tolist()))))
    assert a == b


def test_tsp_total_is_factorial():
    D = footnote_matrix(12)[:8, :8].copy()
    counts = tour_length_counts(TspInstance(8, tuple(map(tuple, D.tolist()))))
    assert sum(counts.values()) == 5040


def test_tsp_city_ceiling():
    from fitland.errors import BudgetExceeded
    with pytest.raises(BudgetExceeded):
        tour_length_counts(make_footnote_tsp(), ceiling=11)


def _edges(tour):
    n = len(tour)
    return {frozenset((tour[i], tour[(i + 1) % n])) for i in range(n)}


def test_two_opt_changes_two_distances():
    p = TspProblem(make_footnote_tsp())
    tour = tuple(range(12))
    nbrs = p.neighbours(tour)
    assert len(nbrs) == len(set(nbrs)) == 12 * (12 - 3) // 2
    for t in nbrs:
        old, new = _edges(tour), _edges(t)
        assert len(old - new) == 2 and len(new - old) == 2
        delta = sum(p.instance.dist[a][b] for a, b in map(tuple, new - old)) - \
            sum(p.instance.dist[a][b] for a, b in map(tuple, old - new))
        assert p.fitness(t) - p.fitness(tour) == delta


def test_tsp_problem_histogram_matches_census():
    D = footnote_matrix(12)[:7, :7].copy()
    inst = TspInstance(7, tuple(map(tuple, D.tolist())))
    assert build_histogram(TspProblem(inst)) == tsp_census(inst)


def test_load_tsp(tmp_path):
    path = tmp_path / "four.txt"
    path.write_text("4\n0 1 2 3\n1 0 4 5\n2 4 0 6\n3 5 6 0\n")
    inst = load_tsp(path)
    assert inst.n == 4 and inst.d(3, 4) == 6


def test_load_tsp_rejects_asymmetric(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3\n0 1 2\n1 0 3\n2 4 0\n")
    with pytest.raises(ValueError):
        load_tsp(path)


# -- SAT --------------------------------------------------------------------------


def test_sat_clauses_distinct_variables():
    inst = make_random_3sat(100, 430, 1)
    assert inst.m == 430
    for c in inst.clauses:
        assert len({abs(x) for x in c}) == 3
        assert all(1 <= abs(x) <= 100 for x in c)


def test_sat_deterministic():
    assert make_random_3sat(50, 200, 9) == make_random_3sat(50, 200, 9)
    assert make_random_3sat(50, 200, 9) != make_random_3sat(50, 200, 10)


def test_sat_three_variables():
    inst = make_random_3sat(3, 1, 0)
    assert {abs(x) for x in inst.clauses[0]} == {1, 2, 3}
    assert flip_overlap_fraction(make_random_3sat(3, 7, 4)) == 1


def test_sat_unused_variable_contributes_zero():
    inst = SatInstance(4, ((1, 2, 3), (-1, 2, -3)))
    assert inst.occurrences() == [2, 2, 2, 0]
    assert flip_overlap_fraction(inst) == Fraction(6, 8)


def test_sat_expected_overlap():
    # without replacement: 1 - C(99,3)/C(100,3) = 3/100 exactly
    assert expected_overlap(100) == Fraction(3, 100)
    assert abs(float(expected_overlap_with_replacement(100)) - 0.0297) < 1e-4


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 40), st.integers(1, 60), st.integers(0, 10**6))
def test_sat_overlap_is_three_over_n(n, m, seed):
    assert flip_overlap_fraction(make_random_3sat(n, m, seed)) == Fraction(3, n)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 8), st.integers(1, 12), st.integers(0, 1000))
def test_sat_flip_bounded_by_occurrences(n, m, seed):
    inst = make_random_3sat(n, m, seed)
    occ = inst.occurrences()
    rng = np.random.default_rng(seed)
    s = inst.random_solution(rng)
    for i, t in enumerate(inst.neighbours(s)):
        assert sum(a != b for a, b in zip(s, t)) == 1
        assert abs(inst.fitness(t) - inst.fitness(s)) <= occ[i]


# -- toy --------------------------------------------------------------------------


def test_toy_invariants(toy):
    assert toy.size == 22
    assert build_histogram(toy).as_dict() == {1: 6, 2: 10, 3: 4, 4: 2}
    for a, b in toy.edges():
        assert abs(toy.fitness(a) - toy.fitness(b)) <= 1
    for s in range(22):
        assert s not in toy.neighbours(s)
        for t in toy.neighbours(s):
            assert s in toy.neighbours(t)


def test_toy_statistics(toy_agg):
    assert toy_agg.nf_size(3) == 15
    assert toy_agg.entry(3, 4) == 2
    assert global_proportions(toy_agg.hist, 3)[1] == Fraction(2, 22)
    assert pn_plus(toy_agg, 3) == Fraction(2, 15)
    assert modal_fitness(toy_agg.hist) == 2


def test_toy_is_frozen():
    assert make_toy_fig3().edges() == make_toy_fig3().edges()


# -- spec parsing --------------------------------------------------------------------


def test_parse_problem_variants(tmp_path):
    assert isinstance(parse_problem("sumterms:k=5,m=5"), SumOfTermsProblem)
    assert parse_problem("tsp:footnote").instance == make_footnote_tsp()
    assert parse_problem("sat:n=10,m=20,seed=3") == make_random_3sat(10, 20, 3)
    assert parse_problem("toy:fig3").size == 22
    path = tmp_path / "t.txt"
    path.write_text("3\n0 1 1\n1 0 1\n1 1 0\n")
    assert parse_problem(f"tsp:file={path}").instance.n == 3


@pytest.mark.parametrize("spec", ["", "sumterms", "sumterms:k=5", "sumterms:k=a,m=2",
                                  "tsp:nope", "toy:fig4", "knapsack:n=3"])
def test_parse_problem_errors(spec):
    with pytest.raises(SpecError):
        parse_problem(spec)


# -- frozen footnote census (values fixed by the subset-DP oracle) -----------------------


def test_footnote_census_anchors(footnote_hist):
    grid = footnote_hist.grid
    assert footnote_hist.total == 39916800
    assert grid.to_original(footnote_hist.v_max) == 102
    assert grid.to_original(footnote_hist.v_min) == 140
    assert grid.to_original(modal_fitness(footnote_hist)) == 118
    counts = footnote_hist.original_counts()
    assert (counts[102], counts[110], counts[118], counts[140]) == (576, 1173920, 2582492, 1212)


def test_footnote_proportions_pinned(footnote_hist):
    v_ge = footnote_hist.grid.to_level(110)
    at, better = global_proportions(footnote_hist, v_ge)
    assert at + better == Fraction(65983, 712800)  # length <= 110, about 9.26%
    assert better == Fraction(105047, 1663200)  # length < 110, about 6.32%
