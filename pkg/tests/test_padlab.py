import random

import pytest

from contrakit.mutations import mutation
from contrakit.padlab.lab import SCENARIOS, counterexample_CE, precision_monotonicity, run_scenario
from contrakit.padlab.padic import PadicApprox
from contrakit.padlab.summation import (
    NullSeqC, TowerCarrier, ZpScalar, binomial_sum, check_axioms, check_two_variable,
    one_variable_carriers, solve_telescope, sum_s_power, two_variable_carriers,
)
from contrakit.padlab.tailseq import TailSeq, membership, verify_closed_forms
from contrakit.padlab.tower import TowerElement, nakayama_trace, nested_completion, random_cauchy


def test_geometric_series_in_z2():
    z = ZpScalar(2, 8)
    assert sum_s_power(z, lambda n: z.zero() + 1) == PadicApprox(2, 8, 255)


def test_sum_of_unit_vectors():
    c = NullSeqC(2, 8)
    total = sum_s_power(c, lambda n: TailSeq.unit(2, 8, n))
    assert total == TailSeq.geometric(2, 8, 1)
    assert str(c.sum_diagonal([], 1)) == "TailSeq(p=2, N=8, prefix=[], w=1)"


def test_membership_examples():
    g = TailSeq.geometric(2, 16, 1)
    assert not membership(g, "E") and membership(g, "D")
    assert membership(TailSeq.unit(2, 16, 5).scale(2 ** 5), "E")
    zero = TailSeq.zero(3, 8)
    assert all(membership(zero, s) for s in ("E", "D", "E_plus_pmC(4)"))


def test_membership_matches_definitions():
    assert verify_closed_forms(2, 3, 3).passed


def test_membership_mutation_caught_by_definitions():
    with mutation("e_membership_index"):
        assert not verify_closed_forms(2, 3, 3).passed


@pytest.mark.parametrize("p, N, M", [(2, 16, 12), (3, 16, 12), (2, 5, 0)])
def test_counterexample(p, N, M):
    rep = counterexample_CE(p, N, M)
    assert rep.passed, rep.failures()
    assert "scope" in rep.data


def test_counterexample_needs_room():
    with pytest.raises(ValueError):
        counterexample_CE(2, 4, 4)


@pytest.mark.parametrize("inst", one_variable_carriers(16), ids=lambda c: c.name)
def test_one_variable_axioms(inst):
    assert check_axioms(inst, trials=15, seed=3).passed


@pytest.mark.parametrize("inst", two_variable_carriers(12), ids=lambda c: c.name)
def test_two_variable_axioms(inst):
    assert check_two_variable(inst, trials=8, seed=3).passed


def test_plus_sum_of_unit():
    t = TowerCarrier(2, 8)
    assert binomial_sum(t, [TowerElement.one(2, 8)]) == TowerElement.one(2, 8)


def test_binomial_mutation_detected():
    inst = TowerCarrier(2, 10)
    with mutation("binomial_index"):
        assert not check_two_variable(inst, trials=8, seed=1).passed


def test_telescope_solution():
    z = ZpScalar(2, 12)
    rep = solve_telescope(z, [z.zero() + v for v in (5, 7, 1)])
    assert rep.passed
    b = rep.data["b"]
    assert [int(x) for x in b] == [23, 9, 1]


def test_nakayama_deep_element_reaches_depth():
    rng = random.Random(5)
    d0 = TowerElement.random(rng, 2, 12, power=6)
    assert nakayama_trace(d0, 6).passed


def test_nakayama_px_stops_at_depth_two():
    px = TowerElement.from_coeffs(2, 8, [0, 2])
    rep = nakayama_trace(px, 6)
    assert rep.data["depth_reached"] == 2
    assert not rep.passed
    assert rep.checks[0].passed


def test_nested_completion_geometric():
    K = 8
    px = TowerElement.from_coeffs(2, K, [0, 2])
    powers = [TowerElement.one(2, K)]
    for _ in range(K):
        powers.append(powers[-1] * px)
    # c_n sums (px)^k over 2k < n
    c = [sum((powers[k] for k in range(1, K) if 2 * k < n), powers[0]) for n in range(1, K + 1)]
    full = sum(powers[1:K], powers[0])
    rep = nested_completion(c)
    assert rep.passed and rep.data["b"] == full


def test_nested_completion_independent_of_decomposition():
    rng = random.Random(11)
    for _ in range(10):
        c = random_cauchy(rng, 3, 6)
        plain = nested_completion(c)
        traded = nested_completion(c, random.Random(rng.random()), trades=12)
        assert plain.passed and traded.passed
        assert plain.data["b"] == traded.data["b"]


def test_precision_monotonicity():
    assert precision_monotonicity(seed=2, trials=8).passed


@pytest.mark.parametrize("name", SCENARIOS)
def test_lab_scenarios(name):
    assert run_scenario(name, N=12, M=8, K=6, trials=10).passed
