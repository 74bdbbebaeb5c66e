from contrakit.atoms.expr import parse
from contrakit.fpmod import FPModule, random_module
from contrakit.functors import (
    check_properties, delta_multi, delta_s, gamma_I, gamma_routes, gamma_s, implication_violations,
    lambda_s, lim1_sequence, solve_system_fp, telescope,
)
from contrakit.mutations import mutation

Z = FPModule.free(1)
cyc = FPModule.cyclic


def A(text):
    return parse(text)


def test_gamma_examples():
    assert gamma_s(FPModule.from_invariants(1, [12]), 2)[0].invariants == (0, (4,))
    assert gamma_s(FPModule.free(3), 5)[0].is_zero()
    m = FPModule.from_invariants(1, [12])
    assert gamma_s(m, 0)[0].invariants == m.invariants
    assert gamma_s(m, 1)[0].is_zero()


def test_gamma_ideal_examples():
    assert gamma_I(cyc(12), [2, 3])[0].is_zero()
    assert gamma_I(FPModule.from_invariants(1, [12]), [6])[0].invariants == (0, (12,))
    assert gamma_I(cyc(9), [2])[0].is_zero()


def test_lambda_examples():
    assert lambda_s(Z, 6) == A("Zp(2) + Zp(3)")
    assert lambda_s(cyc(8), 2) == A("Z/8")
    assert lambda_s(cyc(12), 5).is_zero()


def test_delta_examples():
    assert str(delta_s(cyc(12), 6)[0]) == "Z/4 + Z/3"
    assert delta_s(FPModule.from_invariants(2, [6]), 1)[0].is_zero()
    assert delta_s(Z, 3)[0] == A("Zp(3)")


def test_delta_multi_examples():
    assert delta_multi(cyc(12), [2, 3]).is_zero()
    m = FPModule.from_invariants(1, [24, 5])
    assert delta_multi(m, [6]) == delta_multi(m, [12])
    cert = {}
    assert delta_multi(Z, [3, 3], cert) == A("Zp(3)")
    assert cert["order_independent"] and cert["equals_gcd"]


def test_lim1_examples():
    for m, s in ((cyc(9), 3), (Z, 5), (cyc(6), 2)):
        data = lim1_sequence(m, s)
        assert data.lim1.is_zero()
    assert lim1_sequence(cyc(6), 2).lim.is_zero()


def test_delta_certificates(rng):
    for _ in range(30):
        m = random_module(rng)
        cert = {}
        value = delta_s(m, 6, cert)[0]
        assert cert["agree"] and cert["lim1_certified"] and cert["power_series_truncation"]
        assert value == delta_s(m, 2)[0] + delta_s(m, 3)[0]


def test_property_examples():
    f = check_properties(Z, 3).flags
    assert f["torsion_free"] and f["separated"]
    assert not f["complete"] and not f["contraadjusted"]
    f = check_properties(cyc(27), 3).flags
    assert all(f[k] for k in ("separated", "complete", "contraadjusted", "contramodule"))
    f = check_properties(cyc(12), 5).flags
    assert f["divisible"]
    # 5 is invertible on Z/12, so Hom(Z[1/5], Z/12) = Z/12 != 0
    assert f["contraadjusted"] and not f["contramodule"]


def test_implications_hold(rng):
    for _ in range(20):
        m = random_module(rng)
        for s in (0, 1, -1, 2, 6, 5):
            assert implication_violations(check_properties(m, s).flags) == []


def test_system_examples():
    sol = solve_system_fp(cyc(8), 2, [[1]], 6)
    assert [cyc(8).coords(b) for b in sol.b[:3]] == [(1,), (0,), (0,)]
    assert sol.unique
    sol = solve_system_fp(cyc(8), 2, [[0]], 6)
    assert sol.unique and all(cyc(8).is_zero_element(b) for b in sol.b)
    sol = solve_system_fp(cyc(12), 5, [[1], [2], [3]], 6)
    assert sol.residuals_zero and not sol.unique and sol.homogeneous_witness


def test_telescope_complex():
    for s in (2, 6):
        for n in (1, 3):
            assert telescope(s, n).verify()


def test_psi_mutation_detected(rng):
    mods = [random_module(rng) for _ in range(10)]
    assert all(gamma_routes(m, 6).agree for m in mods)
    with mutation("psi_sign"):
        assert not all(gamma_routes(m, s).agree for m in mods for s in (2, 6))
