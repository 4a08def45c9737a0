from fractions import Fraction as F
from random import Random

import pytest

import otdual as ot
from otdual.errors import DimensionMismatch, InfeasibleMarginals
from otdual.instances import random_cost_matrix, random_coupling, random_weights

HALF = (F(1, 2), F(1, 2))
SWAP_COST = ((0, 1), (1, 0))


def test_single_cell_instance():
    report = ot.solve_alpha([[7]], [1], [1])
    assert report.value == 7
    assert report.coupling.matrix == ((1,),)


def test_swap_cost_alpha_is_diagonal():
    report = ot.solve_alpha(SWAP_COST, HALF, HALF)
    assert report.value == 0
    assert report.coupling.matrix == ((F(1, 2), 0), (0, F(1, 2)))


def test_swap_cost_alpha_star_is_antidiagonal():
    report = ot.solve_alpha_star(SWAP_COST, HALF, HALF)
    assert report.value == 1
    assert report.coupling.matrix == ((0, F(1, 2)), (F(1, 2), 0))


def test_swap_cost_beta_values_and_witnesses():
    beta = ot.solve_beta(SWAP_COST, HALF, HALF)
    assert beta.value == 0
    assert ot.is_feasible_potential(beta.potentials, ot.as_cost(SWAP_COST).values)
    # (0, 0) is feasible and already optimal for the lower dual
    zero_pair = ot.PotentialPair(f=(0, 0), g=(0, 0), side="lower")
    assert zero_pair.dual_value(HALF, HALF) == beta.value

    beta_star = ot.solve_beta_star(SWAP_COST, HALF, HALF)
    assert beta_star.value == 1
    assert ot.is_feasible_potential(beta_star.potentials, ot.as_cost(SWAP_COST).values)
    half_pair = ot.PotentialPair(f=HALF, g=HALF, side="upper")
    assert ot.is_feasible_potential(half_pair, ot.as_cost(SWAP_COST).values)
    assert half_pair.dual_value(HALF, HALF) == beta_star.value


def test_chain_on_swap_cost():
    chain = ot.check_chain(SWAP_COST, HALF, HALF)
    assert chain.as_tuple() == (0, 0, 1, 1)
    assert chain.ok


def test_chain_degenerates_on_single_cell():
    chain = ot.check_chain([[F(5, 3)]], [1], [1])
    assert chain.as_tuple() == (F(5, 3),) * 4


def test_separable_cost_closes_every_gap():
    f = (F(1, 3), F(-1), F(2))
    g = (F(0), F(5, 2))
    mu = (F(1, 4), F(1, 4), F(1, 2))
    nu = (F(2, 3), F(1, 3))
    expected = sum(a * b for a, b in zip(mu, f)) + sum(a * b for a, b in zip(nu, g))
    chain = ot.check_chain(ot.separable_cost(f, g), mu, nu)
    assert chain.as_tuple() == (expected,) * 4


def test_point_mass_row_gives_expectation():
    nu = (F(1, 6), F(1, 3), F(1, 2))
    c = ((2, -4, 6),)
    expected = sum(w * x for w, x in zip(nu, c[0]))
    assert ot.solve_alpha_star(c, (1,), nu).value == expected
    assert ot.solve_alpha(c, (1,), nu).value == expected


def test_constant_cost_is_constant():
    c = ot.constant_cost(2, 3, F(7, 2))
    chain = ot.check_chain(c, HALF, (F(1, 3),) * 3)
    assert chain.as_tuple() == (F(7, 2),) * 4


def test_shift_identity_for_beta():
    rng = Random(0)
    mu = random_weights(rng, 3)
    nu = random_weights(rng, 4)
    c = random_cost_matrix(rng, 3, 4)
    t = F(9, 7)
    base = ot.solve_beta(c, mu, nu).value
    shifted = ot.solve_beta(ot.CostMatrix(values=ot.costs.shift_matrix(c, t)), mu, nu).value
    assert shifted == base + t


def test_negation_symmetry_exact():
    rng = Random(1)
    for _ in range(10):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        mu = random_weights(rng, m)
        nu = random_weights(rng, n)
        c = random_cost_matrix(rng, m, n)
        neg = tuple(tuple(-x for x in row) for row in c)
        assert ot.solve_alpha_star(c, mu, nu).value == -ot.solve_alpha(neg, mu, nu).value
        assert ot.solve_beta_star(c, mu, nu).value == -ot.solve_beta(neg, mu, nu).value


def test_alpha_report_satisfies_complementary_slackness():
    rng = Random(6)
    for _ in range(10):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        mu = random_weights(rng, m)
        nu = random_weights(rng, n)
        c = random_cost_matrix(rng, m, n)
        report = ot.solve_alpha(c, mu, nu)
        assert ot.is_feasible_potential(report.potentials, ot.as_cost(c).values)
        assert report.potentials.dual_value(mu, nu) == report.value
        for i in range(m):
            for j in range(n):
                if report.coupling.matrix[i][j] > 0:
                    assert c[i][j] == report.potentials.f[i] + report.potentials.g[j]


def test_weak_duality_against_random_witnesses():
    rng = Random(2)
    for _ in range(30):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        mu = random_weights(rng, m)
        nu = random_weights(rng, n)
        c = random_cost_matrix(rng, m, n)
        # random feasible lower pair: shift g down by the worst violation
        f = tuple(F(rng.randint(-8, 8), 3) for _ in range(m))
        g_raw = [F(rng.randint(-8, 8), 3) for _ in range(n)]
        slack = min(
            c[i][j] - f[i] - g_raw[j] for i in range(m) for j in range(n)
        )
        g = tuple(x + slack for x in g_raw)
        pair = ot.PotentialPair(f=f, g=g, side="lower")
        assert ot.is_feasible_potential(pair, ot.as_cost(c).values)
        plan = random_coupling(rng, mu, nu)
        assert pair.dual_value(mu, nu) <= ot.transport_value(plan, ot.as_cost(c).values)


def test_permuting_labels_preserves_values_and_optimality():
    rng = Random(3)
    for _ in range(15):
        m, n = rng.randint(2, 5), rng.randint(2, 5)
        mu = random_weights(rng, m)
        nu = random_weights(rng, n)
        c = random_cost_matrix(rng, m, n)
        sigma = list(range(m))
        tau = list(range(n))
        rng.shuffle(sigma)
        rng.shuffle(tau)
        cp = tuple(tuple(c[sigma[i]][tau[j]] for j in range(n)) for i in range(m))
        mup = tuple(mu[sigma[i]] for i in range(m))
        nup = tuple(nu[tau[j]] for j in range(n))
        original = ot.check_chain(c, mu, nu)
        permuted = ot.check_chain(cp, mup, nup)
        assert original.as_tuple() == permuted.as_tuple()
        # the permuted optimal coupling is optimal for the permuted instance
        plan = ot.solve_alpha(c, mu, nu).coupling.matrix
        plan_p = tuple(
            tuple(plan[sigma[i]][tau[j]] for j in range(n)) for i in range(m)
        )
        assert ot.transport_value(plan_p, cp) == permuted.alpha


def test_degenerate_zero_weight_points_are_kept():
    mu = (F(1, 2), 0, F(1, 2))
    nu = (0, 1)
    c = ((1, 2), (100, 100), (3, 0))
    chain = ot.check_chain(c, mu, nu)
    assert chain.ok
    report = ot.solve_alpha(c, mu, nu)
    assert report.coupling.matrix[1] == (0, 0)
    assert all(row[0] == 0 for row in report.coupling.matrix)
    assert report.value == F(1, 2) * 2 + F(1, 2) * 0


def test_infeasible_marginals_rejected():
    with pytest.raises(InfeasibleMarginals):
        ot.solve_alpha([[1]], [F(1, 2)], [1])
    with pytest.raises(InfeasibleMarginals):
        ot.solve_alpha([[1, 0]], [1], [F(3, 2), F(-1, 2)])


def test_dimension_mismatch_rejected():
    with pytest.raises(DimensionMismatch):
        ot.solve_alpha([[1, 2]], [1], [1])


def test_float_mode_agrees_within_tolerance():
    mu = (0.5, 0.5)
    nu = (0.25, 0.75)
    c = ((0.0, 1.0), (1.0, 0.0))
    chain = ot.check_chain(c, mu, nu)
    assert chain.ok
    assert abs(chain.alpha - chain.beta) <= 1e-9
    assert abs(chain.alpha - 0.25) <= 1e-9
    report = ot.solve_alpha(c, mu, nu)
    assert report.arithmetic_mode == "float"
    defects = ot.coupling_defects(report.coupling)
    assert defects.ok


def test_coupling_defects_flags_bad_marginals():
    bad = ot.Coupling(matrix=((F(1, 2), 0), (0, F(1, 4))), mu=HALF, nu=HALF)
    defects = ot.coupling_defects(bad)
    assert not defects.ok
    assert defects.max_row_defect == F(1, 4)
