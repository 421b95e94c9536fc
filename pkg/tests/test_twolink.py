import numpy as np
import pytest

from entlink import qstate
from entlink import twolink as TL
from entlink.markov import ModelError, absorbing_states


def sym_model(p, q, m_star):
    return TL.TwoLinkModel(p, p, q, m_star, m_star,
                           TL.uniform_f_table(m_star, m_star))


def test_f_table_validation():
    f = TL.uniform_f_table(1, 1)
    bad = f.copy()
    bad[0, 1, 1] = 0.5  # mass on x=0
    with pytest.raises(ModelError):
        TL.TwoLinkModel(0.5, 0.5, 0.5, 1, 1, bad)
    bad = f.copy()
    bad[1, 0, 1] = 0.5  # inactive link with nonzero f
    with pytest.raises(ModelError):
        TL.TwoLinkModel(0.5, 0.5, 0.5, 1, 1, bad)


def test_all_action_matrices_column_stochastic():
    # StochasticMatrix already validates; build a few shapes to exercise it
    for (p1, p2, q, m1, m2) in [(0.3, 0.8, 0.5, 0, 0), (0.5, 0.5, 0.7, 2, 1),
                                (1.0, 0.4, 1.0, 1, 3)]:
        f = TL.uniform_f_table(m1, m2)
        TL.build_two_link_mdp(TL.TwoLinkModel(p1, p2, q, m1, m2, f))


def test_absorbing_set_is_x1_block():
    model = sym_model(0.5, 0.5, 1)
    mdp = TL.build_two_link_mdp(model)
    half = model.n1 * model.n2
    assert absorbing_states(mdp) == list(range(half, 2 * half))


def test_swap_action_success_mass():
    # from (0, 0, 0), swap succeeds with probability q into (1, 0, 0)
    model = sym_model(0.5, 0.7, 1)
    mdp = TL.build_two_link_mdp(model)
    T = mdp.transitions["swap"].entries
    src = model.idx(0, 0, 0)
    assert T[model.idx(1, 0, 0), src] == pytest.approx(0.7)
    # failure regenerates both links afresh
    assert T[model.idx(0, -1, -1), src] == pytest.approx(0.3 * 0.5 * 0.5)
    assert T[model.idx(0, 0, 0), src] == pytest.approx(0.3 * 0.5 * 0.5)


def test_swap_on_inactive_links_shifts_ages():
    model = sym_model(0.5, 0.7, 2)
    mdp = TL.build_two_link_mdp(model)
    T = mdp.transitions["swap"].entries
    # link 1 active at age 0, link 2 inactive: age shifts, no swap attempt
    src = model.idx(0, 0, -1)
    assert T[model.idx(0, 1, -1), src] == pytest.approx(1.0)
    # both inactive: stay
    src = model.idx(0, -1, -1)
    assert T[src, src] == pytest.approx(1.0)
    # link at the storage bound with partner inactive: discarded
    src = model.idx(0, 2, -1)
    assert T[model.idx(0, -1, -1), src] == pytest.approx(1.0)


def test_evaluate_cutoff_matches_analytic():
    for p in (0.3, 0.6, 1.0):
        for q in (0.4, 1.0):
            for ts in (0, 1, 2):
                model = sym_model(p, q, ts)
                d = TL.cutoff_decision(model, ts, ts)
                wait, f_abs = TL.evaluate_policy(model, d)
                assert wait == pytest.approx(
                    TL.analytic_symmetric_waiting_time(p, q, ts), abs=1e-9)
                assert f_abs == pytest.approx(1.0, abs=1e-9)


def test_analytic_anchor_points():
    assert TL.analytic_symmetric_waiting_time(1.0, 1.0, 0) == pytest.approx(1.0)
    assert TL.analytic_symmetric_waiting_time(0.5, 0.5, 0) == pytest.approx(8.0)


def test_lp_waiting_equals_analytic_grid():
    f = TL.uniform_f_table(5, 5)
    for p in (0.2, 0.7):
        for q in (0.5, 1.0):
            model = TL.TwoLinkModel(p, p, q, 5, 5, f)
            t_lp, d = TL.lp_optimal_waiting_time(model)
            assert t_lp == pytest.approx(
                TL.analytic_symmetric_waiting_time(p, q, 5), abs=1e-6)
            # the extracted decision achieves the optimum
            wait, _ = TL.evaluate_policy(model, d)
            assert wait == pytest.approx(t_lp, abs=1e-6)


def test_lp_value_generic_equals_displayed(rng):
    for _ in range(4):
        m1, m2 = int(rng.integers(0, 3)), int(rng.integers(0, 3))
        f = np.zeros((2, m1 + 2, m2 + 2))
        f[1, 1:, 1:] = rng.uniform(0.4, 1.0, (m1 + 1, m2 + 1))
        model = TL.TwoLinkModel(rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0),
                                rng.uniform(0.3, 1.0), m1, m2, f)
        v1, d = TL.lp_optimal_value(model)
        v2 = TL.lp_optimal_value_displayed(model)
        assert v1 == pytest.approx(v2, abs=1e-7)
        # re-evaluation reproduces the optimum
        _, f_abs = TL.evaluate_policy(model, d)
        assert f_abs == pytest.approx(v1, abs=1e-7)


def test_lp_value_beats_every_cutoff(rng):
    m_star = 2
    f = np.zeros((2, 4, 4))
    f[1, 1:, 1:] = rng.uniform(0.4, 1.0, (3, 3))
    model = TL.TwoLinkModel(0.5, 0.6, 0.8, m_star, m_star, f)
    v, _ = TL.lp_optimal_value(model)
    for t1 in range(m_star + 1):
        for t2 in range(m_star + 1):
            _, f_abs = TL.evaluate_policy(model, TL.cutoff_decision(model, t1, t2))
            assert f_abs <= v + 1e-8


def test_two_link_f_from_physics_ideal_memories():
    phi = qstate.bell(2)
    sigma0 = qstate.DensityOperator(np.outer(phi, phi.conj()), (2, 2))
    ident = qstate.KrausChannel([np.eye(4)])
    f = TL.two_link_f_from_physics(sigma0, ident, sigma0, ident, phi, 1, 1)
    assert np.allclose(f[1, 1:, 1:], 1.0, atol=1e-12)
    assert np.all(f[0] == 0) and np.all(f[1, 0, :] == 0)


def test_initial_distribution():
    model = sym_model(0.4, 0.5, 1)
    init = TL.initial_distribution(model).entries
    assert init.sum() == pytest.approx(1.0)
    assert init[model.idx(0, 0, 0)] == pytest.approx(0.16)
    assert init[model.idx(0, -1, -1)] == pytest.approx(0.36)
    assert np.all(init[model.n1 * model.n2:] == 0)
