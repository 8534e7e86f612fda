import csv
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from vrmtunnel.basis import (
    BasisSet,
    EnergyMatrices,
    VariationalSystem,
    assemble_energy_matrices,
    assemble_system,
    basis_integrals,
)
from vrmtunnel.errors import DegenerateBoundaryError, DependentSolutionsError, PreconditionError, ResonanceError
from vrmtunnel.potentials import Sampled, ScatteringSetup
from vrmtunnel.solver import (
    _solve_with_retries,
    average_energy,
    channel_amplitudes,
    inner_solution,
    match_amplitudes,
    reflection_transmission,
    solve_tunneling,
    write_debug_csv,
)


def _solve(cfg, E, pair=None):
    lb, lt = pair or (cfg.lambda_b, cfg.lambda_b_tilde)
    return solve_tunneling(cfg.profile, cfg.setup(E), cfg.basis, lb, lt)


@settings(max_examples=50, deadline=None)
@given(
    st.floats(-5, 5),
    st.floats(0.2, 2).map(lambda v: v * (1 if v > 1 else -1)),
    st.floats(-2, 2).filter(lambda v: abs(v) > 0.1),
    st.floats(-3, 3),
)
def test_scalar_case(alpha, ca, cb, lam_b):
    M = alpha + lam_b * cb * cb
    if abs(M) < 1e-3:
        return
    sol = inner_solution(VariationalSystem(np.array([[alpha]]), np.array([ca]), np.array([cb])), lam_b)
    assert sol.lambda_a == pytest.approx(M / ca**2, rel=1e-12)
    assert sol.C[0] * ca == pytest.approx(1.0)


def test_rank_one_matches_generalized_eigensolver():
    rng = np.random.default_rng(7)
    for _ in range(50):
        X = rng.standard_normal((6, 6))
        A = X + X.T
        va, vb = rng.standard_normal(6), rng.standard_normal(6)
        lam_b = rng.uniform(0.5, 5)
        sol = inner_solution(VariationalSystem(A, va, vb), lam_b)
        (alpha, beta), vecs = scipy.linalg.eig(A + lam_b * np.outer(vb, vb), np.outer(va, va),
                                               homogeneous_eigvals=True)
        finite = np.abs(beta) > 1e-8 * np.abs(alpha)
        assert finite.sum() == 1
        j = int(np.flatnonzero(finite)[0])
        vec = vecs[:, j].real / (va @ vecs[:, j].real)
        assert (alpha[j] / beta[j]).real == pytest.approx(sol.lambda_a, rel=1e-8, abs=1e-8)
        np.testing.assert_allclose(sol.C, vec, rtol=1e-8, atol=1e-8)
        assert sol.residual <= 1e-10


def test_resonance_detected_and_retried():
    sys = VariationalSystem(np.diag([1.0, -1.0]), np.array([1.0, 1.0]), np.array([0.0, 1.0]))
    with pytest.raises(ResonanceError) as info:
        inner_solution(sys, 1.0)
    assert info.value.lambda_b == 1.0
    sol = _solve_with_retries(sys, 1.0, 5.0, None, retries=3, step=0.5)
    assert sol.lambda_b == 1.5


def test_degenerate_left_edge():
    sys = VariationalSystem(np.diag([1.0, -1.0]), np.array([1.0, 1.0]), np.array([1.0, 0.0]))
    with pytest.raises(DegenerateBoundaryError):
        inner_solution(sys, 0.0)


@pytest.mark.parametrize("x", [0.0, 0.37, 2.5])
def test_cos_and_sin_decomposition(x):
    k = 1.3
    s = ScatteringSetup(x, x + 1.0, 0.0, 0.0, 0.5 * k * k)
    c = channel_amplitudes(math.cos(k * x), -k * math.sin(k * x), 1.0, 0.0, s)
    assert c.a1 == pytest.approx(0.5) and c.b1 == pytest.approx(0.5)
    sn = channel_amplitudes(math.sin(k * x), k * math.cos(k * x), 1.0, 0.0, s)
    assert sn.a1 == pytest.approx(1 / 2j) and sn.b1 == pytest.approx(-1 / 2j)


def test_free_propagation_is_transparent():
    k, a, b = 0.9, 1.0, 4.0
    s = ScatteringSetup(a, b, 0.0, 0.0, 0.5 * k * k)
    cos = channel_amplitudes(math.cos(k * a), -k * math.sin(k * a), math.cos(k * b), -k * math.sin(k * b), s)
    sin = channel_amplitudes(math.sin(k * a), k * math.cos(k * a), math.sin(k * b), k * math.cos(k * b), s)
    R, T = reflection_transmission(cos, sin, k, k)
    assert R == pytest.approx(0.0, abs=1e-14) and T == pytest.approx(1.0, abs=1e-14)


def test_dependent_solutions_rejected():
    s = ScatteringSetup(0.0, 1.0, 0.0, 0.0, 0.5)
    amp = channel_amplitudes(1.0, 0.2, 0.5, -0.1, s)
    with pytest.raises(DependentSolutionsError):
        reflection_transmission(amp, amp, 1.0, 1.0)


@pytest.mark.parametrize("E, expected", [(0.125, 0.4812), (0.25, 0.7566), (0.375, 0.8712)])
def test_exponential_step_pipeline(exp_config, E, expected):
    assert _solve(exp_config, E).T == pytest.approx(expected, abs=5e-3)


@pytest.mark.parametrize("E, expected", [(0.05, 0.1122), (0.1, 0.2139), (0.25, 0.4599)])
def test_parabolic_pipeline(E, expected):
    from vrmtunnel.harness import canonical_config

    assert _solve(canonical_config("parabolic"), E).T == pytest.approx(expected, abs=5e-3)


def test_lambda_pair_invariance(exp_config):
    ref = _solve(exp_config, 0.25)
    for pair in ((1.0, 4.0), (0.3, 11.0), (-1.0, 2.0)):
        res = _solve(exp_config, 0.25, pair)
        assert abs(res.T - ref.T) <= 1e-3
        assert abs(res.R - ref.R) <= 1e-3


def test_lambda_pair_must_differ(exp_config):
    with pytest.raises(PreconditionError):
        _solve(exp_config, 0.25, (2.0, 2.0))


def test_normalization_invariance(exp_config):
    setup = exp_config.setup(0.25)
    res = _solve(exp_config, 0.25)
    em = assemble_energy_matrices(exp_config.basis, exp_config.profile, setup)
    for s in (1e-6, -3.0, 250.0):
        amps = [match_amplitudes(sol.scaled(s), exp_config.basis, setup) for sol in res.solutions]
        R, T = reflection_transmission(*amps, setup.k1, setup.k3)
        assert abs(T - res.T) <= 1e-12 and abs(R - res.R) <= 1e-12
        assert average_energy(res.solutions[0].C * s, em) == pytest.approx(res.E_av, rel=1e-12)


def test_amplitudes_reproduce_edge_values(exp_config):
    setup = exp_config.setup(0.125)
    res = _solve(exp_config, 0.125)
    basis = exp_config.basis
    k1, k3 = setup.k1, setup.k3
    for sol, amp in zip(res.solutions, res.amplitudes):
        for x, k, p, q in ((setup.a, k1, amp.a1, amp.b1), (setup.b, k3, amp.a3, amp.b3)):
            psi = p * np.exp(1j * k * x) + q * np.exp(-1j * k * x)
            dpsi = 1j * k * (p * np.exp(1j * k * x) - q * np.exp(-1j * k * x))
            assert abs(psi - basis.values(x) @ sol.C) <= 1e-10
            assert abs(dpsi - basis.derivatives(x) @ sol.C) <= 1e-10


def test_eigen_residual_on_catalog_systems(exp_config):
    res = _solve(exp_config, 0.25)
    for sol in res.solutions:
        assert sol.residual <= 1e-10
        assert sol.realised_lambda_a == pytest.approx(sol.lambda_a, rel=0.05)


def test_average_energy_single_function():
    for k in (0.5, 1.0, 2.7):
        b = BasisSet((k, k + 1.0), (0.0, 2.0))
        zero = Sampled(((0.0, 0.0), (2.0, 0.0)))
        em = assemble_energy_matrices(b, zero, ScatteringSetup(0.0, 2.0, 0, 0, 1.0))
        assert average_energy(np.array([1.0, 0.0]), em) == pytest.approx(0.5 * k * k)
    with pytest.raises(DegenerateBoundaryError):
        average_energy(np.zeros(2), em)


def test_energy_matrix_consistency_with_system(exp_config):
    setup = exp_config.setup(0.25)
    ints = basis_integrals(exp_config.basis, exp_config.profile)
    sys = assemble_system(exp_config.basis, exp_config.profile, 0.25, setup, integrals=ints)
    em = assemble_energy_matrices(exp_config.basis, exp_config.profile, setup, integrals=ints)
    assert isinstance(em, EnergyMatrices)
    # 2 (E Rm - P) equals A plus the surface terms of the kinetic integration by parts
    k = exp_config.basis.k
    surface = np.outer(sys.v_b, sys.d_b) - np.outer(sys.v_a, sys.d_a)
    np.testing.assert_allclose(2 * (0.25 * em.Rm - em.P) - surface, sys.A, atol=1e-9)


def test_debug_csv(tmp_path, exp_config):
    res = _solve(exp_config, 0.25)
    path = tmp_path / "debug.csv"
    write_debug_csv(path, [("exponential", res)])
    rows = list(csv.reader(open(path)))
    assert rows[0][:3] == ["profile", "E", "lambda_b"]
    assert len(rows) == 3
    assert float(rows[1][2]) == 2.0 and float(rows[2][2]) == 8.0
