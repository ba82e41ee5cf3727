import numpy as np
import pytest

import ouint

B_TRI = np.array([[-1.0, 0.5, 0.3], [0.0, -2.0, 0.7], [0.0, 0.0, -1.5]])
A_TRI = np.array([1.0, 2.0, 3.0])


def triangular_model():
    return ouint.OuModel(np.zeros(3), A_TRI, B_TRI, np.eye(3))


def test_model_roundtrip():
    m = triangular_model()
    assert m.p == 3 and m.d == 3
    assert m.labels == ["X1", "X2", "X3"]
    np.testing.assert_array_equal(m.B, B_TRI)
    np.testing.assert_allclose(m.drift(np.ones(3)), B_TRI @ (np.ones(3) - A_TRI))


def test_expm_and_linear_algebra():
    np.testing.assert_allclose(ouint.expm(np.diag([1.0, -2.0])), np.diag(np.exp([1.0, -2.0])))
    x = ouint.solve_linear(np.array([[2.0, 1.0], [1.0, 3.0]]), np.array([[3.0], [5.0]]))
    np.testing.assert_allclose(x.ravel(), [0.8, 1.4])
    assert ouint.rank(np.ones((3, 3))) == 1


def test_intervention_and_graph():
    reduced, record = ouint.intervene(triangular_model(), 2, 0.0)
    np.testing.assert_array_equal(reduced.B, [[-1.0, 0.3], [0.0, -1.5]])
    assert reduced.labels == ["X1", "X3"]
    assert record.fixed == [("X2", 0.0)]
    g = ouint.dependence_graph(reduced)
    assert g.edges == [("X1", "X1"), ("X3", "X1"), ("X3", "X3")]
    assert g.to_dot().startswith("digraph G {")


def test_errors_carry_codes():
    m = triangular_model()
    with pytest.raises(ouint.OuintError) as info:
        ouint.intervene_seq(m, [(2, 1.0), (2, 2.0)])
    assert info.value.code == "DuplicateIntervention"
    with pytest.raises(ouint.OuintError) as info:
        ouint.intervene(m, 7, 0.0)
    assert info.value.code == "BadCoordinate"


def test_stability_counterexample():
    b = np.array([[1.0, 7.0], [-1.0, -3.0]])
    stable, x = ouint.is_stable(b)
    assert stable
    np.testing.assert_allclose(b @ x + x @ b.T, -np.eye(2), atol=1e-10)
    report = ouint.classify(-b)
    assert report["classification"] == "Unstable"
    assert abs(report["spectral_abscissa"] - 1.0) < 1e-6
    screen = ouint.screen_principal_submatrices(b, 1)
    assert not screen["all_proper_principal_submatrices_stable"]


def test_stationary_law_matches_closed_form():
    mean, cov = ouint.stationary_distribution(triangular_model())
    np.testing.assert_array_equal(mean, A_TRI)
    np.testing.assert_allclose(B_TRI @ cov + cov @ B_TRI.T, -np.eye(3), atol=1e-12)
    reduced, _ = ouint.intervene(triangular_model(), 2, 1.5)
    got_mean, got_cov = ouint.stationary_distribution(reduced)
    want_mean, want_cov = ouint.triangular_closed_forms(B_TRI, A_TRI, 1.5, "X2")
    np.testing.assert_allclose(got_mean, want_mean, rtol=1e-12)
    np.testing.assert_allclose(got_cov, want_cov, rtol=1e-12)


def test_simulation_shapes_and_determinism():
    times = [0.0, 0.5, 1.0]
    a = ouint.simulate_paths(triangular_model(), times, 4, 7)
    b = ouint.simulate_paths(triangular_model(), times, 4, 7)
    assert a.shape == (4, 3, 3)
    np.testing.assert_array_equal(a, b)
    x, d = ouint.coupled_intervention_diff(triangular_model(), 2, 0.0, times, 4, 7)
    np.testing.assert_array_equal(d[:, :, 1], 0.0 - x[:, :, 1])
    np.testing.assert_array_equal(x, ouint.simulate_paths(triangular_model(), times, 4, 7, "euler"))
