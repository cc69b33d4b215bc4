import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from blockade_sim.errors import ParameterError
from blockade_sim.estimators import PhotonStatistics


def test_feature_names():
    est = PhotonStatistics().fit()
    assert list(est.get_feature_names_out()) == ["g2", "g3", "n_photon"]
    both = PhotonStatistics(direction="both").fit()
    assert list(both.get_feature_names_out())[-1] == "eta_db"
    assert len(both.get_feature_names_out()) == 7


def test_transform_matches_direct_solver():
    from blockade_sim.lindblad import solve_point
    from blockade_sim.model import Direction, SystemParams
    est = PhotonStatistics(features=("delta_c", "g")).fit()
    out = est.transform([[1.2, 1.0], [1.5, 0.8]])
    ref = solve_point(SystemParams(delta_c=1.5, g=0.8), Direction.FORWARD)
    assert out.shape == (2, 3)
    assert out[1, 0] == pytest.approx(ref.g2, rel=1e-10)


def test_optimal_pump_and_eta():
    est = PhotonStatistics(direction="both", solver="amplitudes", pump="optimal_single",
                           pump_reference="resonance").fit()
    out = est.transform([[1.2435]])
    assert out[0, 0] < 0.1 < 1 < out[0, 3]
    assert out[0, -1] > 30
    np.testing.assert_array_equal(est.predict([[1.2435]]), out[:, 0])


def test_failed_rows_are_nan():
    est = PhotonStatistics(features=("kappa1",)).fit()
    out = est.transform([[0.9], [1.5]])
    assert np.isfinite(out[0]).all() and np.isnan(out[1]).all()


def test_clone_and_set_params():
    est = PhotonStatistics(g=0.5)
    twin = clone(est).set_params(g=0.7)
    assert est.get_params()["g"] == 0.5 and twin.get_params()["g"] == 0.7


def test_pipeline():
    pipe = make_pipeline(FunctionTransformer(lambda x: x + 1.0), PhotonStatistics())
    out = pipe.fit_transform(np.array([[0.2]]))
    direct = PhotonStatistics().fit().transform([[1.2]])
    np.testing.assert_allclose(out, direct)


@pytest.mark.parametrize("kwargs", [{"features": ("kappa2",)}, {"features": ("g", "g")},
                                    {"solver": "both"}, {"direction": "sideways"}])
def test_fit_validation(kwargs):
    with pytest.raises(ParameterError):
        PhotonStatistics(**kwargs).fit()


def test_wrong_width():
    est = PhotonStatistics().fit()
    with pytest.raises(ValueError):
        est.transform([[1.0, 2.0]])
