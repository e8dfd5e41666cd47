import numpy as np
import pytest

from boundlab import survey
from boundlab.bell import BellBasis
from boundlab.criteria import BOUND, NPT
from boundlab.errors import InputError


def test_samples_are_on_simplex():
    C = survey.sample_coeffs(3, 0, 0, 100)
    assert C.shape == (100, 3, 3)
    assert np.allclose(C.sum(axis=(1, 2)), 1) and C.min() >= 0


def test_sample_index_addressing():
    a = survey.sample_coeffs(3, 9, 0, 10)
    b = survey.sample_coeffs(3, 9, 5, 10)
    assert np.array_equal(a[5:], b)


def test_thread_count_does_not_change_result():
    r1 = survey.run_survey(survey.SurveyConfig(3, 5000, seed=4, threads=1))
    r4 = survey.run_survey(survey.SurveyConfig(3, 5000, seed=4, threads=4))
    assert r1.counts == r4.counts


def test_counts_are_consistent():
    r = survey.run_survey(survey.SurveyConfig(2, 3000, seed=1))
    assert r.counts[NPT] + r.counts["PPT"] == 3000
    assert r.counts[BOUND] == 0
    assert 0 < r.half_width("PPT") < 0.02


def test_generalized_basis_survey_runs():
    r = survey.run_survey(survey.SurveyConfig(3, 2000, seed=0, basis=BellBasis.random(3, 2)))
    assert sum(r.counts[k] for k in r.LABELS if k != "PPT") == 2000


def test_config_errors():
    with pytest.raises(InputError):
        survey.SurveyConfig(3, 0)
    with pytest.raises(InputError):
        survey.SurveyConfig(3, 10, chain=("realignment",))


def test_slice_scan_marks_out_of_simplex():
    r = survey.slice_scan("B1", np.linspace(-1, 1, 5), np.linspace(-2.5, 1, 5))
    assert r.labels.shape == (5, 5)
    assert r.count(survey.OUT_OF_SIMPLEX) > 0
    assert len(r.rows()) == 25
    with pytest.raises(InputError):
        survey.slice_scan("B", [0.0], [0.0])
    with pytest.raises(InputError):
        survey.family_coeffs("Z", 0, 0)
