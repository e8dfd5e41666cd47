import numpy as np
import pytest

from boundlab import criteria, zoo
from boundlab.bell import BellBasis, SimplexState
from boundlab.criteria import BOUND, NPT, SEPARABLE, UNDETERMINED
from boundlab.errors import InputError
from boundlab.linalg import DenseState, product_state, random_separable, random_state
from boundlab.witnesses import gsic_from_sic, sic_set


def werner2(p):
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    return DenseState((2, 2), p * np.outer(psi, psi) + (1 - p) * np.eye(4) / 4)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_isotropic_ppt_threshold(d):
    p0 = 1 / (d + 1)
    assert not criteria.ppt_check(zoo.isotropic(d, p0 - 1e-3)).fired
    assert criteria.ppt_check(zoo.isotropic(d, p0 + 1e-3)).fired


def test_gell_mann_orthonormal():
    for d in (2, 3, 4):
        G = criteria.gell_mann_basis(d)
        assert G.shape == (d * d, d, d)
        gram = np.einsum("aij,bji->ab", G, G)
        assert np.allclose(gram, np.eye(d * d))
        assert np.allclose(G[0], np.eye(d) / np.sqrt(d))


def test_de_vicente_on_werner():
    # Pauli correlation matrix of the Werner state is -p * 1, so its trace norm 3p exceeds 1 iff p > 1/3
    for p in (0.2, 0.3, 0.34, 0.5, 0.9):
        out = criteria.correlation_tensor_check(werner2(p), 0.0, 0.0)
        C = criteria.correlation_tensor(werner2(p))
        assert np.linalg.svd(C[1:, 1:], compute_uv=False).sum() == pytest.approx(3 * p / 2)
        assert out.fired == (p > 1 / 3)


def test_correlation_tensor_product_state(rng):
    A, B = random_state(2, rng), random_state(3, rng)
    C = criteria.correlation_tensor(product_state(A, B))
    assert np.linalg.matrix_rank(C, tol=1e-10) == 1


def test_separable_never_fires(rng):
    for _ in range(300):
        rho = random_separable(3, 3, rng)
        v = criteria.classify(rho)
        assert v.label == UNDETERMINED and not v.fired()


def test_reduction_implies_npt(rng):
    for _ in range(300):
        rho = random_state(9, rng, (3, 3))
        if criteria.reduction_check(rho).fired:
            assert criteria.ppt_check(rho).fired


def test_esic_matches_gsic_rank_one():
    rho = zoo.activation_be(1.5).to_dense()
    g = gsic_from_sic(sic_set(3))
    assert g.a == pytest.approx(1 / 9)
    e, gs = criteria.esic_check(rho), criteria.gsic_check(rho, g, g)
    assert e.score == pytest.approx(gs.score) and e.threshold == pytest.approx(gs.threshold)


def test_gsic_family_bound_is_respected_by_separable(rng):
    g = gsic_from_sic(sic_set(2), t=0.6)
    for _ in range(100):
        assert not criteria.gsic_check(random_separable(2, 2, rng), g, g).fired


def test_quasi_pure_agrees_and_detects_pure_bell():
    c = np.zeros((3, 3))
    c[0, 0] = 0.8
    c[1, 2] = 0.2
    s = SimplexState.standard(c)
    closed = criteria.quasi_pure_simplex(s).score
    general = criteria.quasi_pure_concurrence(s.to_dense()).score
    # zero eigenvalues carry round-off that the square root amplifies
    assert closed == pytest.approx(general, abs=1e-8)
    assert closed > 0


def test_quasi_pure_degenerate_raises():
    with pytest.raises(InputError):
        criteria.quasi_pure_concurrence(DenseState((3, 3), np.eye(9) / 9))


def test_range_heuristic_on_upb():
    rho = zoo.upb_state(zoo.load_upb())
    out = criteria.range_check(rho, restarts=30)
    assert out.fired and out.detail.startswith("range-criterion")
    prod = product_state(DenseState((3,), np.diag([1.0, 0, 0])), DenseState((3,), np.diag([0, 1.0, 0])))
    assert not criteria.range_check(prod, restarts=5).fired


def test_classify_labels():
    assert criteria.classify(zoo.isotropic(3, 0.9)).label == NPT
    assert criteria.classify(zoo.rho_bound()).label == BOUND
    assert criteria.classify_simplex(zoo.activation_be(2.5)).label == SEPARABLE
    v = criteria.classify_simplex(zoo.activation_be(2.5))
    assert v.certificate is not None and v.certificate.contained


def test_evidence_order_is_fixed():
    v = criteria.classify_simplex(zoo.activation_be(1.5))
    names = [o.criterion for o in v.evidence]
    assert names == sorted(names, key=criteria.CRITERIA_ORDER.index)


def test_multipartite_cut():
    rho = zoo.conversion_assist(2, 3)
    with pytest.raises(InputError):
        criteria.ppt_check(rho)
    assert not criteria.ppt_check(rho, zoo.CONVERSION_CUT).fired
    assert criteria.ppt_check(rho, (0,)).fired
    assert not criteria.ppt_check(rho, (0, 2)).fired


def test_batch_matches_single(rng):
    C = rng.dirichlet(np.ones(9), size=200).reshape(-1, 3, 3)
    batch = criteria.classify_coeffs_batch(C, BellBasis.standard(3))
    for c, label in zip(C, batch):
        assert criteria.classify_simplex(SimplexState.standard(c)).label in (label, BOUND)
        if label == NPT:
            assert criteria.classify_simplex(SimplexState.standard(c)).label == NPT


def test_batch_rejects_bad_chain():
    with pytest.raises(InputError):
        criteria.classify_coeffs_batch(np.full((1, 3, 3), 1 / 9), BellBasis.standard(3), ("realignment",))
    with pytest.raises(InputError):
        criteria.classify_coeffs_batch(np.full((1, 3, 3), 1 / 9), BellBasis.standard(3), ("ppt", "magic"))
