import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sqqss import qcore
from sqqss.source import (
    DomainError,
    SourceModel,
    emit,
    fidelity_from_visibility,
    purity_from_visibility,
    visibility_from_purity,
    x_basis_coefficients,
)

unit = st.floats(0.0, 1.0)


def test_ideal_source_is_bell_state():
    state = emit(SourceModel(a_sq=0.5, visibility=1.0))
    assert qcore.fidelity_to(state, qcore.BELL_PHI_PLUS) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("vis", [0.0, 0.3, 1.0])
def test_all_hh(vis):
    state = emit(SourceModel(a_sq=1.0, visibility=vis))
    expected = np.zeros((4, 4))
    expected[0, 0] = 1
    assert np.allclose(state.rho, expected, atol=1e-12)


def test_purity_of_dephased_emission():
    state = emit(SourceModel(a_sq=0.5, visibility=0.7483))
    assert qcore.purity(state) == pytest.approx(0.78, abs=1e-4)


@pytest.mark.parametrize(
    "field, value", [("a_sq", -0.1), ("a_sq", 1.1), ("visibility", 1.2), ("photons_per_qubit", -1), ("photons_per_qubit", 2.5)]
)
def test_model_validation(field, value):
    with pytest.raises(DomainError):
        SourceModel(**{field: value})


def test_relations_endpoints():
    assert purity_from_visibility(1.0) == 1.0
    assert fidelity_from_visibility(1.0) == 1.0
    assert purity_from_visibility(0.0) == 0.5
    assert fidelity_from_visibility(0.0) == 0.5


def test_relations_measured_purity():
    vis = visibility_from_purity(0.78)
    assert vis == pytest.approx(math.sqrt(0.56), abs=1e-15)
    assert vis == pytest.approx(0.7483, abs=1e-4)
    assert fidelity_from_visibility(vis) == pytest.approx(0.874, abs=1e-3)


def test_purity_below_half_rejected():
    with pytest.raises(DomainError):
        visibility_from_purity(0.4)


# Below ~1e-3 the purity no longer resolves V**2 in double precision.
@given(st.floats(1e-3, 1.0))
def test_round_trip(vis):
    assert visibility_from_purity(purity_from_visibility(vis)) == pytest.approx(vis, abs=1e-12)


@given(st.floats(0.5, 1.0))
def test_round_trip_from_purity(p):
    assert purity_from_visibility(visibility_from_purity(p)) == pytest.approx(p, abs=1e-12)


@given(unit, unit)
def test_emit_matches_relations_for_symmetric_pair(a_sq, vis):
    state = emit(SourceModel(a_sq=0.5, visibility=vis))
    assert qcore.purity(state) == pytest.approx(purity_from_visibility(vis), abs=1e-12)
    assert qcore.fidelity_to(state, qcore.BELL_PHI_PLUS) == pytest.approx(fidelity_from_visibility(vis), abs=1e-12)


class TestXBasisCoefficients:
    def test_symmetric(self):
        same, diff = x_basis_coefficients(0.5)
        assert same == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        assert diff == pytest.approx(0.0, abs=1e-12)

    def test_product_state(self):
        assert x_basis_coefficients(1.0) == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_asymmetric(self):
        same, diff = x_basis_coefficients(0.6)
        assert same == pytest.approx(0.703526, abs=1e-6)
        assert diff == pytest.approx(0.071071, abs=1e-6)

    @given(unit)
    def test_normalized(self, a_sq):
        same, diff = x_basis_coefficients(a_sq)
        assert 2 * same**2 + 2 * diff**2 == pytest.approx(1.0, abs=1e-12)

    @given(unit)
    def test_rebuilds_the_state(self, a_sq):
        same, diff = x_basis_coefficients(a_sq)
        px, mx = qcore.PLUS_X.vector, qcore.MINUS_X.vector
        ket = same * (np.kron(px, px) + np.kron(mx, mx)) + diff * (np.kron(px, mx) + np.kron(mx, px))
        expected = np.array([math.sqrt(a_sq), 0, 0, math.sqrt(1 - a_sq)])
        assert np.allclose(ket, expected, atol=1e-12)


@given(unit, unit)
def test_signal_marginal_ignores_coherence(a_sq, vis):
    rho = qcore.reduced_state(emit(SourceModel(a_sq=a_sq, visibility=vis)), "signal")
    assert np.allclose(rho, np.diag([a_sq, 1 - a_sq]), atol=1e-12)
    assert qcore.measure_probs(rho, "x") == pytest.approx((0.5, 0.5), abs=1e-12)
    assert qcore.measure_probs(rho, "y") == pytest.approx((0.5, 0.5), abs=1e-12)


def test_from_purity():
    model = SourceModel.from_purity(0.78, a_sq=0.5)
    assert model.visibility == pytest.approx(0.7483, abs=1e-4)
