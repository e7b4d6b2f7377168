import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylcap.errors import DimensionError, ResourceGuardError, ValidationError
from weylcap.linalg import basis_state, check_density_matrix, hermitian_eig, projector, random_density_matrix
from weylcap.weyl import (
    WeylChannelSpec,
    apply_tensor_power,
    apply_weyl_channel,
    chain_order,
    check_invariance,
    check_weyl_covariance,
    deformation_certificate,
    expectation_E,
    identity_spec,
    is_qc_spec,
    marginals,
    qc_spec_from_p,
    random_deformation,
    uniform_spec,
    weyl_generators,
    weyl_operator,
    xi_k,
    xi_sum,
)

from .conftest import random_states

QUTRIT_P = np.array([1 / 2, 1 / 3, 1 / 6])


def brute_force_tensor_power(spec, N, rho):
    """Sum over all n^(2N) product Weyl operators with product weights."""
    n = spec.n
    out = np.zeros_like(rho)
    for idx in itertools.product(range(n * n), repeat=N):
        weight = math.prod(spec.pi.reshape(-1)[i] for i in idx)
        if weight == 0:
            continue
        w = np.ones((1, 1))
        for i in idx:
            w = np.kron(w, weyl_operator(n, i // n, i % n))
        out += weight * w @ rho @ w.conj().T
    return out


class TestGenerators:
    def test_qubit(self):
        u, v = weyl_generators(2)
        assert np.allclose(u, np.diag([1, -1]), atol=1e-15)
        assert np.array_equal(v, np.array([[0, 1], [1, 0]]))

    def test_qutrit_clock_phase(self):
        u, _ = weyl_generators(3)
        assert u @ basis_state(3, 1) == pytest.approx(np.exp(2j * np.pi / 3) * basis_state(3, 1), abs=1e-15)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_order_n(self, n):
        u, v = weyl_generators(n)
        assert np.allclose(np.linalg.matrix_power(u, n), np.eye(n), atol=1e-12)
        assert np.array_equal(np.linalg.matrix_power(v, n), np.eye(n))

    def test_n_below_two(self):
        with pytest.raises(ValueError):
            weyl_generators(1)


class TestWeylOperator:
    def test_zero_powers(self):
        assert np.array_equal(weyl_operator(4, 0, 0), np.eye(4))

    def test_qubit_w11(self):
        assert np.allclose(weyl_operator(2, 1, 1) @ basis_state(2, 0), [0, -1], atol=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_matches_generator_powers_and_unitary(self, n):
        u, v = weyl_generators(n)
        for j in range(n):
            for k in range(n):
                w = weyl_operator(n, j, k)
                ref = np.linalg.matrix_power(u, j) @ np.linalg.matrix_power(v, k)
                assert np.max(np.abs(w - ref)) <= 1e-12
                assert np.max(np.abs(w @ w.conj().T - np.eye(n))) <= 1e-12

    def test_indices_reduced_mod_n(self):
        assert np.array_equal(weyl_operator(3, 4, -1), weyl_operator(3, 1, 2))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_resolution_of_identity(self, n):
        for rho in random_states(n, 50, seed=n):
            total = sum(weyl_operator(n, j, k) @ rho @ weyl_operator(n, j, k).conj().T
                        for j in range(n) for k in range(n))
            assert np.max(np.abs(total - n * np.trace(rho) * np.eye(n))) <= 1e-10


class TestApplyChannel:
    def test_identity_channel(self):
        rho = random_density_matrix(3, 1)
        assert np.allclose(apply_weyl_channel(identity_spec(3), rho), rho, atol=1e-15)

    def test_uniform_channel(self):
        for rho in random_states(4, 5):
            assert np.max(np.abs(apply_weyl_channel(uniform_spec(4), rho) - np.eye(4) / 4)) <= 1e-12

    def test_qutrit_example_on_basis_state(self, qutrit_spec):
        out = apply_weyl_channel(qutrit_spec, projector(basis_state(3, 0)))
        assert np.max(np.abs(out - np.diag(QUTRIT_P))) <= 1e-15

    def test_trace_and_positivity(self, qutrit_spec):
        for i, rho in enumerate(random_states(3, 20, rank=1)):
            spec = random_deformation(QUTRIT_P, 0.7, i)
            for s in (qutrit_spec, spec):
                out = apply_weyl_channel(s, rho)
                assert abs(np.trace(out) - 1) <= 1e-12
                assert hermitian_eig(out).eigenvalues[-1] >= -1e-9

    def test_dimension_mismatch(self, qutrit_spec):
        with pytest.raises(DimensionError):
            apply_weyl_channel(qutrit_spec, np.eye(2) / 2)


class TestTensorPower:
    def test_base_case(self, qutrit_spec):
        rho = random_density_matrix(3, 2)
        assert np.allclose(apply_tensor_power(qutrit_spec, 1, rho), apply_weyl_channel(qutrit_spec, rho), atol=1e-15)

    def test_product_inputs_factorize(self, qutrit_spec):
        r1, r2 = random_density_matrix(3, 1), random_density_matrix(3, 2)
        out = apply_tensor_power(qutrit_spec, 2, np.kron(r1, r2))
        ref = np.kron(apply_weyl_channel(qutrit_spec, r1), apply_weyl_channel(qutrit_spec, r2))
        assert np.max(np.abs(out - ref)) <= 1e-10

    @pytest.mark.parametrize("N", [2, 3])
    def test_matches_product_kraus_enumeration(self, n2_spec, N):
        rho = random_density_matrix(2**N, 7)
        out = apply_tensor_power(n2_spec, N, rho)
        assert np.max(np.abs(out - brute_force_tensor_power(n2_spec, N, rho))) <= 1e-12

    def test_entangled_input_matches_enumeration(self, qutrit_spec):
        rho = random_density_matrix(9, 3, rank=1)
        out = apply_tensor_power(qutrit_spec, 2, rho)
        assert np.max(np.abs(out - brute_force_tensor_power(qutrit_spec, 2, rho))) <= 1e-12
        check_density_matrix(out)

    def test_qutrit_basis_product(self, qutrit_spec):
        e0 = projector(basis_state(9, 0))
        out = apply_tensor_power(qutrit_spec, 2, e0)
        assert np.max(np.abs(out - np.diag(np.kron(QUTRIT_P, QUTRIT_P)))) <= 1e-15

    def test_guard(self, qutrit_spec):
        with pytest.raises(ResourceGuardError):
            apply_tensor_power(qutrit_spec, 6, np.eye(3**6) / 3**6)


class TestSpecs:
    def test_validation(self):
        with pytest.raises(ValidationError):
            WeylChannelSpec(2, [[0.5, 0.5], [0.5, 0.5]])
        with pytest.raises(ValidationError):
            WeylChannelSpec(2, [[1.2, -0.2], [0, 0]])
        with pytest.raises(ValidationError):
            WeylChannelSpec(3, [[1, 0], [0, 0]])

    def test_immutable(self, qutrit_spec):
        with pytest.raises(ValueError):
            qutrit_spec.pi[0, 0] = 1.0

    def test_qc_from_point_mass(self):
        spec = qc_spec_from_p([1, 0, 0, 0])
        expected = np.zeros((4, 4))
        expected[:, 0] = 1 / 4
        assert np.array_equal(spec.pi, expected)

    def test_qc_from_qutrit_p(self):
        spec = qc_spec_from_p(QUTRIT_P)
        for row in spec.pi:
            assert np.allclose(row, [1 / 6, 1 / 9, 1 / 18], atol=1e-16)
        assert np.allclose(marginals(spec), QUTRIT_P, atol=1e-16)
        assert is_qc_spec(spec)

    def test_marginals_of_example(self, qutrit_spec):
        assert np.allclose(marginals(qutrit_spec), QUTRIT_P, atol=1e-16)

    def test_marginals_uniform(self):
        assert np.allclose(marginals(uniform_spec(5)), np.full(5, 0.2))

    def test_marginals_invariant_under_column_permutation(self, qutrit_spec):
        pi = qutrit_spec.pi.copy()
        pi[:, 1] = pi[::-1, 1]
        assert np.allclose(marginals(WeylChannelSpec(3, pi)), QUTRIT_P, atol=1e-16)


class TestCertificate:
    def test_chain_order(self):
        assert chain_order(2) == [(0, 0), (1, 0), (0, 1), (1, 1)]

    def test_example_is_ordered(self, qutrit_spec):
        cert = deformation_certificate(qutrit_spec)
        assert cert.ordered and cert.violation_index is None
        assert np.allclose(cert.marginals, QUTRIT_P)

    def test_descending_qc(self):
        assert deformation_certificate(qc_spec_from_p([0.5, 0.25, 0.15, 0.1])).ordered

    def test_ascending_qc_fails(self):
        cert = deformation_certificate(qc_spec_from_p([0.1, 0.9]))
        assert not cert.ordered
        assert cert.violation_index == (1, 2)

    def test_swap_breaks_first_link(self, qutrit_spec):
        pi = qutrit_spec.pi.copy()
        pi[0, 0], pi[2, 2] = pi[2, 2], pi[0, 0]
        cert = deformation_certificate(WeylChannelSpec(3, pi))
        assert not cert.ordered
        assert cert.violation_index == (0, 1)
        assert cert.violation_entries == ((0, 0), (1, 0))

    def test_ordered_implies_descending_marginals(self):
        for seed in range(30):
            rng = np.random.default_rng(seed)
            p = np.sort(rng.dirichlet(np.ones(3)))[::-1]
            spec = random_deformation(p, rng.uniform(), seed)
            if deformation_certificate(spec).ordered:
                assert np.all(np.diff(marginals(spec)) <= 1e-12)


class TestRandomDeformation:
    @given(
        st.integers(2, 5),
        st.integers(0, 2**32),
        st.floats(0.0, 1.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_valid_with_prescribed_marginals(self, n, seed, eps):
        rng = np.random.default_rng(seed)
        p = np.sort(rng.dirichlet(np.ones(n)))[::-1]
        spec = random_deformation(p, eps, seed)
        assert deformation_certificate(spec).ordered
        assert np.max(np.abs(marginals(spec) - p)) <= 1e-12
        assert spec.pi.min() >= 0

    def test_tied_marginals(self):
        spec = random_deformation([0.4, 0.4, 0.2], 0.9, 5)
        assert deformation_certificate(spec).ordered
        assert np.allclose(marginals(spec), [0.4, 0.4, 0.2])

    def test_deterministic(self):
        a = random_deformation(QUTRIT_P, 0.5, 9)
        assert a == random_deformation(QUTRIT_P, 0.5, 9)

    def test_rejects_ascending(self):
        with pytest.raises(ValidationError):
            random_deformation([0.2, 0.8], 0.5, 0)


class TestExpectationAndXi:
    def test_diagonal_fixed(self):
        rho = np.diag([0.2, 0.3, 0.5]).astype(complex)
        assert np.allclose(expectation_E(rho), rho, atol=1e-16)

    def test_plus_state(self):
        plus = np.ones(2) / math.sqrt(2)
        assert np.allclose(expectation_E(projector(plus)), np.eye(2) / 2, atol=1e-15)

    def test_zeroes_off_diagonal_and_idempotent(self):
        for rho in random_states(4, 10):
            e = expectation_E(rho)
            assert np.max(np.abs(e - np.diag(np.diag(rho)))) <= 1e-12
            assert np.max(np.abs(expectation_E(e) - e)) <= 1e-12

    def test_xi_zero_is_expectation(self):
        rho = random_density_matrix(3, 4)
        assert np.allclose(xi_k(3, 0, rho), expectation_E(rho), atol=1e-15)

    def test_xi_sum_is_identity(self):
        for rho in random_states(3, 20):
            assert np.max(np.abs(xi_sum(3, rho) - np.eye(3))) <= 1e-10

    def test_qc_channel_is_mixture_of_xi(self):
        spec = qc_spec_from_p(QUTRIT_P)
        for rho in random_states(3, 5):
            mix = sum(QUTRIT_P[k] * xi_k(3, k, rho) for k in range(3))
            assert np.max(np.abs(apply_weyl_channel(spec, rho) - mix)) <= 1e-12

    def test_qc_output_is_dephased(self):
        for n in (2, 3, 4):
            spec = qc_spec_from_p(np.random.default_rng(n).dirichlet(np.ones(n)))
            for rho in random_states(n, 10, seed=n):
                out = apply_weyl_channel(spec, rho)
                assert np.max(np.abs(expectation_E(out) - out)) <= 1e-10


class TestInvarianceAndCovariance:
    def test_qc_invariant(self):
        spec = qc_spec_from_p([0.6, 0.3, 0.1])
        for rho in random_states(3, 10):
            assert check_invariance(spec, rho) <= 1e-10

    def test_identity_not_invariant(self):
        rho = random_density_matrix(3, 0)
        assert check_invariance(identity_spec(3), rho) > 1e-3

    def test_deformation_generally_not_invariant(self, qutrit_spec):
        assert check_invariance(qutrit_spec, random_density_matrix(3, 1)) > 1e-6

    def test_trivial_displacement(self, qutrit_spec):
        assert check_weyl_covariance(qutrit_spec, random_density_matrix(3, 2), 0, 0) == 0.0

    @pytest.mark.parametrize("which", ["example", "qc", "random"])
    def test_covariance_all_displacements(self, qutrit_spec, which):
        spec = {
            "example": qutrit_spec,
            "qc": qc_spec_from_p(QUTRIT_P),
            "random": WeylChannelSpec(3, np.random.default_rng(1).dirichlet(np.ones(9)).reshape(3, 3)),
        }[which]
        for rho in random_states(3, 10):
            for a in range(3):
                for b in range(3):
                    assert check_weyl_covariance(spec, rho, a, b) <= 1e-10
