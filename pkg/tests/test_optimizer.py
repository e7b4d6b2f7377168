import math

import numpy as np
import pytest

from weylcap.errors import DimensionError, NotADeformationError, ResourceGuardError
from weylcap.linalg import basis_state, random_pure_state, shannon_entropy
from weylcap.majorization import entropy_lower_bound
from weylcap.optimizer import (
    EntropyObjective,
    OptimizerConfig,
    min_output_entropy,
    min_output_entropy_closed_form,
    output_entropy,
)
from weylcap.weyl import (
    WeylChannelSpec,
    apply_tensor_power,
    identity_spec,
    qc_spec_from_p,
    random_deformation,
    uniform_spec,
)

H_QUTRIT = 1.4591479170272448  # H_2(1/2, 1/3, 1/6), checked against mpmath in test_linalg
FAST = OptimizerConfig(restarts=8)


def numpy_entropy(spec, N, x):
    """Independent objective: LAPACK spectrum of the explicitly normalized input."""
    psi = x / np.linalg.norm(x)
    out = apply_tensor_power(spec, N, np.outer(psi, psi.conj()))
    lam = np.clip(np.linalg.eigvalsh(out), 0, 1)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)))


def central_difference_oracle(spec, N, psi, h=1e-6):
    g = np.zeros(psi.size, dtype=complex)
    for i in range(psi.size):
        for unit in (1, 1j):
            e = np.zeros(psi.size, dtype=complex)
            e[i] = h * unit
            g[i] += unit * (numpy_entropy(spec, N, psi + e) - numpy_entropy(spec, N, psi - e)) / (2 * h)
    return g


class TestOutputEntropy:
    def test_qutrit_basis_state(self, qutrit_spec):
        assert output_entropy(qutrit_spec, 1, basis_state(3, 0)) == pytest.approx(H_QUTRIT, abs=1e-13)

    def test_identity_channel(self):
        assert abs(output_entropy(identity_spec(3), 1, random_pure_state(3, 1))) <= 1e-12

    def test_uniform_channel(self):
        assert output_entropy(uniform_spec(4), 1, random_pure_state(4, 2)) == pytest.approx(2.0, abs=1e-12)

    def test_nats(self, qutrit_spec):
        assert output_entropy(qutrit_spec, 1, basis_state(3, 0), "e") == pytest.approx(H_QUTRIT * math.log(2), abs=1e-13)

    def test_dimension_mismatch(self, qutrit_spec):
        with pytest.raises(DimensionError):
            output_entropy(qutrit_spec, 2, basis_state(3, 0))


class TestGradient:
    def test_analytic_matches_central_differences(self, qutrit_spec, n2_spec):
        cases = [(qutrit_spec, 1), (qutrit_spec, 2), (n2_spec, 2), (random_deformation([0.5, 0.3, 0.2], 0.6, 3), 1)]
        for i in range(20):
            spec, N = cases[i % len(cases)]
            obj = EntropyObjective(spec, N)
            psi = random_pure_state(obj.dim, 100 + i)
            _, g = obj.value_and_gradient(psi)
            oracle = central_difference_oracle(spec, N, psi)
            assert np.linalg.norm(g - oracle) <= 1e-4 * np.linalg.norm(oracle)

    def test_builtin_central_gradient_agrees(self, qutrit_spec):
        obj = EntropyObjective(qutrit_spec, 1)
        psi = random_pure_state(3, 4)
        assert np.allclose(obj.central_gradient(psi), obj.value_and_gradient(psi)[1], rtol=0, atol=1e-7)

    def test_gradient_vanishes_at_basis_states(self, qutrit_spec):
        _, g = EntropyObjective(qutrit_spec, 2).value_and_gradient(basis_state(9, 4))
        assert np.linalg.norm(g) <= 1e-12

    def test_gradient_is_tangent(self, qutrit_spec):
        psi = random_pure_state(3, 8)
        _, g = EntropyObjective(qutrit_spec, 1).value_and_gradient(psi)
        assert abs(np.vdot(psi, g).real) <= 1e-13


class TestMinOutputEntropy:
    def test_qutrit_example(self, qutrit_spec):
        res = min_output_entropy(qutrit_spec, 1, OptimizerConfig(restarts=32))
        assert res.value == pytest.approx(H_QUTRIT, abs=1e-6)
        assert res.restarts_used == 32 and res.base == "2"
        assert abs(np.linalg.norm(res.argmin) - 1) <= 1e-12

    def test_identity_channel(self):
        for N in (1, 2):
            assert abs(min_output_entropy(identity_spec(2), N, FAST).value) <= 1e-9

    def test_qc_spec(self):
        res = min_output_entropy(qc_spec_from_p([1 / 2, 1 / 3, 1 / 6]), 1, OptimizerConfig(restarts=16))
        assert res.value == pytest.approx(H_QUTRIT, abs=1e-6)

    def test_never_above_basis_products(self, qutrit_spec, n2_spec):
        for spec, N in ((qutrit_spec, 1), (n2_spec, 2)):
            res = min_output_entropy(spec, N, OptimizerConfig(restarts=16))
            dim = spec.n**N
            best_basis = min(output_entropy(spec, N, basis_state(dim, i)) for i in range(dim))
            assert res.value <= best_basis + 1e-6

    def test_above_block_bound(self):
        rng = np.random.default_rng(0)
        for n in (2, 3):
            for _ in range(3):
                spec = WeylChannelSpec(n, rng.dirichlet(np.ones(n * n)).reshape(n, n))
                res = min_output_entropy(spec, 1, FAST)
                assert res.value >= entropy_lower_bound(spec.pi, n) - 1e-6

    def test_deformation_matches_closed_form(self):
        for seed in range(3):
            p = np.sort(np.random.default_rng(seed).dirichlet(np.ones(3)))[::-1]
            spec = random_deformation(p, 0.7, seed)
            res = min_output_entropy(spec, 1, OptimizerConfig(restarts=64, seed=seed))
            assert abs(res.value - min_output_entropy_closed_form(spec, 1)) <= 1e-5

    def test_deterministic(self, qutrit_spec):
        cfg = OptimizerConfig(restarts=4, seed=11)
        a = min_output_entropy(qutrit_spec, 2, cfg)
        b = min_output_entropy(qutrit_spec, 2, cfg)
        assert a.value == b.value and np.array_equal(a.argmin, b.argmin)
        assert a.restart_values == b.restart_values and a.best_restart_seed == b.best_restart_seed

    def test_threads_match_serial(self, n2_spec):
        serial = min_output_entropy(n2_spec, 2, OptimizerConfig(restarts=6, seed=3))
        threaded = min_output_entropy(n2_spec, 2, OptimizerConfig(restarts=6, seed=3, threads=3))
        assert serial.value == threaded.value
        assert np.array_equal(serial.argmin, threaded.argmin)
        assert serial.restart_values == threaded.restart_values

    def test_central_gradient_mode(self, qutrit_spec):
        cfg = OptimizerConfig(restarts=4, gradient="central")
        assert min_output_entropy(qutrit_spec, 1, cfg).value == pytest.approx(H_QUTRIT, abs=1e-6)

    def test_guard(self, qutrit_spec):
        with pytest.raises(ResourceGuardError):
            min_output_entropy(qutrit_spec, 6, FAST)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            OptimizerConfig(restarts=0)
        with pytest.raises(ValueError):
            OptimizerConfig(step_tolerance=0)

    def test_config_digest_ignores_threads(self):
        assert OptimizerConfig(threads=4).digest() == OptimizerConfig().digest()
        assert OptimizerConfig(seed=1).digest() != OptimizerConfig().digest()


class TestClosedForm:
    def test_qutrit(self, qutrit_spec):
        assert min_output_entropy_closed_form(qutrit_spec, 1) == pytest.approx(H_QUTRIT, abs=1e-14)
        assert min_output_entropy_closed_form(qutrit_spec, 2) == pytest.approx(2.9182958340544896, abs=1e-13)

    def test_uniform(self):
        for N in (1, 2, 3):
            assert min_output_entropy_closed_form(uniform_spec(3), N) == pytest.approx(N * math.log2(3), abs=1e-13)

    def test_nats(self, qutrit_spec):
        h = shannon_entropy([1 / 2, 1 / 3, 1 / 6], "e")
        assert min_output_entropy_closed_form(qutrit_spec, 3, "e") == pytest.approx(3 * h, abs=1e-13)

    def test_refuses_non_deformation(self):
        with pytest.raises(NotADeformationError):
            min_output_entropy_closed_form(qc_spec_from_p([0.2, 0.8]), 1)
