"""Weyl operators, Weyl channels and deformations of q-c channels on a qudit.

Index convention: ``pi[j][k]`` is the weight of ``W_jk = U^j V^k`` where
``U e_a = exp(2 pi i a/n) e_a`` is the clock and ``V e_a = e_{a+1}`` the
shift. Row ``j`` is the U-power, column ``k`` the V-power.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DimensionError, ResourceGuardError, ValidationError
from .linalg import apply_on_site, as_matrix, make_rng

MAX_TENSOR_DIM = 243
CHAIN_TOL = 1e-12
PROB_NEG_TOL = 1e-12
PROB_SUM_TOL = 1e-9


def prob_vector(weights) -> np.ndarray:
    """Validate and return a probability vector as a float array."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValidationError(f"probability vector must be a non-empty 1-D array, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValidationError("probability vector has non-finite entries")
    if w.min() < -PROB_NEG_TOL:
        raise ValidationError(f"probability vector has negative entry {w.min():.3e}")
    if abs(w.sum() - 1.0) > PROB_SUM_TOL:
        raise ValidationError(f"probability vector sums to {w.sum()!r}, not 1")
    return w


def weyl_generators(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Clock ``U`` and cyclic shift ``V`` on ``C^n``."""
    if n < 2:
        raise ValueError(f"Weyl generators need n >= 2, got {n}")
    u = np.diag(np.exp(2j * np.pi * np.arange(n) / n))
    v = np.zeros((n, n), dtype=np.complex128)
    v[(np.arange(n) + 1) % n, np.arange(n)] = 1.0
    return u, v


def weyl_operator(n: int, j: int, k: int) -> np.ndarray:
    """``W_jk = U^j V^k``; entry ``[a, b]`` is ``exp(2 pi i j a/n)`` when ``a = b + k mod n``."""
    j %= n
    k %= n
    rows = np.arange(n)
    w = np.zeros((n, n), dtype=np.complex128)
    # reduce j*a mod n before exponentiating so phases are exact roots of unity
    w[rows, (rows - k) % n] = np.exp(2j * np.pi * ((j * rows) % n) / n)
    return w


def weyl_stack(n: int) -> np.ndarray:
    """All ``n^2`` Weyl operators, shape ``(n*n, n, n)``, flat index ``j*n + k``."""
    return np.stack([weyl_operator(n, j, k) for j in range(n) for k in range(n)])


@dataclass(frozen=True)
class WeylChannelSpec:
    """A Weyl channel ``rho -> sum_jk pi[j][k] W_jk rho W_jk^*``."""

    n: int
    pi: np.ndarray
    label: str | None = None
    _kraus: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pi = np.array(self.pi, dtype=float)
        if self.n < 2:
            raise ValidationError(f"n must be >= 2, got {self.n}")
        if pi.shape != (self.n, self.n):
            raise ValidationError(f"pi must be {self.n}x{self.n}, got shape {pi.shape}")
        if not np.all(np.isfinite(pi)):
            raise ValidationError("pi has non-finite entries")
        if pi.min() < 0.0:
            raise ValidationError(f"pi has negative entry {pi.min()!r}")
        if abs(pi.sum() - 1.0) > PROB_SUM_TOL:
            raise ValidationError(f"pi sums to {pi.sum()!r}, not 1")
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)
        flat = pi.reshape(-1)
        keep = np.nonzero(flat > 0.0)[0]
        stack = weyl_stack(self.n)[keep] * np.sqrt(flat[keep])[:, None, None]
        stack.setflags(write=False)
        object.__setattr__(self, "_kraus", stack)

    @property
    def kraus_ops(self) -> np.ndarray:
        """Kraus operators ``sqrt(pi_jk) W_jk`` for the nonzero weights."""
        return self._kraus

    def __eq__(self, other):
        return (
            isinstance(other, WeylChannelSpec)
            and self.n == other.n
            and np.array_equal(self.pi, other.pi)
            and self.label == other.label
        )

    def __hash__(self):
        return hash((self.n, self.pi.tobytes(), self.label))


def apply_weyl_channel(spec: WeylChannelSpec, rho) -> np.ndarray:
    r = as_matrix(rho)
    if r.shape != (spec.n, spec.n):
        raise DimensionError(f"state of shape {r.shape} does not match n={spec.n}")
    k = spec.kraus_ops
    return np.einsum("mab,bc,mdc->ad", k, r, k.conj(), optimize=True)


def check_tensor_dim(n: int, N: int, guard: int = MAX_TENSOR_DIM) -> int:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    dim = n**N
    if dim > guard:
        raise ResourceGuardError(f"n^N = {n}^{N} = {dim} exceeds the dimension guard {guard}")
    return dim


def apply_tensor_power(spec: WeylChannelSpec, N: int, rho, guard: int = MAX_TENSOR_DIM) -> np.ndarray:
    """``Phi^{(x)N}(rho)`` by one single-site Kraus sweep per tensor factor."""
    dim = check_tensor_dim(spec.n, N, guard)
    r = as_matrix(rho)
    if r.shape != (dim, dim):
        raise DimensionError(f"state of shape {r.shape} does not live on ({spec.n})^{N}")
    return _sweep(r, spec.kraus_ops, spec.n, N)


def apply_tensor_power_adjoint(spec: WeylChannelSpec, N: int, x) -> np.ndarray:
    """Heisenberg-picture map ``(Phi^*)^{(x)N}``; Kraus operators are ``sqrt(pi) W^*``."""
    check_tensor_dim(spec.n, N, MAX_TENSOR_DIM)
    adj = np.ascontiguousarray(np.conj(np.swapaxes(spec.kraus_ops, 1, 2)))
    return _sweep(as_matrix(x), adj, spec.n, N)


def _sweep(r: np.ndarray, kraus: np.ndarray, n: int, N: int) -> np.ndarray:
    if N == 1:
        return np.einsum("mab,bc,mdc->ad", kraus, r, kraus.conj(), optimize=True)
    dims = (n,) * N
    for site in range(N):
        r = apply_on_site(r, kraus, dims, site)
    return r


def marginals(spec: WeylChannelSpec) -> np.ndarray:
    """Column sums ``p_k = sum_j pi[j][k]``."""
    return spec.pi.sum(axis=0)


def qc_spec_from_p(p, label: str | None = None) -> WeylChannelSpec:
    """The U-twirled phase damping channel: ``pi[j][k] = p_k / n``."""
    p = prob_vector(p)
    n = p.size
    return WeylChannelSpec(n, np.tile(p / n, (n, 1)), label)


def chain_order(n: int) -> list[tuple[int, int]]:
    """Positions ``(j, k)`` in column-major order: (0,0), (1,0), ..., (n-1,0), (0,1), ..."""
    return [(j, k) for k in range(n) for j in range(n)]


@dataclass(frozen=True)
class DeformationCertificate:
    """Outcome of checking the descending column-major chain on ``pi``.

    ``violation_index`` is the pair of chain positions ``(i, i+1)`` of the
    first failed comparison, or ``None`` when the chain holds.
    """

    ordered: bool
    marginals: np.ndarray
    violation_index: tuple[int, int] | None = None
    violation_entries: tuple[tuple[int, int], tuple[int, int]] | None = None


def deformation_certificate(spec: WeylChannelSpec, tol: float = CHAIN_TOL) -> DeformationCertificate:
    order = chain_order(spec.n)
    values = [spec.pi[j, k] for j, k in order]
    for i in range(len(values) - 1):
        if values[i] < values[i + 1] - tol:
            return DeformationCertificate(False, marginals(spec), (i, i + 1), (order[i], order[i + 1]))
    return DeformationCertificate(True, marginals(spec))


def is_qc_spec(spec: WeylChannelSpec, tol: float = 1e-12) -> bool:
    """True when all rows of ``pi`` coincide, i.e. the channel has the q-c form."""
    return bool(np.max(np.abs(spec.pi - spec.pi[0][None, :])) <= tol)


def expectation_E(rho) -> np.ndarray:
    """Average of ``U^j rho U^{j*}`` over ``j``: zeroes the off-diagonal entries."""
    r = as_matrix(rho)
    n = r.shape[0]
    if n < 2:
        return r.copy()
    u, _ = weyl_generators(n)
    out = np.zeros_like(r)
    uj = np.eye(n, dtype=np.complex128)
    for _ in range(n):
        out += uj @ r @ uj.conj().T
        uj = u @ uj
    return out / n


def xi_k(n: int, k: int, rho) -> np.ndarray:
    """``Xi_k(rho) = (1/n) sum_j U^j V^k rho V^{k*} U^{j*}``."""
    r = as_matrix(rho)
    if r.shape != (n, n):
        raise DimensionError(f"state of shape {r.shape} does not match n={n}")
    vk = weyl_operator(n, 0, k)
    return expectation_E(vk @ r @ vk.conj().T)


def xi_sum(n: int, rho) -> np.ndarray:
    """``sum_k Xi_k(rho)``; equals ``Tr(rho) I``."""
    return sum(xi_k(n, k, rho) for k in range(n))


def check_invariance(spec: WeylChannelSpec, rho) -> float:
    """Largest max-entry deviation of ``U^j Phi(rho) U^{j*}`` from ``Phi(rho)`` over ``j``."""
    out = apply_weyl_channel(spec, rho)
    u, _ = weyl_generators(spec.n)
    worst = 0.0
    uj = np.eye(spec.n, dtype=np.complex128)
    for _ in range(spec.n):
        worst = max(worst, float(np.max(np.abs(uj @ out @ uj.conj().T - out))))
        uj = u @ uj
    return worst


def check_weyl_covariance(spec: WeylChannelSpec, rho, a: int, b: int) -> float:
    """``|| Phi(W_ab rho W_ab^*) - W_ab Phi(rho) W_ab^* ||_max``."""
    r = as_matrix(rho)
    w = weyl_operator(spec.n, a, b)
    lhs = apply_weyl_channel(spec, w @ r @ w.conj().T)
    rhs = w @ apply_weyl_channel(spec, r) @ w.conj().T
    return float(np.max(np.abs(lhs - rhs)))


def random_deformation(p, perturbation: float, seed: int, label: str | None = None) -> WeylChannelSpec:
    """Random table satisfying the descending chain with column sums ``p``.

    Each column ``k`` starts as ``p_k * ((1 - s) / n + s * d)`` with ``d`` a
    descending-sorted Dirichlet(1) draw and ``s = perturbation`` in [0, 1].
    Columns are then pulled toward their mean (a convex combination, which
    keeps the sum and the descending order) just enough that every column
    minimum dominates the next column's maximum. No draws are rejected.
    """
    p = prob_vector(p)
    n = p.size
    if np.any(np.diff(p) > PROB_NEG_TOL):
        raise ValidationError("marginals must be non-increasing to admit a deformation")
    if not 0.0 <= perturbation <= 1.0:
        raise ValueError("perturbation must lie in [0, 1]")
    rng = make_rng(seed)
    cols = []
    for k in range(n):
        d = np.sort(rng.dirichlet(np.ones(n)))[::-1]
        cols.append(p[k] * ((1.0 - perturbation) / n + perturbation * d))
    means = p / n
    below = [means[k] - cols[k][-1] for k in range(n)]  # spread under the mean
    above = [cols[k][0] - means[k] for k in range(n)]  # spread over the mean
    shrink = np.ones(n)
    for k in range(n - 1):
        gap = means[k] - means[k + 1]
        spread = below[k] + above[k + 1]
        if spread > gap:
            s = gap / spread if spread > 0 else 1.0
            shrink[k] = min(shrink[k], s)
            shrink[k + 1] = min(shrink[k + 1], s)
    pi = np.empty((n, n))
    for k in range(n):
        pi[:, k] = means[k] + shrink[k] * (cols[k] - means[k])
    pi = np.clip(pi, 0.0, None)
    return WeylChannelSpec(n, pi, label)


QUTRIT_EXAMPLE_FRACTIONS = [
    [Fraction(1, 4), Fraction(1, 8), Fraction(1, 12)],
    [Fraction(1, 8), Fraction(1, 8), Fraction(1, 24)],
    [Fraction(1, 8), Fraction(1, 12), Fraction(1, 24)],
]


def qutrit_example_spec() -> WeylChannelSpec:
    """The worked qutrit deformation with marginals (1/2, 1/3, 1/6), rows indexed by j."""
    pi = np.array([[float(x) for x in row] for row in QUTRIT_EXAMPLE_FRACTIONS])
    return WeylChannelSpec(3, pi, "qutrit-example")


def identity_spec(n: int) -> WeylChannelSpec:
    pi = np.zeros((n, n))
    pi[0, 0] = 1.0
    return WeylChannelSpec(n, pi, "identity")


def uniform_spec(n: int) -> WeylChannelSpec:
    return WeylChannelSpec(n, np.full((n, n), 1.0 / n**2), "uniform")
