"""Dense complex linear algebra and entropy primitives.

Operators and states are plain ``numpy`` arrays of dtype ``complex128``;
pure states are 1-D, density matrices and operators are 2-D. Validators
(:func:`check_density_matrix`, :func:`check_pure_state`) enforce the
invariants at API boundaries, the hot paths skip them.

Randomness always flows through :func:`make_rng`, a Philox counter-based
generator keyed by an explicit integer seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._jacobi import jacobi_sweeps
from .errors import ConvergenceError, DimensionError, ValidationError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
PURE_NORM_TOL = 1e-12
COMPLETENESS_TOL = 1e-10

EIG_THRESHOLD = 1e-12
EIG_MAX_SWEEPS = 100

SUPPORT_EIG_CUTOFF = 1e-12
SUPPORT_WEIGHT_CUTOFF = 1e-9


def log_scale(base: int | str | float = 2) -> float:
    """Return ``ln(base)`` for the supported bases (2 for bits, "e"/"nat" for nats)."""
    if base in (2, "2", 2.0, "bits", "bit"):
        return math.log(2.0)
    if base in ("e", "nat", "nats") or base == math.e:
        return 1.0
    raise ValueError(f"unsupported logarithm base {base!r}; use 2 or 'e'")


def base_label(base: int | str | float = 2) -> str:
    return "2" if log_scale(base) != 1.0 else "e"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def derive_seed(seed: int, *indices: int) -> int:
    """Deterministic 63-bit child seed for ``(seed, *indices)``."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *map(int, indices)])
    hi, lo = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 31) ^ int(lo)


# -- validation -------------------------------------------------------------


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return m.shape[0] == m.shape[1] and float(np.max(np.abs(m - m.conj().T), initial=0.0)) <= tol


def check_density_matrix(rho) -> np.ndarray:
    """Return ``rho`` as a complex array after checking it is a valid state.

    Raises
    ------
    ValidationError
        If ``rho`` is not Hermitian to 1e-10, its trace is off by more
        than 1e-10, or its smallest eigenvalue is below -1e-9.
    """
    a = as_matrix(rho)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"density matrix must be square, got {a.shape}")
    if not is_hermitian(a):
        raise ValidationError("density matrix is not Hermitian")
    tr = np.trace(a).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"density matrix trace {tr!r} is not 1")
    lmin = hermitian_eig(a).eigenvalues[-1]
    if lmin < -PSD_TOL:
        raise ValidationError(f"density matrix has negative eigenvalue {lmin:.3e}")
    return a


def check_pure_state(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=np.complex128)
    if v.ndim != 1:
        raise DimensionError(f"pure state must be a vector, got shape {v.shape}")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > PURE_NORM_TOL:
        raise ValidationError(f"pure state norm {nrm!r} is not 1")
    return v


def projector(psi) -> np.ndarray:
    """|psi><psi| for a state vector."""
    v = np.asarray(psi, dtype=np.complex128)
    return np.outer(v, v.conj())


def basis_state(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def allclose_abs(a, b, atol: float) -> bool:
    """Max-entry comparison with an explicit absolute tolerance."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and float(np.max(np.abs(a - b), initial=0.0)) <= atol


# -- products and partial traces -------------------------------------------


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product, ``result[a*rB + c, b*cB + d] = A[a, b] * B[c, d]``."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def tensor_all(factors: Sequence) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128) if np.asarray(factors[0]).ndim == 2 else np.ones(1, dtype=np.complex128)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=np.complex128))
    return out


def partial_trace(rho, dim_a: int, dim_b: int, keep: str = "A") -> np.ndarray:
    """Reduced state of a bipartite ``rho`` on ``A (x) B``.

    ``keep`` selects the surviving factor, ``"A"`` or ``"B"``.
    """
    a = as_matrix(rho)
    if a.shape != (dim_a * dim_b, dim_a * dim_b):
        raise DimensionError(f"state of shape {a.shape} does not live on {dim_a}x{dim_b}")
    t = a.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep in ("A", "a", 0):
        return np.einsum("ibjb->ij", t)
    if keep in ("B", "b", 1):
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def apply_on_site(rho: np.ndarray, kraus: np.ndarray, dims: Sequence[int], site: int) -> np.ndarray:
    """Apply the Kraus map ``kraus`` (shape ``(m, d_out, d_in)``) to one tensor factor.

    ``dims`` lists the factor dimensions of ``rho``; the result has
    ``dims[site]`` replaced by ``d_out``.
    """
    dims = tuple(int(d) for d in dims)
    left = math.prod(dims[:site])
    right = math.prod(dims[site + 1:])
    d_in = dims[site]
    d_out = kraus.shape[1]
    t = rho.reshape(left, d_in, right, left, d_in, right)
    out = np.einsum("mab,lbrxcy,mdc->larxdy", kraus, t, kraus.conj(), optimize=True)
    dim = left * d_out * right
    return out.reshape(dim, dim)


# -- eigendecomposition ------------------------------------------------------


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending and the matching unit eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.conj().T


def _eig_raw(m: np.ndarray, tol: float = EIG_THRESHOLD) -> tuple[np.ndarray, np.ndarray, int]:
    scale = max(1.0, float(np.linalg.norm(m)))
    d, q, sweeps, off = jacobi_sweeps(np.ascontiguousarray(m), tol * scale, EIG_MAX_SWEEPS)
    if sweeps < 0:
        raise ConvergenceError(
            f"Jacobi iteration did not converge in {EIG_MAX_SWEEPS} sweeps (off-diagonal norm {off:.3e})"
        )
    order = np.argsort(-d, kind="stable")
    return d[order], q[:, order], sweeps


def hermitian_eig(m, tol: float = EIG_THRESHOLD) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Sweeps stop once the Frobenius norm of the off-diagonal part falls
    below ``tol * max(1, ||M||_F)``; more than 100 sweeps raises
    :class:`ConvergenceError`.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix must be square, got {a.shape}")
    if not is_hermitian(a, 1e-9):
        raise ValidationError("matrix is not Hermitian within 1e-9")
    a = 0.5 * (a + a.conj().T)
    w, q, sweeps = _eig_raw(a, tol)
    return EigenDecomposition(w, q, sweeps)


def eigvalsh_desc(m: np.ndarray) -> np.ndarray:
    """Eigenvalues only, descending; no validation (hot path)."""
    return _eig_raw(0.5 * (m + m.conj().T))[0]


# -- entropies ---------------------------------------------------------------


def clamp_spectrum(eigenvalues: np.ndarray) -> np.ndarray:
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size and lam.min() < -PSD_TOL:
        raise ValidationError(f"spectrum has eigenvalue {lam.min():.3e} below -1e-9")
    return np.clip(lam, 0.0, 1.0)


def shannon_entropy(p, base: int | str = 2) -> float:
    """-sum p log p with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)) / log_scale(base))


def von_neumann_entropy(rho, base: int | str = 2) -> float:
    lam = clamp_spectrum(hermitian_eig(rho).eigenvalues)
    return max(shannon_entropy(lam, base), 0.0)


def relative_entropy(rho, sigma, base: int | str = 2) -> float:
    """Quantum relative entropy ``S(rho || sigma)``; ``inf`` when supports are incompatible.

    Evaluated in the eigenbasis of ``sigma``: ``Tr rho log rho - sum_i <v_i|rho|v_i> log s_i``.
    Support leakage is declared when ``rho`` puts weight above 1e-9 on a
    ``sigma`` eigenvector with eigenvalue below 1e-12.
    """
    r = as_matrix(rho)
    s = as_matrix(sigma)
    if r.shape != s.shape:
        raise DimensionError(f"shapes differ: {r.shape} vs {s.shape}")
    es = hermitian_eig(s)
    weights = np.einsum("ji,jk,ki->i", es.eigenvectors.conj(), r, es.eigenvectors).real
    small = es.eigenvalues < SUPPORT_EIG_CUTOFF
    if np.any(weights[small] > SUPPORT_WEIGHT_CUTOFF):
        return math.inf
    lam_s = es.eigenvalues[~small]
    cross = float(np.sum(weights[~small] * np.log(lam_s)))
    lam_r = clamp_spectrum(hermitian_eig(r).eigenvalues)
    nz = lam_r[lam_r > 0]
    self_term = float(np.sum(nz * np.log(nz)))
    return (self_term - cross) / log_scale(base)


# -- random states and channels ---------------------------------------------


def random_pure_state(dim: int, seed: int) -> np.ndarray:
    """Haar-random unit vector: normalized i.i.d. standard complex Gaussians."""
    if dim < 1:
        raise DimensionError("dim must be >= 1")
    rng = make_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_density_matrix(dim: int, seed: int, rank: int | None = None) -> np.ndarray:
    """Ginibre-ensemble mixed state (rank ``dim`` by default)."""
    rng = make_rng(seed)
    k = dim if rank is None else rank
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map ``rho -> sum_m K_m rho K_m^*``.

    ``kraus_ops`` has shape ``(m, out_dim, in_dim)``. Construction checks
    completeness ``sum K^* K = I`` to 1e-10.
    """

    in_dim: int
    out_dim: int
    kraus_ops: np.ndarray

    def __post_init__(self):
        ops = np.array(self.kraus_ops, dtype=np.complex128)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[1:] != (self.out_dim, self.in_dim):
            raise DimensionError(
                f"Kraus operators of shape {ops.shape} do not map {self.in_dim} -> {self.out_dim}"
            )
        gram = np.einsum("mji,mjk->ik", ops.conj(), ops)
        if not allclose_abs(gram, np.eye(self.in_dim), COMPLETENESS_TOL):
            err = float(np.max(np.abs(gram - np.eye(self.in_dim))))
            raise ValidationError(f"Kraus operators are not complete (error {err:.3e})")
        ops.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)

    def __call__(self, rho) -> np.ndarray:
        r = as_matrix(rho)
        if r.shape != (self.in_dim, self.in_dim):
            raise DimensionError(f"input of shape {r.shape} does not match in_dim={self.in_dim}")
        return np.einsum("mab,bc,mdc->ad", self.kraus_ops, r, self.kraus_ops.conj(), optimize=True)

    apply = __call__

    def completeness_error(self) -> float:
        gram = np.einsum("mji,mjk->ik", self.kraus_ops.conj(), self.kraus_ops)
        return float(np.max(np.abs(gram - np.eye(self.in_dim))))


def random_channel(dim: int, kraus_count: int, seed: int) -> KrausChannel:
    """Random channel from an isometry: orthonormalized ``(kraus_count*dim) x dim`` Gaussian block."""
    if kraus_count < 1:
        raise ValueError("kraus_count must be >= 1")
    rng = make_rng(seed)
    g = rng.standard_normal((kraus_count * dim, dim)) + 1j * rng.standard_normal((kraus_count * dim, dim))
    q, r = np.linalg.qr(g)
    # fix column phases so the isometry is Haar distributed
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return KrausChannel(dim, dim, q.reshape(kraus_count, dim, dim))


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel(dim, dim, np.eye(dim, dtype=np.complex128)[None])


def depolarizing_channel(dim: int) -> KrausChannel:
    """Completely depolarizing channel ``rho -> Tr(rho) I/dim``."""
    ops = np.zeros((dim * dim, dim, dim), dtype=np.complex128)
    for i in range(dim):
        for j in range(dim):
            ops[i * dim + j, i, j] = 1.0 / math.sqrt(dim)
    return KrausChannel(dim, dim, ops)
