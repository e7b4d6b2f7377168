"""Minimal output entropy of Weyl channels and their tensor powers.

The numeric route minimizes ``S(Phi^{(x)N}(|psi><psi|))`` over unit vectors
by projected gradient descent on the sphere from seeded Haar-random
starts. Entropy is concave, so restricting to pure inputs loses nothing.
The optimizer only ever certifies an upper bound on the infimum; callers
pair it with the block lower bound from :mod:`weylcap.majorization`.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotADeformationError
from .linalg import _eig_raw, derive_seed, log_scale, make_rng, random_pure_state, shannon_entropy
from .weyl import (
    WeylChannelSpec,
    _sweep,
    check_tensor_dim,
    deformation_certificate,
    marginals,
)

ARMIJO_C = 1e-4
MAX_BACKTRACKS = 60
LINE_SEARCH_FAILURES = 5
LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class OptimizerConfig:
    """Restart and stopping parameters.

    ``gradient`` selects the descent direction: ``"analytic"`` uses the
    closed-form derivative of the entropy, ``"central"`` uses central
    differences with step ``fd_step`` (slower, kept as a cross-check).
    ``threads`` only affects wall-clock time, never the result.
    """

    restarts: int = 64
    max_iterations: int = 500
    step_tolerance: float = 1e-10
    value_tolerance: float = 1e-12
    seed: int = 0
    gradient: str = "analytic"
    fd_step: float = 1e-6
    threads: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.step_tolerance > 0 and self.value_tolerance > 0 and self.fd_step > 0):
            raise ValueError("tolerances must be positive")
        if self.gradient not in ("analytic", "central"):
            raise ValueError(f"unknown gradient mode {self.gradient!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def digest(self) -> str:
        fields = dataclasses.asdict(self)
        fields.pop("threads")
        blob = json.dumps(fields, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class EntropyResult:
    value: float
    argmin: np.ndarray
    base: str
    restarts_used: int
    best_restart_seed: int
    converged: bool
    best_restart_index: int = 0
    restart_values: tuple[float, ...] = ()


class EntropyObjective:
    """``psi -> S(Phi^{(x)N}(|psi><psi|))`` in nats, with its sphere gradient."""

    def __init__(self, spec: WeylChannelSpec, N: int):
        self.spec = spec
        self.N = N
        self.dim = check_tensor_dim(spec.n, N)
        self._kraus = spec.kraus_ops
        self._adjoint = np.ascontiguousarray(np.conj(np.swapaxes(spec.kraus_ops, 1, 2)))

    def output(self, psi: np.ndarray) -> np.ndarray:
        return _sweep(np.outer(psi, psi.conj()), self._kraus, self.spec.n, self.N)

    def value(self, psi: np.ndarray) -> float:
        lam, _, _ = _eig_raw(_hermitize(self.output(psi)))
        return shannon_entropy(np.clip(lam, 0.0, 1.0), "e")

    def value_and_gradient(self, psi: np.ndarray) -> tuple[float, np.ndarray]:
        lam, q, _ = _eig_raw(_hermitize(self.output(psi)))
        lam = np.clip(lam, 0.0, 1.0)
        f = shannon_entropy(lam, "e")
        log_sigma = (q * np.log(np.maximum(lam, LOG_FLOOR))) @ q.conj().T
        g = -2.0 * (_sweep(log_sigma, self._adjoint, self.spec.n, self.N) @ psi)
        return f, project_tangent(psi, g)

    def normalized_value(self, x: np.ndarray) -> float:
        return self.value(x / np.linalg.norm(x))

    def central_gradient(self, psi: np.ndarray, h: float = 1e-6) -> np.ndarray:
        """Central differences of ``x -> S(Phi(x x^*/|x|^2))`` over real and imaginary parts."""
        g = np.zeros(self.dim, dtype=np.complex128)
        for i in range(self.dim):
            for unit in (1.0, 1j):
                e = np.zeros(self.dim, dtype=np.complex128)
                e[i] = h * unit
                d = (self.normalized_value(psi + e) - self.normalized_value(psi - e)) / (2 * h)
                g[i] += d * unit
        return project_tangent(psi, g)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def project_tangent(psi: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Remove the radial component of ``g`` at the unit vector ``psi``."""
    return g - np.real(np.vdot(psi, g)) * psi


def output_entropy(spec: WeylChannelSpec, N: int, psi, base: int | str = 2) -> float:
    v = np.asarray(psi, dtype=np.complex128)
    obj = EntropyObjective(spec, N)
    if v.shape != (obj.dim,):
        raise DimensionError(f"state of length {v.size} does not live on ({spec.n})^{N}")
    return obj.value(v) / log_scale(base)


def _descend(obj: EntropyObjective, psi: np.ndarray, cfg: OptimizerConfig, rng: np.random.Generator):
    """Projected gradient descent with Barzilai-Borwein trial steps and Armijo backtracking."""
    if cfg.gradient == "analytic":
        value_grad = obj.value_and_gradient
    else:

        def value_grad(x):
            return obj.value(x), obj.central_gradient(x, cfg.fd_step)

    f, g = value_grad(psi)
    alpha = 1.0
    failures = 0
    converged = False
    for _ in range(cfg.max_iterations):
        gnorm2 = float(np.real(np.vdot(g, g)))
        if math.sqrt(gnorm2) <= cfg.step_tolerance:
            converged = True
            break
        step = alpha
        trial = None
        for _ in range(MAX_BACKTRACKS):
            cand = psi - step * g
            cand /= np.linalg.norm(cand)
            f_cand = obj.value(cand)
            if f_cand <= f - ARMIJO_C * step * gnorm2:
                trial = cand
                break
            step *= 0.5
        if trial is None:
            failures += 1
            if failures >= LINE_SEARCH_FAILURES:
                break
            # stalled on a spectral crossing: nudge along a random tangent direction
            z = rng.standard_normal(obj.dim) + 1j * rng.standard_normal(obj.dim)
            z = project_tangent(psi, z)
            psi = psi + cfg.step_tolerance * z / np.linalg.norm(z)
            psi /= np.linalg.norm(psi)
            f, g = value_grad(psi)
            alpha = 1.0
            continue
        f_new, g_new = value_grad(trial)
        s = trial - psi
        y = g_new - g
        sy = float(np.real(np.vdot(s, y)))
        alpha = float(np.real(np.vdot(s, s))) / sy if sy > 0 else 2.0 * step
        alpha = min(max(alpha, 1e-8), 1e4)
        moved = float(np.linalg.norm(s))
        decrease = f - f_new
        psi, f, g = trial, f_new, g_new
        if moved <= cfg.step_tolerance or decrease <= cfg.value_tolerance:
            converged = True
            break
    return f, psi, converged


def _run_restart(obj: EntropyObjective, cfg: OptimizerConfig, index: int):
    seed = derive_seed(cfg.seed, index)
    psi0 = random_pure_state(obj.dim, seed)
    f, psi, converged = _descend(obj, psi0, cfg, make_rng(derive_seed(seed, 1)))
    return f, psi, converged, seed


def min_output_entropy(
    spec: WeylChannelSpec, N: int = 1, config: OptimizerConfig | None = None, base: int | str = 2
) -> EntropyResult:
    """Best output entropy over ``config.restarts`` independent seeded descents.

    Restart ``i`` depends only on ``(config.seed, i)``; the minimum is
    taken with ties going to the lower restart index, so serial and
    threaded runs agree exactly.
    """
    cfg = config or OptimizerConfig()
    obj = EntropyObjective(spec, N)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            runs = list(pool.map(lambda i: _run_restart(obj, cfg, i), range(cfg.restarts)))
    else:
        runs = [_run_restart(obj, cfg, i) for i in range(cfg.restarts)]
    best = min(range(len(runs)), key=lambda i: (runs[i][0], i))
    f, psi, converged, seed = runs[best]
    scale = log_scale(base)
    return EntropyResult(
        value=max(f, 0.0) / scale,
        argmin=psi,
        base="2" if scale != 1.0 else "e",
        restarts_used=cfg.restarts,
        best_restart_seed=seed,
        converged=converged,
        best_restart_index=best,
        restart_values=tuple(max(r[0], 0.0) / scale for r in runs),
    )


def min_output_entropy_closed_form(spec: WeylChannelSpec, N: int = 1, base: int | str = 2) -> float:
    """``N * H(p)`` with ``p`` the column marginals; only for tables satisfying the chain."""
    cert = deformation_certificate(spec)
    if not cert.ordered:
        raise NotADeformationError(
            f"pi violates the descending chain at positions {cert.violation_index}"
        )
    return N * shannon_entropy(marginals(spec), base)
