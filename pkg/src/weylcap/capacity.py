"""Classical capacity closed forms, additivity reports and inequality checks.

Capacities use the covariant-channel identity ``C = log n - min S``; the
closed forms are only offered where they are proven (q-c tables and
tables satisfying the descending chain). The verification helpers check
the relative-entropy argument behind the q-c lower bound sample by sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, MarginViolationError, NotADeformationError
from .linalg import (
    KrausChannel,
    apply_on_site,
    as_matrix,
    derive_seed,
    hermitian_eig,
    log_scale,
    make_rng,
    partial_trace,
    projector,
    random_channel,
    random_density_matrix,
    random_pure_state,
    relative_entropy,
    shannon_entropy,
    von_neumann_entropy,
)
from .majorization import tensor_block_bound
from .optimizer import OptimizerConfig, min_output_entropy, min_output_entropy_closed_form
from .weyl import (
    WeylChannelSpec,
    deformation_certificate,
    prob_vector,
    qc_spec_from_p,
    weyl_operator,
)

MARGIN_TOL = 1e-8
BRACKET_TOL = 1e-6
RED_ALERT_GAP = 1e-4


@dataclass(frozen=True)
class CapacityReport:
    n: int
    base: str
    marginals: np.ndarray
    capacity: float
    min_output_entropy: float
    formula: str


def _capacity_report(p: np.ndarray, base, formula: str) -> CapacityReport:
    n = p.size
    h = shannon_entropy(p, base)
    log_n = math.log(n) / log_scale(base)
    return CapacityReport(n, "2" if log_scale(base) != 1.0 else "e", p, log_n - h, h, formula)


def capacity_qc(p, base: int | str = 2) -> CapacityReport:
    """Capacity of the q-c Weyl channel built from ``p``: ``log n - H(p)``."""
    return _capacity_report(prob_vector(p), base, "qc_corollary2")


def capacity_deformed(spec: WeylChannelSpec, base: int | str = 2) -> CapacityReport:
    """Capacity of a deformed q-c channel; refuses tables that break the descending chain."""
    cert = deformation_certificate(spec)
    if not cert.ordered:
        raise NotADeformationError(
            f"pi violates the descending chain at positions {cert.violation_index}; "
            "no closed-form capacity is available"
        )
    return _capacity_report(cert.marginals, base, "deformed_corollary4")


@dataclass(frozen=True)
class AdditivityReport:
    N: int
    single_copy_min: float
    scaled_single: float
    numeric_min_at_N: float
    block_bound_at_N: float
    gap_numeric: float
    gap_bound: float
    optimizer_config_digest: str
    base: str = "2"
    restarts: int = 0
    best_restart_seed: int = 0
    converged: bool = True
    red_alert: bool = False
    red_alert_restarts: tuple[int, ...] = ()
    bound_below_scaled: bool = False


def additivity_report(
    spec: WeylChannelSpec, N: int, config: OptimizerConfig | None = None, base: int | str = 2
) -> AdditivityReport:
    """Bracket ``inf S(Phi^{(x)N})`` between the block bound and the optimizer.

    Raises :class:`MarginViolationError` when the bracket is inverted, which
    would point at a bug rather than a property of the channel.
    """
    cfg = config or OptimizerConfig()
    single = min_output_entropy_closed_form(spec, 1, base)
    scaled = N * single
    block = tensor_block_bound(spec, N, base).entropy_bound
    result = min_output_entropy(spec, N, cfg, base)
    numeric = result.value
    alerts = tuple(i for i, v in enumerate(result.restart_values) if v < scaled - RED_ALERT_GAP)
    report = AdditivityReport(
        N=N,
        single_copy_min=single,
        scaled_single=scaled,
        numeric_min_at_N=numeric,
        block_bound_at_N=block,
        gap_numeric=numeric - scaled,
        gap_bound=scaled - block,
        optimizer_config_digest=cfg.digest(),
        base=result.base,
        restarts=cfg.restarts,
        best_restart_seed=result.best_restart_seed,
        converged=result.converged,
        red_alert=bool(alerts),
        red_alert_restarts=alerts,
        bound_below_scaled=block < scaled - 1e-12,
    )
    if numeric > scaled + BRACKET_TOL or block > numeric + BRACKET_TOL:
        raise MarginViolationError(
            "additivity bracket inverted",
            {"pi": spec.pi.tolist(), "N": N, "seed": cfg.seed, "report": report},
        )
    return report


# -- the q-c lower bound and its c-q channel -------------------------------


def _check_bipartite(p: np.ndarray, omega: KrausChannel, xi) -> np.ndarray:
    v = np.asarray(xi, dtype=np.complex128)
    if omega.in_dim != omega.out_dim:
        raise DimensionError("the reference channel must map a space to itself")
    if v.shape != (p.size * omega.in_dim,):
        raise DimensionError(
            f"state of length {v.size} does not live on {p.size} x {omega.in_dim}"
        )
    return v


def apply_product_channel(spec: WeylChannelSpec, omega: KrausChannel, rho) -> np.ndarray:
    """``(Phi (x) Omega)(rho)`` on ``H (x) K`` by two single-site sweeps."""
    dims = (spec.n, omega.in_dim)
    r = apply_on_site(as_matrix(rho), spec.kraus_ops, dims, 0)
    return apply_on_site(r, omega.kraus_ops, dims, 1)


def prop1_bound(p, omega: KrausChannel, xi, base: int | str = 2) -> float:
    """``H(p) + S(Omega(Tr_H |xi><xi|))``."""
    p = prob_vector(p)
    v = _check_bipartite(p, omega, xi)
    reduced = partial_trace(projector(v), p.size, omega.in_dim, keep="B")
    return shannon_entropy(p, base) + von_neumann_entropy(omega(reduced), base)


def _xi_kraus(n: int, k: int) -> np.ndarray:
    """Kraus operators ``U^j V^k / sqrt(n)`` of ``Xi_k``."""
    return np.stack([weyl_operator(n, j, k) for j in range(n)]) / math.sqrt(n)


def upsilon_outputs(p, omega: KrausChannel, xi) -> list[np.ndarray]:
    """The states ``(Xi_k (x) Omega)(|xi><xi|)`` that the c-q channel prepares."""
    p = prob_vector(p)
    v = _check_bipartite(p, omega, xi)
    n, m = p.size, omega.in_dim
    after_omega = apply_on_site(projector(v), omega.kraus_ops, (n, m), 1)
    return [apply_on_site(after_omega, _xi_kraus(n, k), (n, m), 0) for k in range(n)]


def upsilon_apply(p, omega: KrausChannel, xi, rho) -> np.ndarray:
    """``Upsilon(rho) = sum_k <e_k, rho e_k> (Xi_k (x) Omega)(|xi><xi|)``."""
    outs = upsilon_outputs(p, omega, xi)
    r = as_matrix(rho)
    if r.shape != (len(outs), len(outs)):
        raise DimensionError(f"input of shape {r.shape} does not match n={len(outs)}")
    return sum(r[k, k].real * outs[k] for k in range(len(outs)))


def upsilon_channel(p, omega: KrausChannel, xi) -> KrausChannel:
    """``Upsilon`` as a Kraus channel ``H -> H (x) K``: ops ``sqrt(mu) |v><e_k|``."""
    outs = upsilon_outputs(p, omega, xi)
    n = len(outs)
    out_dim = outs[0].shape[0]
    ops = []
    for k, tau in enumerate(outs):
        eig = hermitian_eig(tau)
        for mu, vec in zip(eig.eigenvalues, eig.eigenvectors.T):
            if mu > 1e-15:
                op = np.zeros((out_dim, n), dtype=np.complex128)
                op[:, k] = math.sqrt(mu) * vec
                ops.append(op)
    ops = np.array(ops)
    # renormalize away eigenvalue truncation so completeness holds to roundoff
    for k in range(n):
        col = ops[:, :, k]
        nrm = math.sqrt(float(np.sum(np.abs(col) ** 2)))
        ops[:, :, k] = col / nrm
    return KrausChannel(n, out_dim, ops)


@dataclass(frozen=True)
class Prop1Report:
    samples: int
    min_margin: float
    bound_values: np.ndarray
    entropy_values: np.ndarray
    seeds: np.ndarray
    margins: np.ndarray = field(default_factory=lambda: np.zeros(0))
    dpi_margins: np.ndarray = field(default_factory=lambda: np.zeros(0))
    k_dim: int = 1
    base: str = "2"

    @property
    def min_dpi_margin(self) -> float:
        return float(self.dpi_margins.min()) if self.dpi_margins.size else math.inf


def prop1_sample(p, k_dim: int, sample_seed: int):
    """Draw the reference channel (full Choi rank) and joint pure state for one sample."""
    p = prob_vector(p)
    omega = random_channel(k_dim, k_dim * k_dim, derive_seed(sample_seed, 0))
    xi = random_pure_state(p.size * k_dim, derive_seed(sample_seed, 1))
    return omega, xi


def prop1_verify(
    p, samples: int, k_dim: int, seed: int, base: int | str = 2, strict: bool = True
) -> Prop1Report:
    """Check ``S((Phi (x) Omega)(|xi><xi|)) >= H(p) + S(Omega(Tr_H |xi><xi|))`` on random draws.

    Each sample also evaluates the data-processing step for the c-q
    channel ``Upsilon`` with inputs ``diag(p)`` and ``I/n``. With ``strict``,
    a margin below -1e-8 raises :class:`MarginViolationError` carrying the
    offending seed.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    p = prob_vector(p)
    n = p.size
    spec = qc_spec_from_p(p)
    rho_p = np.diag(p).astype(np.complex128)
    sigma = np.eye(n, dtype=np.complex128) / n
    seeds, bounds, entropies, dpi = [], [], [], []
    for i in range(samples):
        s = derive_seed(seed, i)
        omega, xi = prop1_sample(p, k_dim, s)
        out = apply_product_channel(spec, omega, projector(xi))
        seeds.append(s)
        bounds.append(prop1_bound(p, omega, xi, base))
        entropies.append(von_neumann_entropy(out, base))
        ups = upsilon_channel(p, omega, xi)
        dpi.append(dpi_check(ups, rho_p, sigma, base))
    bounds = np.array(bounds)
    entropies = np.array(entropies)
    margins = entropies - bounds
    report = Prop1Report(
        samples=samples,
        min_margin=float(margins.min()),
        bound_values=bounds,
        entropy_values=entropies,
        seeds=np.array(seeds, dtype=np.int64),
        margins=margins,
        dpi_margins=np.array(dpi),
        k_dim=k_dim,
        base="2" if log_scale(base) != 1.0 else "e",
    )
    if strict and (report.min_margin < -MARGIN_TOL or report.min_dpi_margin < -MARGIN_TOL):
        worst = int(np.argmin(margins))
        raise MarginViolationError(
            f"lower-bound margin {report.min_margin:.3e} below -1e-8",
            {"p": p.tolist(), "k_dim": k_dim, "seed": seed, "sample": worst, "sample_seed": seeds[worst]},
        )
    return report


# -- data processing --------------------------------------------------------


def dpi_check(channel: KrausChannel, rho, sigma, base: int | str = 2) -> float:
    """``S(rho || sigma) - S(N(rho) || N(sigma))``; ``inf`` when ``S(rho || sigma)`` is infinite."""
    r = as_matrix(rho)
    s = as_matrix(sigma)
    if r.shape != s.shape or r.shape[0] != channel.in_dim:
        raise DimensionError(f"states {r.shape}, {s.shape} do not match in_dim={channel.in_dim}")
    before = relative_entropy(r, s, base)
    if math.isinf(before):
        return math.inf
    return before - relative_entropy(channel(r), channel(s), base)


@dataclass(frozen=True)
class DpiSummary:
    samples: int
    min_margin: float
    skipped: int
    margins: np.ndarray
    seeds: np.ndarray


def dpi_batch(samples: int, dim: int, seed: int, base: int | str = 2, strict: bool = True) -> DpiSummary:
    """Data-processing margins on random (channel, rho, full-rank sigma) triples."""
    margins, seeds = [], []
    skipped = 0
    for i in range(samples):
        s = derive_seed(seed, i)
        rng = make_rng(s)
        kraus_count = int(rng.integers(1, dim * dim + 1))
        rank = int(rng.integers(1, dim + 1))
        channel = random_channel(dim, kraus_count, derive_seed(s, 0))
        rho = random_density_matrix(dim, derive_seed(s, 1), rank=rank)
        sigma = random_density_matrix(dim, derive_seed(s, 2))
        m = dpi_check(channel, rho, sigma, base)
        if math.isinf(m):
            skipped += 1
            continue
        margins.append(m)
        seeds.append(s)
    margins = np.array(margins)
    summary = DpiSummary(
        samples=samples,
        min_margin=float(margins.min()) if margins.size else math.inf,
        skipped=skipped,
        margins=margins,
        seeds=np.array(seeds, dtype=np.int64),
    )
    if strict and summary.min_margin < -MARGIN_TOL:
        worst = int(np.argmin(margins))
        raise MarginViolationError(
            f"data-processing margin {summary.min_margin:.3e} below -1e-8",
            {"dim": dim, "seed": seed, "sample_seed": int(seeds[worst])},
        )
    return summary
