"""Weyl channels, deformed q-c channels, minimal output entropy and capacity."""

__version__ = "0.1.0"

from .capacity import (
    AdditivityReport,
    CapacityReport,
    Prop1Report,
    additivity_report,
    capacity_deformed,
    capacity_qc,
    dpi_check,
    prop1_bound,
    prop1_verify,
    upsilon_apply,
)
from .errors import (
    ConvergenceError,
    DimensionError,
    FormulaNotApplicableError,
    MarginViolationError,
    NotADeformationError,
    ResourceGuardError,
    ValidationError,
    WeylcapError,
)
from .linalg import (
    EigenDecomposition,
    KrausChannel,
    hermitian_eig,
    partial_trace,
    random_channel,
    random_pure_state,
    relative_entropy,
    tensor_product,
    von_neumann_entropy,
)
from .majorization import (
    BlockBoundReport,
    block_distribution,
    entropy_lower_bound,
    majorizes,
    prop2_verify,
    sort_descending,
)
from .optimizer import (
    EntropyResult,
    OptimizerConfig,
    min_output_entropy,
    min_output_entropy_closed_form,
    output_entropy,
)
from .weyl import (
    DeformationCertificate,
    WeylChannelSpec,
    apply_tensor_power,
    apply_weyl_channel,
    check_invariance,
    check_weyl_covariance,
    deformation_certificate,
    expectation_E,
    marginals,
    qc_spec_from_p,
    qutrit_example_spec,
    random_deformation,
    weyl_generators,
    weyl_operator,
    xi_k,
)

__all__ = [
    "__version__",
    "AdditivityReport",
    "CapacityReport",
    "Prop1Report",
    "additivity_report",
    "capacity_deformed",
    "capacity_qc",
    "dpi_check",
    "prop1_bound",
    "prop1_verify",
    "upsilon_apply",
    "ConvergenceError",
    "DimensionError",
    "FormulaNotApplicableError",
    "MarginViolationError",
    "NotADeformationError",
    "ResourceGuardError",
    "ValidationError",
    "WeylcapError",
    "EigenDecomposition",
    "KrausChannel",
    "hermitian_eig",
    "partial_trace",
    "random_channel",
    "random_pure_state",
    "relative_entropy",
    "tensor_product",
    "von_neumann_entropy",
    "BlockBoundReport",
    "block_distribution",
    "entropy_lower_bound",
    "majorizes",
    "prop2_verify",
    "sort_descending",
    "EntropyResult",
    "OptimizerConfig",
    "min_output_entropy",
    "min_output_entropy_closed_form",
    "output_entropy",
    "DeformationCertificate",
    "WeylChannelSpec",
    "apply_tensor_power",
    "apply_weyl_channel",
    "check_invariance",
    "check_weyl_covariance",
    "deformation_certificate",
    "expectation_E",
    "marginals",
    "qc_spec_from_p",
    "qutrit_example_spec",
    "random_deformation",
    "weyl_generators",
    "weyl_operator",
    "xi_k",
]
