"""Desk-scale numerics for Lorentz sequence spaces, nuclear
representations, finite-rank approximation, and trace-formula audits on
finite l_p spaces."""

from .sequences import (
    DecayFamily,
    FactorizationCertificate,
    FiniteSequence,
    LorentzIndex,
    ProductLawReport,
    decreasing_rearrangement,
    factor_l1_lorentz,
    holder_product_bound,
    lorentz_quasi_norm,
    product_law_check,
    sharpness_witness,
)
from .spaces import (
    AmbientSpace,
    NormBracket,
    OperatorMatrix,
    Vector,
    dual_exponent,
    operator_norm,
    projection_onto_span,
    vector_norm,
)
from .nuclear import (
    NuclearIndex,
    Representation,
    build_from_factorization,
    improve_representation,
    induced_matrix,
    nuclear_trace,
    quasi_norm,
    rebalance,
    split_representation,
    trace_perturbation_bound,
    weak_norm,
    weak_norm_bracket,
)
from .spectral import (
    EigenSystem,
    NilpotentReport,
    ProbeReport,
    SimilarityReport,
    TraceAuditReport,
    audit_trace_formula,
    characteristic_roots,
    eigenvalue_type_probe,
    eigenvalues,
    match_spectra,
    nilpotent_check,
    similarity_spectrum_check,
    spectral_sum,
    trace_formula_exponent,
)
from .approximation import (
    ApproximationCertificate,
    build_approximant,
    projection_growth_exponent,
    select_rank,
)
from .experiments import ExperimentConfig, RunReport, run

__version__ = "0.1.0"

__all__ = [
    "AmbientSpace",
    "ApproximationCertificate",
    "DecayFamily",
    "EigenSystem",
    "ExperimentConfig",
    "FactorizationCertificate",
    "FiniteSequence",
    "LorentzIndex",
    "NilpotentReport",
    "NormBracket",
    "NuclearIndex",
    "OperatorMatrix",
    "ProbeReport",
    "ProductLawReport",
    "Representation",
    "RunReport",
    "SimilarityReport",
    "TraceAuditReport",
    "Vector",
    "audit_trace_formula",
    "build_approximant",
    "build_from_factorization",
    "characteristic_roots",
    "decreasing_rearrangement",
    "dual_exponent",
    "eigenvalue_type_probe",
    "eigenvalues",
    "factor_l1_lorentz",
    "holder_product_bound",
    "improve_representation",
    "induced_matrix",
    "lorentz_quasi_norm",
    "match_spectra",
    "nilpotent_check",
    "nuclear_trace",
    "operator_norm",
    "product_law_check",
    "projection_growth_exponent",
    "projection_onto_span",
    "quasi_norm",
    "rebalance",
    "run",
    "select_rank",
    "sharpness_witness",
    "similarity_spectrum_check",
    "spectral_sum",
    "split_representation",
    "trace_formula_exponent",
    "trace_perturbation_bound",
    "vector_norm",
    "weak_norm",
    "weak_norm_bracket",
]
