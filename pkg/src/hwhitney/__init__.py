"""Whitney-type C1 extension machinery for horizontal curves in H^n."""

from .heisenberg import (
    HPoint,
    PlanarPoint,
    SampledCurve,
    contact_residual,
    dilate,
    group_inv,
    group_mul,
    horizontal_lift,
    pansu_quotient,
    symplectic,
)
from .jets import (
    CompactSet,
    Gap,
    JetPiece,
    ModulusReport,
    Tolerances,
    ValidationVerdict,
    WhitneyJet,
    area_modulus,
    big_m,
    epsilon_sequence,
    gaps,
    horizontality_defect,
    restrict_polynomial_curve,
    validate,
    whitney_modulus,
)
from .gapfill import (
    ArcPiece,
    Branch,
    EnvelopeReport,
    GapFrame,
    LemmaParams,
    PolynomialPiece,
    branch_test,
    build_eta,
    default_c_prime,
    envelope_check,
    eta_circle,
    eta_polynomial,
    gap_frame,
    lemma_params,
    relocate,
)
from .extension import (
    ExtendedCurve,
    ExtensionRefused,
    VerificationReport,
    extend,
    sample,
    verify,
)
from .counterexample import blowup_ratio, build as build_counterexample, whitney_bound
from .luzin import LuzinResult, PiecewiseCurve, approximate

__version__ = "0.1.0"
