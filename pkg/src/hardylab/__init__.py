"""Hardy-type nonlocality for entangled multipartite pure states.

Build the x/y measurement bases from a Schmidt decomposition, check the five
vanishing probabilities and the nonvanishing one, and certify that no local
hidden-variable model reproduces them.
"""

__version__ = "0.1.0"

from .born import (
    HardyReport,
    OutcomeCounts,
    hardy_closed_form,
    hardy_report,
    joint_probability,
    sample_outcomes,
    scan_hardy,
)
from .construct import (
    HardyBases,
    HardyUnitaries,
    ObservableFamily,
    build_bases,
    build_observables,
    build_unitaries,
    equivalent_forms_residual,
)
from .errors import (
    DimensionCapExceeded,
    EnumerationCapExceeded,
    HardyError,
    IneligibleState,
    NoEligibleComponent,
    ScenarioError,
    StateFormatError,
)
from .lhv import (
    ContradictionCertificate,
    DeterministicStrategy,
    HiddenVariableModel,
    LhvFeasibilityResult,
    Scenario,
    contradiction_certificate,
    enumerate_strategies,
    lhv_lp_feasibility,
    verify_certificate,
)
from .multiparty import (
    PeelingPlan,
    TripartiteDecomposition,
    build_T_observable,
    npartite_report,
    tripartite_contradiction,
    tripartite_decompose,
    tripartite_report,
)
from .state import (
    Bipartition,
    EligibilityClass,
    MultipartiteState,
    SchmidtDecomposition,
    classify,
    load_state,
    parse_state,
    schmidt_decompose,
)
