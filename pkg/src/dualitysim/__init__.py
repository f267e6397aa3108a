"""Tunable-beamsplitter interferometer simulation and entropic-duality verification.

The library models a two-path fiber interferometer whose recombining splitter
is a Sagnac loop tunable between mirror and balanced operation, simulates its
photon-counting statistics for weak coherent pulses, and verifies that the
min/max-entropy uncertainty bound and the visibility/distinguishability
trade-off are two faces of the same constraint, both in closed form and on
sampled count data.
"""

from .entropy import (
    DualityQuantities,
    GuessingInput,
    duality_from_v_d,
    eur_check,
    h_max,
    h_max_binary,
    h_max_from_visibility,
    h_max_guessing_bound,
    h_min,
    h_min_binary,
    h_min_from_distinguishability,
    visibility_from_guessing,
    distinguishability_from_guessing,
    wpdr_check,
)
from .errors import ConfigError, ContractViolation, EstimationError
from .estimators import (
    DualityReport,
    EquivalenceReport,
    EstimateWithError,
    FlatnessCheck,
    FringeFit,
    FringeScan,
    RouteReport,
    duality_report,
    equivalence_report,
    estimate_distinguishability,
    estimate_visibility,
    eur_definition_route,
    eur_formula_route,
    fit_fringe,
    flatness_check,
)
from .montecarlo import (
    DetectorConfig,
    RunPlan,
    SourceConfig,
    SwitchTrace,
    cell_rng,
    click_probabilities,
    effective_mean_photons,
    expected_counts,
    multi_photon_fraction,
    run_dynamic_switch,
    run_sweep,
    sample_photon_numbers,
    simulate_point,
)
from .optics import (
    BLOCK_NONE,
    BLOCK_PATH0,
    BLOCK_PATH1,
    BLOCKS,
    CircuitConfig,
    DetectionProbs,
    circuit_output_state,
    detection_probs_blocked,
    detection_probs_closed_form,
    detector_ports,
    fringe_extrema,
    path_blocker,
    raw_detection_probs,
    sagnac_effective,
    standard_elements,
    state_detection_probs,
)
from .states import (
    OpticalElement,
    PathState,
    ProbDist,
    apply_element,
    born_probabilities,
    compose,
    identity_element,
)

__version__ = "0.1.0"
