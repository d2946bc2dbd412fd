"""Polynomial entropy of Brouwer homeomorphisms through orbit codings."""

from .coding import (
    CodingWord,
    GrowthSeries,
    Member,
    SamplingPlan,
    SetFamily,
    code_orbit,
    count_exact,
    count_plateau,
    count_sample,
    count_upper_bound,
    linear_family,
    max_hits,
    standard_family,
)
from .entropy import (
    ExponentEstimate,
    GrowthExponentRegressor,
    PolynomialEntropyEstimator,
    fit_exponent,
    local_entropy_series,
)
from .glued_plane import (
    ChartPoint,
    GluedSystem,
    GluingSpec,
    Region,
    build_gluing,
    build_linear_example,
    build_translation,
    phi_eval,
    to_chart,
)
from .oracles import DiscreteSystem, LabeledOrbit, enumerate_words, random_system, separated_count
from .singularity import SingularityVerdict, check_mutual_singularity, transition_set

__version__ = "0.1.0"
