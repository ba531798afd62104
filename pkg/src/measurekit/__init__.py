"""Generalized observables, information-state instruments and their quantum case
on finite information spaces."""

from .errors import *  # noqa: F401,F403
from .instruments import (
    ExtendedObservable,
    classical_readout,
    compose,
    identity_readout,
    instrument_apply,
    is_non_perturbing,
    outcome_marginal,
    posterior_state,
    product_extended,
    system_marginal,
)
from .mean_states import (
    ConvexRelation,
    EmbeddedSpace,
    MeanState,
    check_prelinear,
    mean_instrument_apply,
    mean_state,
    posterior_mean,
    relation,
    statistical_map,
)
from .measure_core import (
    Event,
    FiniteMeasure,
    FiniteSpace,
    InformationState,
    dirac,
    measure_of,
    mix,
    normalize,
    product_space,
    space,
    state,
)
from .observables import (
    ExperimentOracle,
    GeneralizedObservable,
    image_observable,
    induce_state,
    is_image,
    is_trivial,
    marginal,
    observable_from_experiment,
    outcome_distribution,
    product,
    pull_back,
    push_forward,
    trivial_observable,
    value,
)

__version__ = "0.1.0"
