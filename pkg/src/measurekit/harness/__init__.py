"""Monte Carlo sampling, config-driven pipelines and the command line."""

from .runner import (
    CheckFailure,
    ConfigParseError,
    ExperimentConfig,
    Report,
    ValidationError,
    load_config,
    parse_config,
    run_config,
)
from .sampling import (
    SamplingConfig,
    TrialRecord,
    compare,
    monte_carlo_oracle,
    sample_collapsed,
    sample_experiment,
    sample_instrument,
    sample_sequential,
)
