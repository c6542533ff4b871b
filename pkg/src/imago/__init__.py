"""Selection-function conditionals, imaged belief functions and λ-updates.

Events of an ``n``-atom Boolean algebra are ``int`` bitmasks (bit ``i`` is
atom ``i``); probabilities are exact :class:`fractions.Fraction` values.
"""

from .algebra import Algebra
from .belief import (
    MassDistribution,
    ProbabilityDist,
    imaged_belief,
    imaged_mass,
    is_probability,
    prob,
    prob_conditional,
    proposition1_report,
)
from .conditional import box, check_fact1, conditional, diamond
from .errors import (
    BudgetExceededError,
    ImagoError,
    InvalidEventError,
    ModelFileError,
    PreconditionError,
    RetryCapExceededError,
    UnsatisfiableConstraintsError,
)
from .modelfile import Model
from .selection import (
    ConditionalClass,
    FrameProperty,
    SelectionFunction,
    check_property,
    classify,
    enumerate_selection_functions,
    sample_selection_function,
)
from .update import (
    DistributionFunction,
    LambdaKind,
    build_lambda,
    fact7_check,
    theorem1_check,
    updated_distribution,
    updated_prob,
    validate_lambda,
)
from .verifier import Campaign, Report, find_theorem1_counterexample, run_campaign

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
