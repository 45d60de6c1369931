"""Single-machine scheduling under discrete scenarios with the OWA criterion."""

from .errors import (
    BudgetExceededError,
    FormatError,
    InfeasibleScheduleError,
    InvalidInstanceError,
    LPError,
    ObjectiveMismatchError,
    OwaSchedError,
    SchemaError,
    UnsupportedError,
)
from .model import (
    Instance,
    Objective,
    Schedule,
    SolveReport,
    check_schedule,
    completion_times,
    cost,
    cost_vector,
    invert_instance,
    invert_schedule,
    make_instance,
    parse_instance,
    parse_schedule,
    serialize_instance,
    serialize_schedule,
    validate_instance,
)
from .owa import OwaWeights, deviation_weights, owa_value, preset, theta_k

__all__ = [
    "BudgetExceededError", "FormatError", "InfeasibleScheduleError", "InvalidInstanceError",
    "LPError", "ObjectiveMismatchError", "OwaSchedError", "SchemaError", "UnsupportedError",
    "Instance", "Objective", "Schedule", "SolveReport", "check_schedule", "completion_times",
    "cost", "cost_vector", "invert_instance", "invert_schedule", "make_instance",
    "parse_instance", "parse_schedule", "serialize_instance", "serialize_schedule",
    "validate_instance", "OwaWeights", "deviation_weights", "owa_value", "preset", "theta_k",
]
__version__ = "0.1.0"
