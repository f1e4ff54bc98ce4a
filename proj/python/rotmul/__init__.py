from ._core import (
    InputError,
    NumericalError,
    admissible,
    belt,
    classify,
    conditions,
    d_theta_point,
    fit_rate,
    komornik,
    max_sweep_theta,
    operators,
    rellich,
    simulate,
    spectrum,
    sweep,
)

__all__ = [
    "InputError",
    "NumericalError",
    "admissible",
    "belt",
    "classify",
    "conditions",
    "d_theta_point",
    "fit_rate",
    "komornik",
    "max_sweep_theta",
    "operators",
    "rellich",
    "simulate",
    "spectrum",
    "sweep",
]
