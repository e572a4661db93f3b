"""Concurrent-learning disturbance observer for systems without persistent excitation."""
from .numerics import DiagonalGain, diag_exp, loewner_gt, min_eigenvalue
from .history_stack import HistorySample, HistoryStack, stack_depth
from .observers import (
    DivergenceError, InfeasibleBoundsError, ObserverConfig, ObserverState,
    continuous_step, conventional_step, discrete_step, new_observer, stack_bounds,
    theorem1_condition, zeta_continuous, zeta_discrete,
)
from .systems import (
    RegularSystem, SISModel, build_canonical_abc, population_step, sis_gain,
    sis_regular, sis_step, sis_update, sis_vector_field,
)
from .control import ControlConfig, compensate

__version__ = "0.1.0"
