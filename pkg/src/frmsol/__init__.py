"""Condensate stability under a quasi-1D optical lattice with rapidly
modulated attraction: full axisymmetric field propagation, the reduced
width equations, analytic existence limits, and stability maps."""

from .core import (Field, Grid, Observables, Verdict, make_grid, norm,
                   observables, read_snapshot, write_snapshot)
from .schedule import ConstantDrive, EndCap, FrmStage, Schedule, potential_at
from .variational import (VaParams, VaState, VaTrajectory, epsilon_threshold,
                          g0_min, initial_state, solve_v0, va_classify,
                          va_integrate, va_rhs, w_bar_prediction)
from .gpe import (RunRecord, SolverConfig, Stepper, energy, evolve,
                  prepare_initial_state, step, write_observables_csv)
from .analysis import (IsolationReport, StabilityCriteria,
                       cell_isolation_experiment, classify_run)
from .sweep import (Axis, Link, StabilityMap, SweepSpec, parse_links,
                    run_sweep, write_map_csv)
from .config import Config, ConfigError, default_config, parse_config

__version__ = "0.1.0"
