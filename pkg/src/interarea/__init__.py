"""Inter-area oscillation analysis of multi-area power networks.

The package builds linearized state-space models of lossless multi-area
networks (:mod:`interarea.network`, :mod:`interarea.statespace`), computes
their modes with a self-contained eigensolver (:mod:`interarea.eigensolver`),
identifies interconnection modes (:mod:`interarea.modal`) and simulates
interaction-variable dynamics (:mod:`interarea.timesim`).
"""

from .errors import (AmbiguousMatch, DefectiveMode, DimensionMismatch, DuplicateId, InterAreaError, IoError,
                     IslandedAreaInterior, NoConvergence, NumericalError, ParseError, SchemaError,
                     SingularReduction, StepTooLarge, UnknownArea, UnknownBus, UnknownParameterPath,
                     ValidationError)
from .modal import (ModeClassification, ModeMatch, ModeSet, ParticipationMatrix, classify_modes,
                    dominant_states, eigen_decompose, identify_interconnection_mode, participation_factors)
from .network import (FLAT_START, Bus, GeneratorParams, Line, NetworkModel, OperatingPoint, ReducedNetwork,
                      build_network, connected_components, disconnect_ties, jacobian, reduce, reduce_network)
from .scenario import Scenario, builtin_names, load_builtin, parse_scenario, scenario_to_json
from .statespace import StateLabel, StateSpaceModel, assemble_full, assemble_reduced, build_model
from .timesim import (AreaSeries, InputSignal, Trajectory, interaction_variables, resonance_experiment,
                      simulate, sweep, tie_flow_deviations, zero_crossing_frequency)

__version__ = "0.1.0"
