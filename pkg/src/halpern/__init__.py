"""Halpern-type anchored fixed-point iterations with averaged-type regularization."""
from ._backend import BACKEND
from .operators import (AveragedOperator, Operator, OperatorClass, averaged, blend,
                        identity_operator, make_affine_operator, make_projection_operator,
                        make_rotation_operator)
from .schedules import (Constant, Harmonic, InversePower, OneMinusInversePower, Power,
                        validate_case)
from .sets import Ball, Box, Halfspace, WholeSpace
from .solvers import (SolverConfig, browder_path, halpern_classic, halpern_segmented,
                      halpern_theta, main_scheme, moudafi_scheme, predicted_limit)

__version__ = "0.1.0"
