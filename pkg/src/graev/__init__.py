"""Graev extensions of pseudometrics to free Boolean groups, computed exactly."""

__version__ = "0.1.0"

from .boolean_group import ZERO, GroupElement, Representation, add, evaluate_representation, in_Bn, sum_points, word_length
from .errors import (
    BallConditionError, CapacityError, GraevError, GuardError, InvalidSpaceError, NotCauchyError, StructuralError,
)
from .graev_metric import Matching, NormResult, graev_dist, graev_norm, oracle_norm, reduce_representation
from .ground_space import GroundSpace, PseudometricSequence, combine_sup, distance, validate_space
from .neighborhood import WdWitness, ball_membership, wd_membership, wd_witness_from_ball
