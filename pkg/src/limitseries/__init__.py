"""Exact computations with limit linear series on nodal curves.

Twist calculus on admissible multidegrees, section spaces on an explicit
rational-component curve model, two provably equivalent membership tests,
and linked determinantal machinery, all over the rationals or prime fields.
"""

from .errors import (DegenerateInstanceError, GenerationBudgetError, GraphError,
                     LimitSeriesError, ModelConsistencyError, ReachabilityError)
from .fields import PrimeField, QQ, RationalField, field_from_spec
from .graphs import (ChainStructure, CollapsedGraph, DualGraph, Subdivision,
                     collapse, is_multitree, subdivide, validate)
from .multidegree import (ConcentratedTuple, Multidegree, TwistMultiset,
                          apply_multiset, concentrate, derive_tuple,
                          enumerate_bar_G, is_concentrated,
                          laplacian_kernel_check, restrict_multidegree,
                          same_endpoint, t_ev, twist_pair,
                          validate_concentrated_tuple)
from .curves import (CurveInstance, DivisorSeq, SectionSpace, critical_indices,
                     divisor_sequence, jet_map, restrict_to_component,
                     section_space, subspace_vanishing, twist_map,
                     vanishing_orders)
from .series import (LLSCandidate, MembershipVerdict, brill_noether_number,
                     check_indep_of_wv, eh_condition_I, eh_condition_II,
                     is_lls_eh, is_lls_kernel, kernel_dimension_at,
                     multivanishing_sequence, order_of_vanishing,
                     pairwise_kernel_check)
from .linked import (FlagPair, LinkedChain, complete_flags, curve_to_chain,
                     gen_random_chain, linked_det_membership, validate_s_linked)

__version__ = "0.1.0"
