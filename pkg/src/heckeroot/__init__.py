"""Exact root numbers of anticyclotomic twists and their rank consequences."""

from .qmodz import QmodZ, complexify
from .quadring import (Kind, PrecisionError, QuadraticLocalAlgebra, RingElt,
                       base_algebra, default_discriminant, enumerate_units,
                       fractional_trace, legendre, make_algebra, unit_count)
from .chargroup import (AdditiveCharacter, Constraint, UnitCharacter,
                        UnitGroupBasis, additive_eval, all_characters,
                        canonical_additive, char_eval, character_at_level,
                        exact_conductor, multiply_characters,
                        trivial_character, unit_group_basis)
from .localcft import (EigenspaceStructure, TowerCharacter,
                       conductor_of_level, decomposition_group_order,
                       eigenspace_structure, tower_character)
from .rootnum import (GlobalRootNumber, RootNumberValue, TwistContext,
                      TwistResult, compatible_uniformizer_values,
                      constrained_characters, global_twisted_root_number,
                      kappa_character, l_class, relative_root_inert_sign,
                      relative_root_oracle, relative_root_ramified_closed,
                      relative_root_split, root_number_oracle, twist_quotient)
from .predictor import (DistributionSeries, EpsilonSequence,
                        distribution_series, epsilon_sequence,
                        euler_phi_ppower, expected_limits,
                        inert_mass_formulas, mw_finitely_generated,
                        rank_sequence, vanishing_order_parity)

__version__ = "0.1.0"
