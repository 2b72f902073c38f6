"""Coisotropic charts: ideal decisions, adaptedness, obstructions, reduction, idealizers."""
from .adapted import (NotAdapted, NotProjectable, Sidedness, adapted_through,
                      canonical_representation, check_adapted, check_ideal_sidedness,
                      check_projectable, default_projectable_degree, normalize_representation,
                      projectable_witnesses, reduced_product, sidedness_report)
from .chart import CoisotropicChart, NotInIdeal, ideal_member, koszul_split
from .idealizer import IdealizerResult, commutant_action, idealizer_commutant, membership_check
from .obstruction import (AdaptResult, NotClosed, NotExact, ObstructionCocycle, VerticalForm,
                          adapt, check_lob_identities, obstruction_cocycle, symmetric_correction,
                          vertical_primitive)
