"""Multidifferential operators, star products and their exact checkers."""
from .ops import (BiDiffOp, DiffOp, MultiDiffOp, QuadDiffOp, TriDiffOp, apply_bidiffop,
                  compose_series, exp_series, exp_symbol_series, inverse_series, op_class)
from .star import (Chart, ChartError, EquivalenceTransform, Ordering, StarProduct,
                   apply_equivalence, as_series, build_exponential_star, conjugate_ops,
                   darboux_poisson, exponential_star, hochschild_coboundary, opposite_star,
                   pointwise_star, replace_order, star_apply, tensor_star)
from .checks import (MorphismSeries, NonConstantForm, RepresentationSeries, Restriction,
                     TwoForm, associator_ops, check_bimodule, check_morphism,
                     check_representation, check_star_axioms, deligne_order0)
