"""Worked examples: the cotangent bundle of the 2-torus and the CP(n) radial calculus."""
from .cpn import (CapacityError, RadialFn, apply_symbol, cpn_change_of_D, cpn_check_homomorphism,
                  cpn_radial_star, cpn_report, cpn_SD, cpn_SD_inverse, symbol_SD,
                  symbol_SD_inverse)
from .torus import (displayed_reduced, torus_chart, torus_equivalence, torus_products,
                    torus_report)

__all__ = ["displayed_reduced", "torus_chart", "torus_equivalence", "torus_products",
           "torus_report", "CapacityError", "RadialFn", "apply_symbol", "cpn_change_of_D",
           "cpn_check_homomorphism", "cpn_radial_star", "cpn_report", "cpn_SD", "cpn_SD_inverse",
           "symbol_SD", "symbol_SD_inverse"]
