"""Exact scalars, coefficient functions and truncated series."""
from .coeff import (CoeffFn, Flavor, FlavorError, Universe, UniverseError, coeff_derive,
                    coeff_mul, iter_monomials)
from .exppoly import ExpPoly
from .scalar import I, ONE, ZERO, S, Scalar, format_scalar, parse_scalar
from .series import NuSeries, OrderMismatch, scalar_series, scalar_series_inverse, series_mul_truncate
from .text import (HEADER, ParseError, dump_coeff, dump_series, format_coeff, format_exppoly,
                   format_series, parse_coeff, parse_exppoly, parse_series)

__all__ = [
    "CoeffFn", "ExpPoly", "Flavor", "FlavorError", "HEADER", "I", "NuSeries", "ONE",
    "OrderMismatch", "ParseError", "S", "Scalar", "Universe", "UniverseError", "ZERO",
    "coeff_derive", "coeff_mul", "dump_coeff", "dump_series", "format_coeff", "format_exppoly",
    "format_scalar", "format_series", "iter_monomials", "parse_coeff", "parse_exppoly",
    "parse_scalar", "parse_series", "scalar_series", "scalar_series_inverse",
    "series_mul_truncate",
]
