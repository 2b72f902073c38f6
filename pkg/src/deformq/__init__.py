"""Exact symbolic deformation quantization on flat charts."""
__version__ = "0.1.0"
