"""Exact windows of A-infinity, Hochschild and cyclic complexes over truncated Novikov rings."""

from .novikov import NovikovScalar, parse_scalar, format_scalar
from .words import SignedVector
from .ainfinity import AlgebraSpec, BimoduleSpec, HomomorphismSpec, SpecError
from .window_homology import Window, homology, bar_complex
from .linfinity import LInfinitySpec, LModuleSpec, symmetrize_algebra, lmodule_from_bimodule
from .ce_dual import DualSeries, obstruction_extract, vanishing_certificate
from .examples import build as build_example, load, parse_spec

__all__ = ["NovikovScalar", "parse_scalar", "format_scalar", "SignedVector", "AlgebraSpec",
           "BimoduleSpec", "HomomorphismSpec", "SpecError", "Window", "homology", "bar_complex",
           "LInfinitySpec", "LModuleSpec", "symmetrize_algebra", "lmodule_from_bimodule",
           "DualSeries", "obstruction_extract", "vanishing_certificate", "build_example", "load",
           "parse_spec"]
