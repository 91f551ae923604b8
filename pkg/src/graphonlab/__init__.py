"""Graphon laboratory: W-random graphs, homomorphism densities and their fluctuations."""

from ._accel import backend
from .graphon import Graphon, affine, constant, from_expression, parse_graphon, product
from .graphs import LabeledMotif, MotifFamily, SimpleGraph, named_graph
from .quadrature import QuadratureSpec
from .sampler import SampledGraph, sample

__version__ = "0.1.0"

__all__ = [
    "Graphon",
    "LabeledMotif",
    "MotifFamily",
    "QuadratureSpec",
    "SampledGraph",
    "SimpleGraph",
    "affine",
    "backend",
    "constant",
    "from_expression",
    "named_graph",
    "parse_graphon",
    "product",
    "sample",
]
