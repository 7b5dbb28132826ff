"""Exact half-integral maximum multiflow for node-capacitated networks.

Solves the maximum node-capacitated multiflow problem in exact integer
arithmetic, returning a half-integral maximum multiflow, a half-integral
optimal dual with a zero duality-gap certificate, and a 2-approximate node
multiway cut obtained by rounding the dual.
"""

from .apps import MultiwayCut, round_cut, verify_cut
from .descent import SolveResult, solve
from .extract import CertificateReport, HalfIntegralMultiflow, certify
from .instance import (MultiflowInstance, TreeEmbedding, parse_instance,
                       serialize_instance, star_embedding)

__all__ = [
    "CertificateReport",
    "HalfIntegralMultiflow",
    "MultiflowInstance",
    "MultiwayCut",
    "SolveResult",
    "TreeEmbedding",
    "certify",
    "parse_instance",
    "round_cut",
    "serialize_instance",
    "solve",
    "star_embedding",
    "verify_cut",
]

__version__ = "0.1.0"
