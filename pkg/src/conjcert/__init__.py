"""Exact cohomology-ring models of algebraic varieties, their Galois
conjugates, and checkable certificates that two conjugates differ."""

from .algebra import FieldSpec, GradedAlgebraModel, k_rational_dim, tensor
from .field import Cyclotomic, FieldAutomorphism, RationalFunction, zeta
from .modelio import dumps_model, load_model, loads_model, save_model
from .witness import Certificate, certify, verify_certificate

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "Cyclotomic",
    "FieldAutomorphism",
    "FieldSpec",
    "GradedAlgebraModel",
    "RationalFunction",
    "certify",
    "dumps_model",
    "k_rational_dim",
    "load_model",
    "loads_model",
    "save_model",
    "tensor",
    "verify_certificate",
    "zeta",
]
