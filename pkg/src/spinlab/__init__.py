"""Exact computations of prime spin densities for cyclic totally real fields K(n, ell)."""

from spinlab.field_core import CyclicField, FieldParams, build_field
from spinlab.residue_rings import Ring8, field_ring, synthetic_ring
from spinlab.starlight import DensityReport, StarTable, density_report, starlight_invariant

__all__ = [
    "CyclicField",
    "DensityReport",
    "FieldParams",
    "Ring8",
    "StarTable",
    "build_field",
    "density_report",
    "field_ring",
    "starlight_invariant",
    "synthetic_ring",
]

__version__ = "0.1.0"
