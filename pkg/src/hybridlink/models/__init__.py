"""Models module for Pydantic schemas."""

from hybridlink.models.schemas import (
    ComplexMatrix4,
    DephasingModel,
    DressedBasis,
    ElementProducts,
    Geometry,
    GroundState,
    HybridParams,
    InverseElements,
    MoleculePosition,
    ProtocolKind,
    ProtocolResult,
    QubitState,
    RateSet,
    ScatterCoeff,
    ScatteringPath,
    StarkCoupling,
)

__all__ = [
    "ComplexMatrix4",
    "DephasingModel",
    "DressedBasis",
    "ElementProducts",
    "Geometry",
    "GroundState",
    "HybridParams",
    "InverseElements",
    "MoleculePosition",
    "ProtocolKind",
    "ProtocolResult",
    "QubitState",
    "RateSet",
    "ScatterCoeff",
    "ScatteringPath",
    "StarkCoupling",
]
