"""Data models for nlsground."""

from nlsground.core.models.schemas import (
    BestConstant,
    BifurcationReport,
    BoxLimitCase,
    BoxSigmaLimit,
    BoxTfEstimate,
    BoxWeakEstimate,
    Classification,
    ExistenceVerdict,
    FlowConfig,
    GaussianProfile,
    Grid,
    GroundStateResult,
    HarmonicWeakEstimate,
    LayerProfile,
    MatchedEstimate,
    Params,
    PlateauEstimate,
    PotentialKind,
    PotentialSpec,
    ShootingSolution,
    TfEstimate,
    Verdict,
    WaveFunction,
)

__all__ = [
    "BestConstant",
    "BifurcationReport",
    "BoxLimitCase",
    "BoxSigmaLimit",
    "BoxTfEstimate",
    "BoxWeakEstimate",
    "Classification",
    "ExistenceVerdict",
    "FlowConfig",
    "GaussianProfile",
    "Grid",
    "GroundStateResult",
    "HarmonicWeakEstimate",
    "LayerProfile",
    "MatchedEstimate",
    "Params",
    "PlateauEstimate",
    "PotentialKind",
    "PotentialSpec",
    "ShootingSolution",
    "TfEstimate",
    "Verdict",
    "WaveFunction",
]
