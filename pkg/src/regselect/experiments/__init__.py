"""Synthetic data models, Monte Carlo risk estimation, study drivers, and the CLI."""

from .models import (
    SparseDeblur,
    SparseDenoise,
    SpectralSource,
    TvImages,
    gen_sparse_dataset,
    gen_spectral_dataset,
    sample_unit_ball,
)
from .risk import RiskReport, estimate_expected_risk, rng_from
from .idx import load_idx_images

__all__ = [
    "SparseDeblur",
    "SparseDenoise",
    "SpectralSource",
    "TvImages",
    "gen_sparse_dataset",
    "gen_spectral_dataset",
    "sample_unit_ball",
    "RiskReport",
    "estimate_expected_risk",
    "rng_from",
    "load_idx_images",
]
