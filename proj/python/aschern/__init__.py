"""Flat-bundle and Mishchenko projections over sampled compact spaces,
tracial Alexander-Spanier Chern characters, and index identities."""

from ._aschern import (
    AschernError,
    ConfigError,
    bott_chern_pairing,
    contour_spectral_projection,
    cover_lemma_violations,
    group_table,
    idempotent_to_projection,
    normalized_trace,
    regular_representation,
    run_task,
)

__all__ = [
    "AschernError",
    "ConfigError",
    "bott_chern_pairing",
    "contour_spectral_projection",
    "cover_lemma_violations",
    "group_table",
    "idempotent_to_projection",
    "normalized_trace",
    "regular_representation",
    "run_task",
]
