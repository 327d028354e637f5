"""Spectrogram inversion for source separation with alternating projections."""

from ._core import (
    InvalidArgument,
    IoError,
    StftConfig,
    algorithm_names,
    degrade_magnitudes,
    g_operator,
    inconsistency,
    init_amplitude_mask,
    istft,
    magnitude_mismatch,
    make_mixture,
    mixing_error,
    p_cons,
    p_mag,
    p_mix,
    read_wav,
    run,
    sdr,
    spectral_energy,
    stft,
    weights_magnitude_ratio,
    weights_uniform,
    write_wav,
)

__all__ = [
    "InvalidArgument",
    "IoError",
    "StftConfig",
    "algorithm_names",
    "degrade_magnitudes",
    "g_operator",
    "inconsistency",
    "init_amplitude_mask",
    "istft",
    "magnitude_mismatch",
    "make_mixture",
    "mixing_error",
    "p_cons",
    "p_mag",
    "p_mix",
    "read_wav",
    "run",
    "sdr",
    "spectral_energy",
    "stft",
    "weights_magnitude_ratio",
    "weights_uniform",
    "write_wav",
]
