"""Wideband THz hybrid beamforming: beam-split analysis, angular-based hybrid
beamforming (AB-HBF), baseline precoders and a seeded experiment harness."""

__version__ = "0.1.0"
