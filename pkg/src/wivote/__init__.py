"""Verifiable e-voting over a transparent pairing group: weak and fully
verifiable schemes, a threshold multi-authority extension, pluggable
witness-hiding proof backends, a hash-chained bulletin board CLI, and an
executable security-experiment harness."""

__version__ = "0.1.0"
