"""Acceptance sweeps over the library."""
