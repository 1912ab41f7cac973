"""Shared helpers: paths, file formats, runtime configuration and errors."""
