"""Realizability of nearest/farthest neighbour maps: checks, metric witnesses and Euclidean embeddings."""

__version__ = "0.1.0"
