"""Euclidean constructions: simplices, spherical caps, size bounds and planar farthest maps."""
