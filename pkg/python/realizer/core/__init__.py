"""Functional graphs, realizability checks, metric witnesses and certification."""
