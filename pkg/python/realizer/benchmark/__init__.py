"""Search benchmarks."""
