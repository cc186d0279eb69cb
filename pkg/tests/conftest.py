"""Keeps the tests directory importable (shared oracles live here)."""
