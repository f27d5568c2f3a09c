"""Keeps the tests directory importable so suites can share the _oracles helpers."""
