"""Topological invariants of Bloch bundles with a reality constraint."""

from __future__ import annotations

__version__ = "0.1.0"
