"""Agent-based cultural evolution with self-regulated invention rates."""

__version__ = "0.1.0"
