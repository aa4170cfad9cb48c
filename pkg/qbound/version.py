"""Version information for the qbound CLI."""

__version__ = "0.1.0"
