"""Two-way relay wireless network coding laboratory."""

__version__ = "0.1.0"
