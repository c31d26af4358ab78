"""shadowlat: computational shadow theory of modular and unimodular lattices."""

__version__ = "0.1.0"
