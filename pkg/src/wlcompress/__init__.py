"""k-WL refinement, CFI graphs and their compressions, grid separators and pursuit games."""

__version__ = "0.1.0"
