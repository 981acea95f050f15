"""Desk-scale workbench for MSO model checking on labeled graphs, logic
interpretations between structures, grid-like graph encodings, and the
alternating-colouring problem family, all verifiable against brute-force
oracles."""

from .errors import CapacityError, MsolabError

__version__ = "0.1.0"

__all__ = ["CapacityError", "MsolabError", "__version__"]
