"""Ceteris paribus logic workbench: PECP, STIT and CL-PC with translations,
an S5 satisfiability kernel and brute-force oracles.
"""

from paribus.parsing import ParseError, parse, to_text
from paribus.syntax import Formula

__all__ = ["Formula", "ParseError", "parse", "to_text"]
__version__ = "0.1.0"
