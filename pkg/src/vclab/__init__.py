"""Exact free-group workbench: word arithmetic, decision procedures,
the equation family x^n y^m = a^n b^m, recursive test words,
quasimorphisms, finite-sample hyperbolic geometry, finite-group
counterexample suites, and integer linear algebra for presentations."""

from .words import Alphabet, Word, parse_word, format_word

__all__ = ["Alphabet", "Word", "parse_word", "format_word"]
__version__ = "0.1.0"
