"""Filtered link homology for transverse braid closures."""

from .braid import BraidWord, parse_word, format_word, flype_pair

__all__ = ["BraidWord", "parse_word", "format_word", "flype_pair"]
__version__ = "0.1.0"
