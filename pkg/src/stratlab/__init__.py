"""Computable workbench for multi-level nonstandard analysis."""

from .errors import StratError
from .labels import DEFAULT_SCALES, Label, boxplus, label_less, numeral, oplus, order_iso, restrict_image
from .numbers import Num, classify, cmp, derivative, embed, in_level, parse_number, render_number, shadow, support, w

__all__ = [
    "DEFAULT_SCALES", "Label", "Num", "StratError", "boxplus", "classify", "cmp", "derivative",
    "embed", "in_level", "label_less", "numeral", "oplus", "order_iso", "parse_number",
    "render_number", "restrict_image", "shadow", "support", "w",
]

__version__ = "0.1.0"
