"""Exact arithmetic Okounkov bodies on desk-scale arithmetic surfaces."""

__version__ = "0.1.0"

from .reals import LogReal, parse_real  # noqa: E402,F401
from .number_ring import make_field  # noqa: E402,F401
