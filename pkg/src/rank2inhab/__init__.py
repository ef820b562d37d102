"""Inhabitation of rank-two intersection types, with an ALBA cross-check."""

from .alba import Machine, accepts_in_place, load_machine
from .reduction import gen_t, reduce
from .solver import Empty, Inhabited, Limits, ResourceExceeded, enumerate_long, solve
from .terms import alpha_equal, check_derivation, parse_term, show_term
from .types import parse_type, rank, show

__version__ = "0.1.0"
