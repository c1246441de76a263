"""Exact tools for extremal problems on s-union and intersecting set families."""

from .constructions import NamedFamily, build, closed_form_size
from .core import Family, Params, SetBits, dumps_family, loads_family
from .iso import canonicalize, is_isomorphic, is_subfamily_up_to_iso
from .properties import is_s_union, is_t_intersecting
from .search import (
    SearchProblem,
    SearchResult,
    max_cross_pair,
    max_diameter,
    max_s_union,
    max_uniform_intersecting,
    solve,
)

__all__ = [
    "Family",
    "NamedFamily",
    "Params",
    "SearchProblem",
    "SearchResult",
    "SetBits",
    "build",
    "canonicalize",
    "closed_form_size",
    "dumps_family",
    "is_isomorphic",
    "is_s_union",
    "is_subfamily_up_to_iso",
    "is_t_intersecting",
    "loads_family",
    "max_cross_pair",
    "max_diameter",
    "max_s_union",
    "max_uniform_intersecting",
    "solve",
]

__version__ = "0.1.0"
