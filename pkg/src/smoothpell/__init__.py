"""Find all x for which x^2 + c (c in {-4, -2, -1, 1, 2, 4}) is B-smooth,
via Pell-type equations and compact representations of their solutions."""

from .compactrep import CompactRep, build_compact, eval_mod
from .pellsolve import CASES, allowed_primes, solvable, unit_data
from .quadfield import QuadInt, cf_expand, fundamental_unit, regulator
from .search import ResultSet, SearchConfig, SolutionRecord, process_d, run, summarize

__all__ = [
    "CASES",
    "CompactRep",
    "QuadInt",
    "ResultSet",
    "SearchConfig",
    "SolutionRecord",
    "allowed_primes",
    "build_compact",
    "cf_expand",
    "eval_mod",
    "fundamental_unit",
    "process_d",
    "regulator",
    "run",
    "solvable",
    "summarize",
    "unit_data",
]
