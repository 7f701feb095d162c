"""Verification suites for quasi-Poisson structures on compact matrix groups.

Thin re-export of the compiled extension. Every function is deterministic in
(arguments, seed); reports come back as plain dicts.
"""

from ._qpl import (
    WordParseError,
    bracket,
    cotangent_limit,
    cotangent_table,
    descriptor_name,
    fitted_decay_rate,
    model_descriptor,
    run_suite,
    suite_names,
)

__all__ = [
    "WordParseError",
    "bracket",
    "cotangent_limit",
    "cotangent_table",
    "descriptor_name",
    "fitted_decay_rate",
    "model_descriptor",
    "run_suite",
    "suite_names",
]
