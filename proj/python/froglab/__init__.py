"""Frog models on d-ary trees: generating-function operators, simulation and verification."""

import json as _json

from ._froglab import (  # noqa: F401
    ModelParams,
    alpha,
    apply_operator,
    build_P,
    build_Q,
    c_map,
    critical_drift,
    estimate_pgf,
    iterate_operator,
    pstar,
    q_star,
    rho,
    simulate,
    __version__,
)
from . import _froglab


def run_suite(name, **config):
    """Run a verification suite and return its reports as dictionaries."""
    return [_json.loads(r) for r in _froglab.run_suite(name, **config)]


def check(name, **options):
    """Run a deterministic operator check ('vanishing' or 'ad-le-a2')."""
    return _json.loads(_froglab.check(name, **options))


def cli(*args):
    """Run the command-line tool in process; returns (exit_code, stdout, stderr)."""
    return _froglab.cli([str(a) for a in args])
