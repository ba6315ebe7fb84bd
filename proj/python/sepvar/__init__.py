"""Formal symplectic groupoids and star products with separation of variables, in exact arithmetic."""
import json

from ._core import (  # noqa: F401
    DeformedGeometry,
    DiffOp,
    FElement,
    FiberPoly,
    Geometry,
    Jet,
    KElement,
    Options,
    PotentialData,
    Preset,
    SepvarError,
    SigmaYReport,
    StarProduct,
    berezin,
    dual_berezin_passes,
    h_from_psi,
    h_from_x3,
    membership_passes,
    metric_from_potential,
    operator_log,
    pair_s1,
    parity_hat,
    preset,
    s1_via_potential,
    sigma_symbol,
    sigma_y_pipeline,
    solve_f,
    solve_k,
    source_target_exp,
    st_apply,
)
from . import _core

__version__ = "0.1.0"


def jet(dim, terms, order=None):
    """Jet from a list of {"z": [...], "zbar": [...], "re": "p/q", "im": "p/q"} dicts."""
    return Jet.from_terms(dim, json.dumps(terms), order)


def run(verb, *suites, **flags):
    """Runs a command-line verb, e.g. run("sigma-y", geometry="disc").

    Returns (pass, result document as a dict).
    """
    opt = Options()
    opt.verb = verb
    opt.suites = list(suites)
    for key, value in flags.items():
        setattr(opt, "with_" if key == "with" else key, value)
    ok, doc = _core.run(opt)
    return ok, json.loads(doc)
