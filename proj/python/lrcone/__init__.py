"""Light-cone estimates for anharmonic oscillator chains.

Models are plain dicts with the keys of the JSON configuration
(``n_sites``, ``boundary``, ``a``, ``b`` and an optional ``perturbation``).
"""

import json

import numpy as np

from . import _core
from ._core import (
    BudgetExceeded,
    CertificationFailure,
    ConfigError,
    Error,
    InvalidArgument,
    velocity_bound_quadratic,
)

__version__ = _core.__version__

__all__ = [
    "BudgetExceeded",
    "CertificationFailure",
    "ConfigError",
    "Error",
    "InvalidArgument",
    "cone_scan_harmonic",
    "coupling_matrix",
    "evolution_matrices",
    "fit_velocity",
    "model",
    "phase_point",
    "run_experiment",
    "velocity_bound_quadratic",
    "weyl_commutator_norm",
]


def model(n_sites, boundary="open", a=5.0, b=2.0, perturbation=None):
    """Model dict accepted by every function of the package."""
    return {"n_sites": n_sites, "boundary": boundary, "a": a, "b": b, "perturbation": perturbation}


def _model_json(m):
    return json.dumps(m)


def phase_point(m, site, u=0.0, v=0.0):
    """Phase vectors (u, v) of exp(i(u Q + v P)) at a site label."""
    n = 2 * m["n_sites"] + 1
    pu, pv = np.zeros(n), np.zeros(n)
    pu[site + m["n_sites"]] = u
    pv[site + m["n_sites"]] = v
    return pu, pv


def coupling_matrix(m):
    return _core.coupling_matrix(_model_json(m))


def evolution_matrices(m, t, source="spectral"):
    return _core.evolution_matrices(_model_json(m), t, source)


def weyl_commutator_norm(m, t, a, b):
    """||[alpha^t(W(a)), W(b)]|| for phase points a = (u, v) and b = (u, v)."""
    return _core.weyl_commutator_norm(_model_json(m), t, a[0], a[1], b[0], b[1])


def cone_scan_harmonic(m, a, b, h_grid, t_grid):
    """Exact cone scan; returns a dict with a ``points`` list of (h, t, norm)."""
    text = _core.cone_scan_harmonic(_model_json(m), a[0], a[1], b[0], b[1], list(h_grid), list(t_grid))
    return json.loads(text)


def fit_velocity(scan, threshold=1e-3):
    return json.loads(_core.fit_velocity(json.dumps(scan), threshold))


def run_experiment(config, out_dir=""):
    """Runs an experiment from a config dict and returns its manifest."""
    return json.loads(_core.run_experiment(json.dumps(config), str(out_dir)))
