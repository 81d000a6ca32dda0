"""Numerical laboratory for rank-one constructions, their generalized
Riesz-product spectral densities, Mahler-measure engines and
singularity diagnostics."""

__version__ = "0.1.0"

from . import affinity, circlepoly, construction, diagnostics, mahler, tower  # noqa: E402,F401
