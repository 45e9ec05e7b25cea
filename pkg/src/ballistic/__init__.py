"""Ball-permuting simulators: classical probabilistic swap networks, exact
amplitude evolution over permutation bases, delta-interaction scattering
schedules, postselected gadget compilation, and the symmetric-group
representation toolkit backing them."""

__version__ = "0.1.0"

from . import _threads  # noqa: F401  (must precede numpy-importing modules)
from . import classical, encoded, gadgets, perm, qsim, rep_theory, scattering  # noqa: F401
