"""Select the compiled Bessel kernel when available.

Set ``SKINLAYER_PURE_PYTHON=1`` to force the pure-Python fallback.
"""
import os

from . import _bessel_py

BACKEND = "python"
sph_jy_scaled = _bessel_py.sph_jy_scaled

if os.environ.get("SKINLAYER_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _bessel_cy
    except ImportError:  # pragma: no cover - depends on the build
        pass
    else:
        sph_jy_scaled = _bessel_cy.sph_jy_scaled
        BACKEND = "cython"
