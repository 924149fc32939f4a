"""Normalisation constants, partition functions, eigenvalue densities and
diffusion kernels for Riemannian Gaussian distributions on symmetric spaces.

Most functionality lives in the submodules: ``rgd.partition``,
``rgd.density``, ``rgd.skewortho``, ``rgd.diffusion`` and ``rgd.oracle``.
"""

from .numerics import LogSigned
from .products import EnsembleSpec

__all__ = ["LogSigned", "EnsembleSpec"]
__version__ = "0.1.0"
