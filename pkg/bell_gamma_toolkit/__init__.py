"""Simulation and exact analysis of the locality-free Gamma >= N/n spin-correlation inequality."""

from importlib.metadata import PackageNotFoundError, version

from .core import BellGammaError, InvalidArgumentError, UnsupportedOperationError

# Get version from installed package metadata (pyproject.toml)
try:
    __version__ = version("bell-gamma-toolkit")
except PackageNotFoundError:
    # Fallback for development environments where package isn't installed
    __version__ = "0.0.0+dev"

__all__ = [
    "BellGammaError",
    "InvalidArgumentError",
    "UnsupportedOperationError",
    "__version__",
]
