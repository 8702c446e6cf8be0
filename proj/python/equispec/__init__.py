"""Neumann spectra, isotypic classification and Hadamard shape derivatives
on group-invariant planar domains."""

try:
    from . import _core
except ImportError:  # in-tree use: extension lives in the cmake build dir
    import importlib
    import os
    import sys

    _dir = os.environ.get("EQUISPEC_CORE_DIR")
    if not _dir:
        raise
    if _dir not in sys.path:
        sys.path.insert(0, _dir)
    _core = importlib.import_module("_core")

EquispecError = _core.EquispecError
bessel_jprime_zero = _core.bessel_jprime_zero
disk_eigenvalues = _core.disk_eigenvalues
first_derivative = _core.first_derivative
group_order = _core.group_order
irrep_dims = _core.irrep_dims
rectangle_eigenvalues = _core.rectangle_eigenvalues
run_config = _core.run_config
spectrum = _core.spectrum
version = _core.version

__version__ = version()
