"""Backend selection for the hot kernels.

The compiled module is used when it was built; otherwise the pure-Python
twin is used.  Both expose ``integrate``, ``dp45_step``, ``geodesic_rhs``,
``metric_terms``, ``gb_integrand`` and ``gb_inner`` with identical signatures.
"""

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

impl = _ckernels if _ckernels is not None else _pykernels
BACKEND = impl.BACKEND


def available():
    """Names of the importable backends."""
    names = ["python"]
    if _ckernels is not None:
        names.insert(0, "cython")
    return names


def get(name=None):
    """Kernel module by name ("cython" or "python"); default is the active one."""
    if name is None:
        return impl
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise ImportError("the compiled kernels are not built")
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
