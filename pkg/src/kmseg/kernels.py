"""Backend selection for the hot kernels.

The compiled module ``kmseg._kernels`` is used when it imports; otherwise the
numpy fallback. Set ``KMSEG_PURE_PYTHON=1`` to force the fallback.
"""
import importlib
import os

BACKENDS = ("cython", "python")
_MODULES = {"cython": "kmseg._kernels", "python": "kmseg._kernels_py"}

BACKEND = None
count_levels = nearest_labels = cluster_moments = None


def available():
    """Names of the backends that import in this environment."""
    names = []
    for name in BACKENDS:
        try:
            importlib.import_module(_MODULES[name])
        except ImportError:
            continue
        names.append(name)
    return names


def use(name):
    """Rebind the module-level kernels to backend ``name``."""
    global BACKEND, count_levels, nearest_labels, cluster_moments
    if name not in _MODULES:
        raise ValueError(f"unknown backend {name!r}")
    mod = importlib.import_module(_MODULES[name])
    count_levels = mod.count_levels
    nearest_labels = mod.nearest_labels
    cluster_moments = mod.cluster_moments
    BACKEND = name


def _select():
    if os.environ.get("KMSEG_PURE_PYTHON"):
        use("python")
        return
    try:
        use("cython")
    except ImportError:
        use("python")


_select()
