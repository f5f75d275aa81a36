"""Kernel backend selection.

The kernel exists twice: compiled (``qdd._ckernel``, a Cython build of
``_kernel.py``) and interpreted (``qdd._kernel``, the same file).  The
compiled one is preferred when present; ``QDD_KERNEL=pure`` or
``QDD_KERNEL=compiled`` in the environment forces the choice.
"""

import importlib
import os


def load_kernel(name=None):
    """Import and return a kernel module: 'compiled', 'pure', or best."""
    if name in (None, ""):
        try:
            return importlib.import_module("qdd._ckernel")
        except ImportError:
            return importlib.import_module("qdd._kernel")
    if name == "pure":
        return importlib.import_module("qdd._kernel")
    if name == "compiled":
        try:
            return importlib.import_module("qdd._ckernel")
        except ImportError as exc:
            raise ImportError(
                "compiled kernel requested via QDD_KERNEL but qdd._ckernel "
                "is not built; run `pip install -e . --no-build-isolation` "
                "or unset QDD_KERNEL"
            ) from exc
    raise ValueError(f"unknown kernel name {name!r} (use 'pure' or 'compiled')")


def available_kernels():
    """Mapping of kernel kind -> module for every importable backend."""
    out = {}
    for name in ("compiled", "pure"):
        try:
            mod = load_kernel(name)
        except ImportError:
            continue
        out[name] = mod
    return out


kernel = load_kernel(os.environ.get("QDD_KERNEL"))
KERNEL_KIND = kernel.KERNEL_KIND

DDPackage = kernel.DDPackage
Edge = kernel.Edge
Node = kernel.Node
ComplexTable = kernel.ComplexTable
