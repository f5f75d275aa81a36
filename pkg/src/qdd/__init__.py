"""qdd: edge-weighted decision diagrams for quantum functionality.

Unitary matrices and state vectors are stored as edge-weighted DAGs with
max-magnitude normalization, a tolerance-aware interning table for the
complex edge weights, and the usual DD-package machinery (unique tables,
compute tables, reference-counting GC).  The hot kernel ships both as a
compiled extension and as pure Python; see ``qdd.KERNEL_KIND`` for which
one is active.
"""

from qdd._backend import (
    KERNEL_KIND,
    ComplexTable,
    DDPackage,
    Edge,
    Node,
    available_kernels,
    load_kernel,
)
from qdd.build import build_functionality, gate_unitary, simulate
from qdd.circuits import (
    Circuit,
    Gate,
    XorShift64Star,
    gen_qft,
    gen_supremacy,
    parse_circuit,
    render_circuit,
)
from qdd.dense import (
    ORACLE_MAX_QUBITS,
    compare_matrix,
    compare_state,
    dense_from_circuit,
    dense_state,
)
from qdd.dot import to_dot
from qdd.errors import (
    CacheExhaustedError,
    CircuitSyntaxError,
    ContractViolationError,
    QddError,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_KIND",
    "ComplexTable",
    "DDPackage",
    "Edge",
    "Node",
    "available_kernels",
    "load_kernel",
    "build_functionality",
    "simulate",
    "gate_unitary",
    "Circuit",
    "Gate",
    "XorShift64Star",
    "gen_qft",
    "gen_supremacy",
    "parse_circuit",
    "render_circuit",
    "ORACLE_MAX_QUBITS",
    "compare_matrix",
    "compare_state",
    "dense_from_circuit",
    "dense_state",
    "to_dot",
    "QddError",
    "ContractViolationError",
    "CacheExhaustedError",
    "CircuitSyntaxError",
    "__version__",
]
