"""Dense reference computations for tests and the ``verify`` command.

Everything here recomputes circuit functionality with plain numpy matrix
algebra, independently of the DD kernel: the gate matrices are defined
again on purpose so a typo in one side cannot hide in both.  Desk scale
only; the qubit count is hard-capped.
"""

import math
from dataclasses import dataclass

import numpy as np

ORACLE_MAX_QUBITS = 12

_S2 = 1.0 / math.sqrt(2.0)

_DENSE_GATES = {
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "t": np.array([[1, 0], [0, np.exp(0.25j * np.pi)]], dtype=complex),
    "tdg": np.array([[1, 0], [0, np.exp(-0.25j * np.pi)]], dtype=complex),
    "sx": np.array([[0.5 + 0.5j, 0.5 - 0.5j], [0.5 - 0.5j, 0.5 + 0.5j]], dtype=complex),
    "sy": np.array([[0.5 + 0.5j, -0.5 - 0.5j], [0.5 + 0.5j, 0.5 + 0.5j]], dtype=complex),
}


def dense_gate_unitary(gate):
    if gate.kind == "cx":
        return _DENSE_GATES["x"]
    if gate.kind == "cz":
        return _DENSE_GATES["z"]
    if gate.kind == "cp":
        return np.array(
            [[1, 0], [0, np.exp(1j * np.pi / 2.0 ** (gate.param - 1))]], dtype=complex
        )
    return _DENSE_GATES[gate.kind]


def full_gate_matrix(gate, n):
    """The gate's full 2^n x 2^n matrix (qubit 0 = most significant bit)."""
    _check_cap(n)
    u = dense_gate_unitary(gate)
    dim = 1 << n
    tshift = n - 1 - gate.target
    cmask = 0
    if gate.control is not None:
        cmask = 1 << (n - 1 - gate.control)
    g = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        if cmask and (col & cmask) != cmask:
            g[col, col] = 1.0
            continue
        ct = (col >> tshift) & 1
        base = col & ~(1 << tshift)
        for rt in (0, 1):
            g[base | (rt << tshift), col] = u[rt, ct]
    return g


def dense_from_circuit(circuit, truncate=None):
    """Dense unitary of the circuit: later gates multiplied from the left."""
    _check_cap(circuit.n)
    dim = 1 << circuit.n
    u = np.eye(dim, dtype=complex)
    gates = circuit.gates if truncate is None else circuit.gates[:truncate]
    for gate in gates:
        u = full_gate_matrix(gate, circuit.n) @ u
    return u


def dense_state(circuit, truncate=None):
    """The circuit applied to |0...0>, as a dense amplitude vector."""
    _check_cap(circuit.n)
    dim = 1 << circuit.n
    v = np.zeros(dim, dtype=complex)
    v[0] = 1.0
    gates = circuit.gates if truncate is None else circuit.gates[:truncate]
    for gate in gates:
        v = full_gate_matrix(gate, circuit.n) @ v
    return v


def _check_cap(n):
    if n > ORACLE_MAX_QUBITS:
        raise ValueError(
            f"dense reference is capped at {ORACLE_MAX_QUBITS} qubits (got {n})"
        )


@dataclass
class CompareReport:
    max_deviation: float
    worst_row: int
    worst_col: int | None
    tol: float
    passed: bool


def compare_matrix(pkg, root, matrix, tol):
    """Extract every DD entry and compare against a dense matrix."""
    n = pkg.depth(root)
    dim = 1 << n
    if matrix.shape != (dim, dim):
        raise ValueError(f"dimension mismatch: DD is {dim}x{dim}, matrix is {matrix.shape}")
    worst = 0.0
    wr = wc = 0
    for r in range(dim):
        for c in range(dim):
            dev = abs(pkg.extract_entry(root, r, c) - matrix[r, c])
            if dev > worst:
                worst = dev
                wr, wc = r, c
    return CompareReport(worst, wr, wc, tol, worst <= tol)


def compare_state(pkg, root, vector, tol):
    """Extract every DD amplitude and compare against a dense vector."""
    n = pkg.depth(root)
    dim = 1 << n
    if vector.shape != (dim,):
        raise ValueError(f"dimension mismatch: DD has {dim} amplitudes, vector is {vector.shape}")
    worst = 0.0
    wr = 0
    for r in range(dim):
        dev = abs(pkg.extract_entry(root, r) - vector[r])
        if dev > worst:
            worst = dev
            wr = r
    return CompareReport(worst, wr, None, tol, worst <= tol)
