"""Gate matrices and circuit evaluation against a DD package instance."""

import cmath
import math

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

GATE_MATRICES = {
    "h": ((_INV_SQRT2, _INV_SQRT2), (_INV_SQRT2, -_INV_SQRT2)),
    "x": ((0, 1), (1, 0)),
    "y": ((0, -1j), (1j, 0)),
    "z": ((1, 0), (0, -1)),
    "s": ((1, 0), (0, 1j)),
    "sdg": ((1, 0), (0, -1j)),
    "t": ((1, 0), (0, cmath.exp(0.25j * cmath.pi))),
    "tdg": ((1, 0), (0, cmath.exp(-0.25j * cmath.pi))),
    "sx": ((0.5 + 0.5j, 0.5 - 0.5j), (0.5 - 0.5j, 0.5 + 0.5j)),
    "sy": ((0.5 + 0.5j, -0.5 - 0.5j), (0.5 + 0.5j, 0.5 + 0.5j)),
}


def gate_unitary(gate):
    """The 2x2 matrix a gate applies to its target qubit."""
    if gate.kind == "cx":
        return GATE_MATRICES["x"]
    if gate.kind == "cz":
        return GATE_MATRICES["z"]
    if gate.kind == "cp":
        return ((1, 0), (0, cmath.exp(1j * math.pi / 2.0 ** (gate.param - 1))))
    return GATE_MATRICES[gate.kind]


def gate_controls(gate):
    return () if gate.control is None else (gate.control,)


def gate_to_dd(pkg, gate, n):
    """Full 2^n x 2^n DD of one gate."""
    return pkg.gate_dd(gate_unitary(gate), gate.target, gate_controls(gate), n)


def build_functionality(pkg, circuit, truncate=None):
    """DD of the circuit's unitary, built by left-multiplying gate DDs.

    The running product is kept protected; superseded intermediates are
    released and garbage collection may run between steps.  The returned
    root edge is protected; callers release it with ``pkg.dec_ref`` when
    they are done with it.
    """
    gates = circuit.gates if truncate is None else circuit.gates[:truncate]
    acc = pkg.identity_dd(circuit.n)
    pkg.inc_ref(acc)
    for gate in gates:
        g = gate_to_dd(pkg, gate, circuit.n)
        pkg.inc_ref(g)
        nxt = pkg.multiply(g, acc)
        pkg.inc_ref(nxt)
        pkg.dec_ref(g)
        pkg.dec_ref(acc)
        acc = nxt
        if pkg.gc_pending:
            pkg.garbage_collect()
    return acc


def simulate(pkg, circuit, truncate=None):
    """Vector DD of the circuit applied to |0...0>, gate by gate.

    Never materializes the full matrix product.  The returned root edge is
    protected, as in ``build_functionality``.
    """
    gates = circuit.gates if truncate is None else circuit.gates[:truncate]
    state = pkg.basis_dd(circuit.n, 0)
    pkg.inc_ref(state)
    for gate in gates:
        g = gate_to_dd(pkg, gate, circuit.n)
        pkg.inc_ref(g)
        nxt = pkg.mat_vec(g, state)
        pkg.inc_ref(nxt)
        pkg.dec_ref(g)
        pkg.dec_ref(state)
        state = nxt
        if pkg.gc_pending:
            pkg.garbage_collect()
    return state
