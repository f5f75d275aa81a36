"""Circuit representation, the text format, and benchmark-family generators.

Circuit file grammar (UTF-8, line oriented):

* ``#`` starts a comment running to the end of the line.
* Blank lines are ignored.
* The first significant line is ``qubits <n>``.
* Every further line is one gate:
  ``h|x|y|z|s|sdg|t|tdg|sx|sy <target>``,
  ``cx|cz <control> <target>``, or
  ``cp <k> <control> <target>`` (controlled phase of angle pi / 2**(k-1)).
* Indices are whitespace-separated decimal integers.

Qubit 0 is the most significant bit of row/column indices throughout the
package.
"""

from dataclasses import dataclass, field

from qdd.errors import CircuitSyntaxError

SINGLE_QUBIT_GATES = ("h", "x", "y", "z", "s", "sdg", "t", "tdg", "sx", "sy")
CONTROLLED_GATES = ("cx", "cz")

_MASK64 = (1 << 64) - 1
_MAX_CP_EXPONENT = 1024


@dataclass(frozen=True)
class Gate:
    """One gate application.  ``param`` is the phase exponent of ``cp``."""

    kind: str
    target: int
    control: int | None = None
    param: int | None = None


@dataclass
class Circuit:
    n: int
    gates: list = field(default_factory=list)

    def __len__(self):
        return len(self.gates)


def parse_circuit(text):
    """Parse circuit text into a Circuit; raises CircuitSyntaxError."""
    n = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if fields[0] != "qubits":
                raise CircuitSyntaxError(
                    f"expected 'qubits <n>' header, got {fields[0]!r}", lineno
                )
            n = _int_field(fields, 1, lineno, "qubit count")
            if len(fields) != 2:
                raise CircuitSyntaxError("trailing tokens after qubit count", lineno)
            if n < 1:
                raise CircuitSyntaxError(f"qubit count must be >= 1, got {n}", lineno)
            continue
        kind = fields[0]
        if kind in SINGLE_QUBIT_GATES:
            if len(fields) != 2:
                raise CircuitSyntaxError(f"{kind} takes exactly one index", lineno)
            target = _int_field(fields, 1, lineno, "target")
            _check_index(target, n, lineno, "target")
            gates.append(Gate(kind, target))
        elif kind in CONTROLLED_GATES:
            if len(fields) != 3:
                raise CircuitSyntaxError(f"{kind} takes control and target", lineno)
            control = _int_field(fields, 1, lineno, "control")
            target = _int_field(fields, 2, lineno, "target")
            _check_index(control, n, lineno, "control")
            _check_index(target, n, lineno, "target")
            if control == target:
                raise CircuitSyntaxError("control equals target", lineno)
            gates.append(Gate(kind, target, control))
        elif kind == "cp":
            if len(fields) != 4:
                raise CircuitSyntaxError("cp takes k, control and target", lineno)
            k = _int_field(fields, 1, lineno, "phase exponent")
            if not (1 <= k <= _MAX_CP_EXPONENT):
                raise CircuitSyntaxError(
                    f"phase exponent must be in [1, {_MAX_CP_EXPONENT}], got {k}", lineno
                )
            control = _int_field(fields, 2, lineno, "control")
            target = _int_field(fields, 3, lineno, "target")
            _check_index(control, n, lineno, "control")
            _check_index(target, n, lineno, "target")
            if control == target:
                raise CircuitSyntaxError("control equals target", lineno)
            gates.append(Gate(kind, target, control, k))
        else:
            raise CircuitSyntaxError(f"unknown gate {kind!r}", lineno)
    if n is None:
        raise CircuitSyntaxError("missing 'qubits <n>' header")
    return Circuit(n, gates)


def _int_field(fields, pos, lineno, what):
    if pos >= len(fields):
        raise CircuitSyntaxError(f"missing {what}", lineno)
    try:
        return int(fields[pos])
    except ValueError:
        raise CircuitSyntaxError(f"bad {what} {fields[pos]!r}", lineno) from None


def _check_index(idx, n, lineno, what):
    if not (0 <= idx < n):
        raise CircuitSyntaxError(f"{what} {idx} out of range for {n} qubits", lineno)


def render_circuit(circuit):
    """Render a Circuit back to its text form (parse round-trips)."""
    lines = [f"qubits {circuit.n}"]
    for g in circuit.gates:
        if g.kind == "cp":
            lines.append(f"cp {g.param} {g.control} {g.target}")
        elif g.control is not None:
            lines.append(f"{g.kind} {g.control} {g.target}")
        else:
            lines.append(f"{g.kind} {g.target}")
    return "\n".join(lines) + "\n"


class XorShift64Star:
    """Deterministic 64-bit PRNG (xorshift64*).

    State update: ``x ^= x >> 12; x ^= x << 25; x ^= x >> 27`` (mod 2**64),
    output ``x * 2685821657736338717 mod 2**64``.  A zero seed is replaced
    by 0x9E3779B97F4A7C15.  Fully specified so generated circuits are
    reproducible everywhere.
    """

    def __init__(self, seed):
        self._x = seed & _MASK64 or 0x9E3779B97F4A7C15

    def next_u64(self):
        x = self._x
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self._x = x
        return (x * 2685821657736338717) & _MASK64

    def randrange(self, k):
        return self.next_u64() % k

    def choice(self, seq):
        return seq[self.next_u64() % len(seq)]


def gen_qft(n):
    """Quantum-Fourier-transform circuit on ``n`` qubits.

    Per qubit j: an H followed by controlled phases ``cp k`` (angle
    pi / 2**(k-1)) controlled by each deeper qubit.  Gate count is
    n*(n+1)/2.  The transform is produced in the standard circuit ordering,
    i.e. with the output bits in reversed significance (no final swaps).
    """
    if n < 1:
        raise ValueError("qft needs at least one qubit")
    gates = []
    for j in range(n):
        gates.append(Gate("h", j))
        for m in range(j + 1, n):
            gates.append(Gate("cp", j, m, m - j + 1))
    return Circuit(n, gates)


def _cz_layer(rows, cols, pattern):
    # Eight cyclic two-qubit patterns over the rows x cols grid.
    dr = pattern % 2
    dc = 1 - dr
    shift = (pattern >> 1) % 4
    gates = []
    for r in range(rows):
        for c in range(cols):
            r2 = r + dr
            c2 = c + dc
            if r2 >= rows or c2 >= cols:
                continue
            if (r * (2 - dr) + c * (2 - dc)) % 4 != shift:
                continue
            gates.append(Gate("cz", r2 * cols + c2, r * cols + c))
    return gates


def gen_supremacy(rows, cols, depth, seed):
    """Pseudorandom layered circuit on a rows x cols grid.

    Layer 0 puts an H on every qubit.  Later layers alternate between a
    cyclic CZ grid pattern (eight patterns) and a single-qubit layer drawing
    from {t, sx, sy}, where a qubit's first non-H single-qubit gate is
    always t and no qubit repeats its previous single-qubit gate.  The same
    (rows, cols, depth, seed) always yields the identical circuit.
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid must be at least 1x1")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    n = rows * cols
    rng = XorShift64Star(seed)
    gates = [Gate("h", q) for q in range(n)]
    last = [None] * n
    cz_count = 0
    for layer in range(1, depth):
        if layer % 2 == 1:
            gates.extend(_cz_layer(rows, cols, cz_count % 8))
            cz_count += 1
        else:
            for q in range(n):
                if last[q] is None:
                    pick = "t"
                else:
                    pick = rng.choice([g for g in ("t", "sx", "sy") if g != last[q]])
                last[q] = pick
                gates.append(Gate(pick, q))
    return Circuit(n, gates)
