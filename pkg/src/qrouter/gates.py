"""Gate matrices, the circuit IR, unitary simulation, and the router builders.

The gate set is fixed: H, X, S, Sdg, T, Tdg and CNOT. The controlled-swap is
expressed inside that set (CNOT-conjugated Toffoli), so every circuit built
here can run on hardware that only offers those gates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import StateVector, basis_state

_SQ2 = 1.0 / np.sqrt(2.0)

GATE_MATRICES = {
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "s": np.diag([1, 1j]).astype(complex),
    "sdg": np.diag([1, -1j]).astype(complex),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
    "tdg": np.diag([1, np.exp(-1j * np.pi / 4)]).astype(complex),
    # operand order (control, target); control is the more significant bit
    "cx": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}

GATE_ARITY = {name: int(np.log2(m.shape[0])) for name, m in GATE_MATRICES.items()}

SINGLE_QUBIT_GATES = frozenset(g for g, k in GATE_ARITY.items() if k == 1)


def gate_matrix(kind: str) -> np.ndarray:
    """Unitary matrix of a named gate (copy; safe to mutate)."""
    try:
        return GATE_MATRICES[kind].copy()
    except KeyError:
        raise ValueError(f"unknown gate {kind!r}") from None


@dataclass(frozen=True)
class Instruction:
    """One circuit element: a gate, a measurement, or a barrier."""

    name: str  # gate name, "measure", or "barrier"
    qubits: tuple[int, ...]
    clbits: tuple[int, ...] = ()


class Circuit:
    """Ordered instruction list over a qubit/clbit register.

    Built by appending, then treated as immutable: simulators and the
    serializer never modify a circuit. Measurement is terminal; adding a gate
    on an already-measured qubit raises.
    """

    def __init__(self, n_qubits: int, n_clbits: int = 0, name: str = ""):
        if n_qubits < 0 or n_clbits < 0:
            raise ValueError("register sizes must be nonnegative")
        self.n_qubits = n_qubits
        self.n_clbits = n_clbits
        self.name = name
        self.instructions: list[Instruction] = []
        self._measured: set[int] = set()

    def _check_qubits(self, qubits):
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit operand in {qubits}")
        for q in qubits:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"qubit {q} out of range for register of {self.n_qubits}")
            if q in self._measured:
                raise ValueError(f"qubit {q} was already measured")

    def add(self, gate: str, *qubits: int) -> "Circuit":
        if gate not in GATE_MATRICES:
            raise ValueError(f"unknown gate {gate!r}")
        if len(qubits) != GATE_ARITY[gate]:
            raise ValueError(f"{gate} expects {GATE_ARITY[gate]} qubits, got {len(qubits)}")
        self._check_qubits(qubits)
        self.instructions.append(Instruction(gate, tuple(qubits)))
        return self

    def measure(self, qubit: int, clbit: int) -> "Circuit":
        self._check_qubits((qubit,))
        if not 0 <= clbit < self.n_clbits:
            raise ValueError(f"clbit {clbit} out of range for register of {self.n_clbits}")
        self.instructions.append(Instruction("measure", (qubit,), (clbit,)))
        self._measured.add(qubit)
        return self

    def barrier(self, *qubits: int) -> "Circuit":
        qs = tuple(qubits) if qubits else tuple(range(self.n_qubits))
        if len(set(qs)) != len(qs):
            raise ValueError(f"repeated qubit operand in {qs}")
        for q in qs:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"qubit {q} out of range for register of {self.n_qubits}")
        self.instructions.append(Instruction("barrier", qs))
        return self

    def gate_instructions(self):
        return [i for i in self.instructions if i.name in GATE_MATRICES]

    def __eq__(self, other):
        # structural equality; the name is metadata
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and self.n_clbits == other.n_clbits
            and self.instructions == other.instructions
        )

    def __repr__(self):
        return (
            f"Circuit(name={self.name!r}, n_qubits={self.n_qubits}, "
            f"n_clbits={self.n_clbits}, {len(self.instructions)} instructions)"
        )


def _apply_tensor(tensor: np.ndarray, u: np.ndarray, qubits: tuple[int, ...]) -> np.ndarray:
    """Contract gate ``u`` into the given axes of a (2,)*n (+ batch) tensor."""
    k = len(qubits)
    ut = u.reshape((2,) * (2 * k))
    out = np.tensordot(ut, tensor, axes=(list(range(k, 2 * k)), list(qubits)))
    return np.moveaxis(out, range(k), qubits)


def embed_gate(u: np.ndarray, qubits, n_qubits: int) -> np.ndarray:
    """Lift a k-qubit operator onto ``qubits`` of an n-qubit register."""
    dim = 2**n_qubits
    t = np.eye(dim, dtype=complex).reshape((2,) * n_qubits + (dim,))
    return _apply_tensor(t, u, tuple(qubits)).reshape(dim, dim)


def apply_circuit(c: Circuit, psi: StateVector) -> StateVector:
    """Run the gates of ``c`` on ``psi``; measurements are rejected."""
    if c.n_qubits != psi.n_qubits:
        raise ValueError(f"circuit has {c.n_qubits} qubits, state has {psi.n_qubits}")
    t = psi.amplitudes.reshape((2,) * c.n_qubits)
    for instr in c.instructions:
        if instr.name == "barrier":
            continue
        if instr.name == "measure":
            raise ValueError("apply_circuit cannot simulate measurements")
        t = _apply_tensor(t, GATE_MATRICES[instr.name], instr.qubits)
    return StateVector(c.n_qubits, t.reshape(-1))


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Full 2^n x 2^n unitary of a measurement-free circuit."""
    dim = 2**c.n_qubits
    u = np.eye(dim, dtype=complex).reshape((2,) * c.n_qubits + (dim,))
    for instr in c.instructions:
        if instr.name == "barrier":
            continue
        if instr.name == "measure":
            raise ValueError("circuit_unitary cannot include measurements")
        u = _apply_tensor(u, GATE_MATRICES[instr.name], instr.qubits)
    return u.reshape(dim, dim)


def _append_toffoli(c: Circuit, ctrl1: int, ctrl2: int, target: int):
    # standard 6-CNOT Toffoli network; exact (no residual global phase)
    c.add("h", target)
    c.add("cx", ctrl2, target)
    c.add("tdg", target)
    c.add("cx", ctrl1, target)
    c.add("t", target)
    c.add("cx", ctrl2, target)
    c.add("tdg", target)
    c.add("cx", ctrl1, target)
    c.add("t", ctrl2)
    c.add("t", target)
    c.add("h", target)
    c.add("cx", ctrl1, ctrl2)
    c.add("t", ctrl1)
    c.add("tdg", ctrl2)
    c.add("cx", ctrl1, ctrl2)


def append_fredkin(c: Circuit, control: int, a: int, b: int) -> Circuit:
    """Append a controlled-swap of ``a`` and ``b`` (control ``control``)."""
    if len({control, a, b}) != 3:
        raise ValueError("controlled-swap needs three distinct qubits")
    c.add("cx", b, a)
    _append_toffoli(c, control, a, b)
    c.add("cx", b, a)
    return c


def fredkin_circuit(control: int, a: int, b: int, n_qubits: int | None = None) -> Circuit:
    """Controlled-swap circuit over the smallest register containing the operands."""
    if len({control, a, b}) != 3:
        raise ValueError("controlled-swap needs three distinct qubits")
    n = max(control, a, b) + 1 if n_qubits is None else n_qubits
    return append_fredkin(Circuit(n, name="cswap"), control, a, b)


# named preparation sequences for the control and signal qubits
PREP_SPECS = {
    "paper-control": ("h", "s", "t", "s"),
    "zero": (),
    "one": ("x",),
    "paper-signal": ("h", "t", "h", "s"),
    "plus": ("h",),
}

ROUTER_EXPERIMENTS = {
    "router-superposition": ("paper-control", "paper-signal"),
    "router-control0": ("zero", "paper-signal"),
    "router-control1": ("one", "paper-signal"),
}


def resolve_prep(spec) -> tuple[str, ...]:
    """Turn a preset name or an explicit gate list into a gate tuple."""
    if isinstance(spec, str):
        if spec not in PREP_SPECS:
            raise ValueError(f"unknown preparation {spec!r}")
        return PREP_SPECS[spec]
    gates = tuple(spec)
    for g in gates:
        if g not in SINGLE_QUBIT_GATES:
            raise ValueError(f"preparation gates must be single-qubit, got {g!r}")
    return gates


def router_circuit(control_prep, signal_prep, name: str = "router") -> Circuit:
    """Three-qubit router: preps on control/path-1, |+> on path-2, then CSWAP.

    Qubit 0 carries the control, qubit 1 the signal (path 1), qubit 2 the
    empty path initialized to the |+> null state.
    """
    c = Circuit(3, n_clbits=0, name=name)
    for g in resolve_prep(control_prep):
        c.add(g, 0)
    for g in resolve_prep(signal_prep):
        c.add(g, 1)
    c.add("h", 2)
    return append_fredkin(c, 0, 1, 2)


def named_router_circuit(name: str) -> Circuit:
    """One of the three canonical experiments (see ``ROUTER_EXPERIMENTS``)."""
    try:
        control, signal = ROUTER_EXPERIMENTS[name]
    except KeyError:
        raise ValueError(f"unknown router experiment {name!r}") from None
    return router_circuit(control, signal, name=name)


def prep_state(spec) -> StateVector:
    """Single-qubit state produced by running a preparation on |0>."""
    c = Circuit(1)
    for g in resolve_prep(spec):
        c.add(g, 0)
    return apply_circuit(c, basis_state(1, 0))
