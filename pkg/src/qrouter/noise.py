"""Density-matrix noise simulation with device-calibrated channel parameters.

Noise insertion order per gate is fixed: ideal unitary, depolarizing error on
the touched qubits, then amplitude and phase damping for the gate duration on
each touched qubit using that qubit's T1/T2. At the error magnitudes modeled
here the ordering is below any test tolerance, but it is pinned so runs are
reproducible.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .gates import GATE_ARITY, GATE_MATRICES, Circuit, embed_gate
from .qstate import DensityMatrix


@dataclass(frozen=True)
class QubitParams:
    """Calibration row for one physical qubit (times in microseconds).

    The frequencies and coupling are carried along for config fidelity; only
    T1/T2 enter the channels.
    """

    t1_us: float
    t2_us: float
    resonator_freq_ghz: float | None = None
    qubit_freq_ghz: float | None = None
    anharmonicity_mhz: float | None = None
    coupling_khz: float | None = None

    def __post_init__(self):
        if self.t1_us <= 0 or self.t2_us <= 0:
            raise ValueError("T1 and T2 must be positive")


# ibmqx4 calibration table for q[0]..q[4]: T1, T2, resonator freq,
# qubit freq, anharmonicity, qubit-cavity coupling
IBMQX4_QUBITS = (
    QubitParams(35.2, 38.1, 6.52396, 5.2461, -330.1, 410),
    QubitParams(57.5, 40.5, 6.48078, 5.3025, -329.7, 512),
    QubitParams(36.6, 54.8, 6.43875, 5.3025, -329.7, 408),
    QubitParams(43.0, 42.1, 6.58036, 5.4317, -327.9, 434),
    QubitParams(49.5, 19.2, 6.52698, 5.1824, -332.5, 458),
)


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate depolarizing + per-qubit damping + readout flip parameters."""

    qubits: tuple[QubitParams, ...]
    p1: float = 1e-3
    p2: float = 1e-2
    p_readout: float = 0.02
    dur_1q_ns: float = 100.0
    dur_2q_ns: float = 400.0

    def __post_init__(self):
        for p in (self.p1, self.p2, self.p_readout):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")
        if self.dur_1q_ns < 0 or self.dur_2q_ns < 0:
            raise ValueError("gate durations must be nonnegative")


def ibmqx4_model(**overrides) -> NoiseModel:
    """The built-in ibmqx4 preset (calibration table + error-order defaults)."""
    return NoiseModel(qubits=IBMQX4_QUBITS, **overrides)


def noise_model_from_json(data) -> NoiseModel:
    """Load a device file; unspecified fields fall back to the preset defaults."""
    if isinstance(data, str):
        data = json.loads(data)
    qubits = tuple(
        QubitParams(
            t1_us=float(q["t1_us"]),
            t2_us=float(q["t2_us"]),
            resonator_freq_ghz=q.get("resonator_freq_ghz"),
            qubit_freq_ghz=q.get("qubit_freq_ghz"),
            anharmonicity_mhz=q.get("anharmonicity_mhz"),
            coupling_khz=q.get("coupling_khz"),
        )
        for q in data["qubits"]
    )
    kwargs = {}
    for src, dst in (
        ("p1", "p1"),
        ("p2", "p2"),
        ("p_readout", "p_readout"),
        ("dur_1q_ns", "dur_1q_ns"),
        ("dur_2q_ns", "dur_2q_ns"),
    ):
        if src in data:
            kwargs[dst] = float(data[src])
    return NoiseModel(qubits=qubits, **kwargs)


class KrausChannel:
    """Trace-preserving operator-sum map: rho -> sum_i K_i rho K_i^dagger."""

    __slots__ = ("operators",)

    def __init__(self, operators):
        ops = [np.asarray(k, dtype=complex) for k in operators]
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        total = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(total - np.eye(dim))) > 1e-9:
            raise ValueError("Kraus operators do not satisfy sum K^dag K = I")
        self.operators = ops

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]


def amplitude_damping(t_ns: float, t1_us: float) -> KrausChannel:
    """Zero-temperature relaxation over ``t_ns`` with lifetime ``t1_us``."""
    if t_ns < 0:
        raise ValueError("duration must be nonnegative")
    if t1_us <= 0:
        raise ValueError("T1 must be positive")
    gamma = 1.0 - np.exp(-(t_ns / 1000.0) / t1_us)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel([k0, k1])


def phase_damping(t_ns: float, t1_us: float, t2_us: float) -> KrausChannel:
    """Pure dephasing beyond what relaxation already causes.

    Dephasing rate is 1/T2 - 1/(2*T1); off-diagonals decay by exp(-t * rate).
    Unphysical T2 > 2*T1 rows clamp the rate at zero with a warning.
    """
    if t_ns < 0:
        raise ValueError("duration must be nonnegative")
    if t1_us <= 0 or t2_us <= 0:
        raise ValueError("T1 and T2 must be positive")
    rate = 1.0 / t2_us - 1.0 / (2.0 * t1_us)
    if rate < 0:
        warnings.warn(
            f"T2 = {t2_us} exceeds 2*T1 = {2 * t1_us}; clamping dephasing rate to 0",
            stacklevel=2,
        )
        rate = 0.0
    lam = 1.0 - np.exp(-(t_ns / 1000.0) * rate)
    k0 = np.sqrt(1 - lam) * np.eye(2, dtype=complex)
    k1 = np.sqrt(lam) * np.diag([1, 0]).astype(complex)
    k2 = np.sqrt(lam) * np.diag([0, 1]).astype(complex)
    return KrausChannel([k0, k1, k2])


_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}


def depolarizing(p: float, n_qubits: int) -> KrausChannel:
    """rho -> (1 - p) rho + p I/2^n on ``n_qubits`` in {1, 2}."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if n_qubits not in (1, 2):
        raise ValueError("depolarizing channel supports 1 or 2 qubits")
    d4 = 4**n_qubits
    ops = []
    for letters in itertools.product("IXYZ", repeat=n_qubits):
        m = _PAULI_1Q[letters[0]]
        for l in letters[1:]:
            m = np.kron(m, _PAULI_1Q[l])
        if all(l == "I" for l in letters):
            ops.append(np.sqrt(1.0 - p + p / d4) * m)
        else:
            ops.append(np.sqrt(p / d4) * m)
    return KrausChannel(ops)


def apply_channel(rho: DensityMatrix, ch: KrausChannel, qubits) -> DensityMatrix:
    """Apply a channel on the listed qubits of a larger register."""
    qubits = tuple(qubits)
    if ch.dim != 2 ** len(qubits):
        raise ValueError(
            f"channel acts on {ch.dim} dimensions but got {len(qubits)} qubits"
        )
    out = np.zeros_like(rho.matrix)
    for k in ch.operators:
        full = embed_gate(k, qubits, rho.n_qubits)
        out += full @ rho.matrix @ full.conj().T
    return DensityMatrix(rho.n_qubits, out)


def readout_flip(probs, p_readout: float):
    """Push an outcome distribution through independent per-qubit bit flips."""
    if not 0.0 <= p_readout <= 1.0:
        raise ValueError(f"probability {p_readout} outside [0, 1]")
    probs = np.asarray(probs, dtype=float).reshape(-1)
    n = int(np.log2(probs.shape[0]))
    if 2**n != probs.shape[0]:
        raise ValueError("distribution length must be a power of 2")
    if np.any(probs < -1e-12) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("input is not a probability distribution")
    if p_readout == 0.0:
        return probs.copy()
    confusion = np.array([[1 - p_readout, p_readout], [p_readout, 1 - p_readout]])
    t = probs.reshape((2,) * n)
    for axis in range(n):
        t = np.moveaxis(np.tensordot(confusion, t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)


def simulate_noisy(c: Circuit, model: NoiseModel) -> DensityMatrix:
    """Density-matrix run of ``c`` from |0...0> under ``model``.

    The model must calibrate at least as many qubits as the circuit uses.
    Barriers are ignored; measurement belongs to the tomography layer.
    """
    n = c.n_qubits
    if len(model.qubits) < n:
        raise ValueError(
            f"model calibrates {len(model.qubits)} qubits, circuit needs {n}"
        )
    dim = 2**n
    rho_arr = np.zeros((dim, dim), dtype=complex)
    rho_arr[0, 0] = 1.0
    rho = DensityMatrix(n, rho_arr)

    damping_cache: dict[tuple[int, float], list[KrausChannel]] = {}

    def damping(q: int, dur: float):
        key = (q, dur)
        if key not in damping_cache:
            params = model.qubits[q]
            damping_cache[key] = [
                amplitude_damping(dur, params.t1_us),
                phase_damping(dur, params.t1_us, params.t2_us),
            ]
        return damping_cache[key]

    depol_1q = depolarizing(model.p1, 1)
    depol_2q = depolarizing(model.p2, 2)

    for instr in c.instructions:
        if instr.name == "barrier":
            continue
        if instr.name == "measure":
            raise ValueError("simulate_noisy does not execute measurements")
        if instr.name not in GATE_MATRICES:
            raise ValueError(f"unsupported gate {instr.name!r}")
        u = embed_gate(GATE_MATRICES[instr.name], instr.qubits, n)
        rho = DensityMatrix(n, u @ rho.matrix @ u.conj().T)
        if GATE_ARITY[instr.name] == 2:
            rho = apply_channel(rho, depol_2q, instr.qubits)
            dur = model.dur_2q_ns
        else:
            rho = apply_channel(rho, depol_1q, instr.qubits)
            dur = model.dur_1q_ns
        for q in instr.qubits:
            for ch in damping(q, dur):
                rho = apply_channel(rho, ch, (q,))
    return rho
