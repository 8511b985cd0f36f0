"""Shot-based Pauli tomography and the fidelity metric.

A measurement setting is one local basis choice per qubit (X, Y or Z; 3^n
settings cover every non-identity Pauli observable by marginalizing the
positions one replaces with I). For a literal one-circuit-per-observable run,
settings may also carry I letters: those qubits are measured in Z and their
bits ignored by every estimator that targets the setting's observable.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gates import GATE_MATRICES
from .noise import readout_flip
from .qstate import DensityMatrix

_ROTATIONS = {
    "X": GATE_MATRICES["h"],
    "Y": GATE_MATRICES["h"] @ GATE_MATRICES["sdg"],  # circuit order: sdg, then h
    "Z": np.eye(2, dtype=complex),
    "I": np.eye(2, dtype=complex),
}

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}


@lru_cache(maxsize=None)
def pauli_matrix(pauli: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, qubit 0 leftmost."""
    m = _PAULI_1Q[pauli[0]]
    for letter in pauli[1:]:
        m = np.kron(m, _PAULI_1Q[letter])
    m.setflags(write=False)
    return m


def settings_for(n: int) -> list[str]:
    """All 3^n local-basis settings in lexicographic order (X < Y < Z)."""
    if n < 1:
        raise ValueError("need at least one qubit")
    return ["".join(p) for p in itertools.product("XYZ", repeat=n)]


def observables_for(n: int) -> list[str]:
    """All 4^n - 1 non-identity Pauli strings."""
    if n < 1:
        raise ValueError("need at least one qubit")
    return [
        "".join(p)
        for p in itertools.product("IXYZ", repeat=n)
        if any(l != "I" for l in p)
    ]


def literal_settings_for(n: int) -> list[str]:
    """One dedicated setting per observable: the observable string itself."""
    return observables_for(n)


def _basis_probs(rho: DensityMatrix, setting: str) -> np.ndarray:
    r = _ROTATIONS[setting[0]]
    for letter in setting[1:]:
        r = np.kron(r, _ROTATIONS[letter])
    probs = np.real(np.einsum("ij,jk,ik->i", r, rho.matrix, r.conj()))
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def sample_counts(
    rho: DensityMatrix,
    setting: str,
    shots: int,
    seed: int,
    p_readout: float = 0.0,
) -> dict[str, int]:
    """Draw outcome counts for one setting; deterministic for a fixed seed.

    Outcome keys are bitstrings with qubit 0 first. Sampling is
    inverse-transform over the (readout-corrupted) Born distribution.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    if len(setting) != rho.n_qubits:
        raise ValueError(f"setting {setting!r} does not match {rho.n_qubits} qubits")
    probs = _basis_probs(rho, setting)
    if p_readout:
        probs = readout_flip(probs, p_readout)
    rng = np.random.default_rng(seed)
    edges = np.cumsum(probs)
    edges[-1] = 1.0
    outcomes = np.searchsorted(edges, rng.random(shots), side="right")
    counts = np.bincount(outcomes, minlength=probs.shape[0])
    n = rho.n_qubits
    return {
        format(i, f"0{n}b"): int(c) for i, c in enumerate(counts) if c > 0
    }


@dataclass
class TomographyDataset:
    """Counts per measurement setting at a fixed shot budget.

    ``seed`` is the master seed; setting index i sampled with seed ^ i, so
    collection order (or parallelism) cannot change the data. RNG identity is
    recorded so counts files are reproducible bit-for-bit.
    """

    n_qubits: int
    shots: int
    seed: int
    counts: dict[str, dict[str, int]]
    rng_name: str = "numpy-pcg64"

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "shots": self.shots,
            "seed": self.seed,
            "rng": self.rng_name,
            "settings": self.counts,
        }

    @classmethod
    def from_json(cls, data) -> "TomographyDataset":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            n_qubits=int(data["n_qubits"]),
            shots=int(data["shots"]),
            seed=int(data["seed"]),
            counts={s: dict(c) for s, c in data["settings"].items()},
            rng_name=data.get("rng", "numpy-pcg64"),
        )


def collect_dataset(
    rho: DensityMatrix,
    shots: int,
    seed: int,
    p_readout: float = 0.0,
    settings: list[str] | None = None,
) -> TomographyDataset:
    """Sample every setting (default: the 3^n grid) into one dataset."""
    if settings is None:
        settings = settings_for(rho.n_qubits)
    counts = {
        s: sample_counts(rho, s, shots, seed ^ i, p_readout)
        for i, s in enumerate(settings)
    }
    return TomographyDataset(rho.n_qubits, shots, seed, counts)


def _compatible(setting: str, pauli: str) -> bool:
    return all(s == p for s, p in zip(setting, pauli) if p != "I")


def expectation(dataset: TomographyDataset, pauli: str) -> float:
    """Estimate <P> from counts, averaged over every compatible setting."""
    if len(pauli) != dataset.n_qubits:
        raise ValueError(f"pauli {pauli!r} does not match {dataset.n_qubits} qubits")
    support = [i for i, letter in enumerate(pauli) if letter != "I"]
    if not support:
        return 1.0
    values = []
    for setting, counts in dataset.counts.items():
        if not _compatible(setting, pauli):
            continue
        total = 0
        for outcome, c in counts.items():
            parity = sum(int(outcome[i]) for i in support) % 2
            total += -c if parity else c
        values.append(total / dataset.shots)
    if not values:
        raise ValueError(f"no measurement setting compatible with {pauli!r}")
    return float(np.mean(values))


def linear_inversion(expectations: dict[str, float], n: int) -> np.ndarray:
    """rho_hat = 2^-n sum_P <P> P; Hermitian and unit-trace, possibly non-PSD."""
    dim = 2**n
    m = np.eye(dim, dtype=complex)  # the implicit all-I term, <I...I> = 1
    for pauli in observables_for(n):
        if pauli not in expectations:
            raise ValueError(f"missing expectation for {pauli!r}")
        m = m + expectations[pauli] * pauli_matrix(pauli)
    return m / dim


def project_to_physical(m: np.ndarray) -> DensityMatrix:
    """Water-filling projection of a near-physical Hermitian estimate.

    Repeatedly zeroes the most-negative eigenvalue and spreads its weight
    equally over the remaining nonzero eigenvalues; a PSD input passes
    through unchanged.
    """
    m = np.asarray(m, dtype=complex)
    if np.max(np.abs(m - m.conj().T)) > 1e-6:
        raise ValueError("input is not approximately Hermitian")
    tr = np.trace(m).real
    if abs(tr - 1.0) > 1e-6:
        raise ValueError(f"input trace {tr} is not approximately 1")
    herm = (m + m.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(herm)
    vals = vals.real.copy()
    zeroed = np.zeros(vals.shape, dtype=bool)
    while vals.min() < 0:
        i = int(np.argmin(vals))
        deficit = vals[i]
        vals[i] = 0.0
        zeroed[i] = True
        alive = ~zeroed & (vals != 0)
        if not alive.any():
            # deficit with nothing left to absorb it; trace fixes below
            break
        vals[alive] += deficit / alive.sum()
    vals = np.clip(vals, 0.0, None)
    vals /= vals.sum()
    out = (vecs * vals) @ vecs.conj().T
    n = int(np.log2(m.shape[0]))
    return DensityMatrix(n, (out + out.conj().T) / 2.0)


def reconstruct(dataset: TomographyDataset) -> DensityMatrix:
    """Full pipeline: expectations -> linear inversion -> physicality projection."""
    n = dataset.n_qubits
    exps = {p: expectation(dataset, p) for p in observables_for(n)}
    return project_to_physical(linear_inversion(exps, n))


def exact_expectations(rho: DensityMatrix) -> dict[str, float]:
    """Noise-free <P> = Tr(P rho) for every non-identity observable."""
    return {
        p: float(np.real(np.trace(pauli_matrix(p) @ rho.matrix)))
        for p in observables_for(rho.n_qubits)
    }


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).

    For a pure sigma this is sqrt(<psi|rho|psi>). The square-root (rather
    than squared-overlap) convention is what brackets the reference device
    fidelities at the modeled noise levels; both conventions agree at 0 and 1
    and are monotonically related, so every metric ordering is unchanged.
    """
    if rho.dim != sigma.dim:
        raise ValueError("states have different dimensions")

    def sqrtm(m):
        w, v = np.linalg.eigh(m)
        return (v * np.sqrt(np.clip(w.real, 0.0, None))) @ v.conj().T

    # nuclear norm of sqrt(rho) sqrt(sigma); better conditioned than
    # eigendecomposing the sandwiched product when either state is pure
    sv = np.linalg.svd(sqrtm(rho.matrix) @ sqrtm(sigma.matrix), compute_uv=False)
    return float(min(1.0, sv.sum()))
