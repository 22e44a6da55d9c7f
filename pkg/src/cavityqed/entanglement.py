"""Two-qubit concurrence, named target states and fidelities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import BasisDescriptor, BasisMismatchError, DensityMatrix, StateVector, inner_product

_SIGMA_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))
CLAMP_TOL = 1e-10

BELL_LABELS = ("Phi+", "Phi-", "Psi+", "Psi-")
LABELS = ("W", "GHZ", *BELL_LABELS, "custom")


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    Uses the Hermitian form sqrt(rho) (Y x Y) rho* (Y x Y) sqrt(rho), whose
    eigenvalues are the squares of the Wootters lambdas.
    """
    if rho.basis.has_cavity or rho.basis.atom_count != 2:
        raise ValueError("concurrence is defined here for two-qubit states only")
    m = rho.matrix
    w, v = np.linalg.eigh(m)
    if w.min() < -CLAMP_TOL:
        raise ValueError(f"density matrix has eigenvalue {w.min():.3g} < 0")
    sqrt_rho = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    flipped = _SIGMA_YY @ m.conj() @ _SIGMA_YY
    r = sqrt_rho @ flipped @ sqrt_rho
    ev = np.linalg.eigvalsh((r + r.conj().T) / 2)
    ev = np.where(ev < CLAMP_TOL, 0.0, ev)
    lam = np.sort(np.sqrt(ev))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class TargetState:
    label: str
    state: StateVector

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}; expected one of {LABELS}")


def make_target(label: str, n: int = 2, sign: int = +1) -> TargetState:
    """Named reference state on ``n`` qubits.

    ``W``: equal weight 1/sqrt(n) on every single-excitation ket.
    ``GHZ``: (|0...0> + sign |1...1>)/sqrt(2).
    Bell states (n = 2 only): Phi+- = (|11> +- |00>)/sqrt(2),
    Psi+- = (|10> +- |01>)/sqrt(2).
    """
    if label == "custom":
        raise ValueError("construct custom targets directly with TargetState('custom', state)")
    if label not in LABELS:
        raise ValueError(f"unknown label {label!r}")
    if label == "W":
        if n < 2:
            raise ValueError("W state needs n >= 2")
        amps = np.zeros(2**n, dtype=complex)
        amps[[1 << k for k in range(n)]] = 1 / np.sqrt(n)
        return TargetState(label, StateVector(BasisDescriptor(n), amps))
    if label == "GHZ":
        if n < 2:
            raise ValueError("GHZ state needs n >= 2")
        amps = np.zeros(2**n, dtype=complex)
        amps[0] = amps[-1] = 1 / np.sqrt(2)
        if sign < 0:
            amps[-1] *= -1
        return TargetState(label, StateVector(BasisDescriptor(n), amps))
    if n != 2:
        raise ValueError(f"{label} is a two-qubit state, got n={n}")
    s = 1 / np.sqrt(2)
    amps = np.zeros(4, dtype=complex)
    if label.startswith("Phi"):
        amps[3], amps[0] = s, (s if label == "Phi+" else -s)
    else:
        amps[2], amps[1] = s, (s if label == "Psi+" else -s)
    return TargetState(label, StateVector(BasisDescriptor(2), amps))


def fidelity_to(psi: StateVector, target: TargetState | StateVector) -> float:
    """|<target|psi>|**2 (insensitive to global phase)."""
    ref = target.state if isinstance(target, TargetState) else target
    if ref.basis != psi.basis:
        raise BasisMismatchError(f"{psi.basis} vs {ref.basis}")
    return min(1.0, abs(inner_product(ref, psi)) ** 2)


def w_class_fidelity(psi: StateVector) -> float:
    """Fidelity to the closest W_n state with free relative phases on each ket.

    Maximizing over phases gives (sum_k |c_k|)**2 / n for the single-excitation
    amplitudes c_k.
    """
    if psi.basis.has_cavity:
        raise BasisMismatchError("expected an atom-only state")
    n = psi.basis.atom_count
    c = psi.amplitudes[[1 << k for k in range(n)]]
    return min(1.0, float(np.sum(np.abs(c)) ** 2 / n))
