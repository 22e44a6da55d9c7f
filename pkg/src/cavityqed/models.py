"""Hamiltonians for n identical two-level atoms in a single-mode, far-detuned cavity.

All builders work in units where hbar = 1. The interaction-picture coupling
is ``g * sum_j (exp(-i delta t) a^dag s_j^- + h.c.)``; eliminating the cavity
in the dispersive limit ``delta >> g`` leaves an exchange model with rate
``lambda = g**2 / delta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import (
    BasisDescriptor,
    Operator,
    annihilation,
    excited_projector,
    ground_projector,
    lowering,
    photon_number,
    raising,
)


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the atom-cavity system.

    Args:
        n: number of atoms.
        g: atom-cavity coupling (angular frequency).
        delta: atom-cavity detuning, same units as ``g``.
        fock_cutoff: highest photon number kept; defaults to ``n + 2``.
    """

    n: int
    g: float
    delta: float
    fock_cutoff: int | None = field(default=None)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one atom, got n={self.n}")
        # g = 0 (decoupled atoms) is allowed as a limiting case
        if self.g < 0 or self.delta <= 0:
            raise ValueError("need g >= 0 and delta > 0")
        if self.fock_cutoff is None:
            object.__setattr__(self, "fock_cutoff", self.n + 2)
        elif self.fock_cutoff < 1:
            raise ValueError("fock_cutoff must be >= 1")

    @classmethod
    def unit_exchange(cls, n: int, **kw) -> ModelParams:
        """Parameters with lambda = 1, for vacuum-sector work where only lambda*t matters."""
        return cls(n=n, g=1.0, delta=1.0, **kw)

    @property
    def lam(self) -> float:
        return self.g**2 / self.delta

    @property
    def dispersive_ratio(self) -> float:
        return self.delta / self.g if self.g else float("inf")

    @property
    def basis(self) -> BasisDescriptor:
        return BasisDescriptor(self.n, self.fock_cutoff)

    @property
    def atom_basis(self) -> BasisDescriptor:
        return BasisDescriptor(self.n)


def _collective_lowering(basis: BasisDescriptor) -> np.ndarray:
    return sum(lowering(basis, j).matrix for j in range(basis.atom_count))


def full_hamiltonian_at(params: ModelParams, t: float) -> Operator:
    """Interaction-picture coupling at time ``t`` (truncated cavity)."""
    basis = params.basis
    a = annihilation(basis).matrix
    # e^{-i delta t} a^dag S^- ; its adjoint supplies the e^{+i delta t} a S^+ term
    term = np.exp(-1j * params.delta * t) * (a.conj().T @ _collective_lowering(basis))
    return Operator(basis, params.g * (term + term.conj().T), hermitian=True)


def static_frame_hamiltonian(params: ModelParams) -> Operator:
    """Time-independent generator ``-delta a^dag a + g sum_j (a^dag s_j^- + a s_j^+)``.

    A static-frame state maps to the interaction picture through
    ``exp(-i delta t a^dag a)`` (see :func:`cavityqed.dynamics.to_interaction_frame`).
    """
    basis = params.basis
    a = annihilation(basis).matrix
    hop = a.conj().T @ _collective_lowering(basis)
    mat = -params.delta * photon_number(basis).matrix + params.g * (hop + hop.conj().T)
    return Operator(basis, mat, hermitian=True)


def effective_hamiltonian(params: ModelParams) -> Operator:
    """Dispersive model ``lambda * sum_{i,j} (s_j^+ s_i^- a a^dag - s_j^- s_i^+ a^dag a)``.

    The double sum includes i == j, which produces the photon-number
    dependent Stark shifts.
    """
    basis = params.basis
    num = photon_number(basis).matrix
    # a a^dag = a^dag a + 1 exactly; the truncated product would be wrong on the top Fock level
    aad = num + np.eye(basis.dim)
    sp = sum(raising(basis, j).matrix for j in range(params.n))
    sm = sp.conj().T
    mat = sp @ sm @ aad - sm @ sp @ num
    return Operator(basis, params.lam * mat, hermitian=True)


def vacuum_sector_hamiltonian(params: ModelParams) -> Operator:
    """Zero-photon block of the dispersive model, on atoms only (2**n square)."""
    basis = params.atom_basis
    sp = sum(raising(basis, j).matrix for j in range(params.n))
    sm = sp.conj().T
    # sum_{i,j} s_j^+ s_i^- = Stark shifts (i == j) plus all pairwise exchanges
    return Operator(basis, params.lam * (sp @ sm), hermitian=True)


def far_detuned_jc_hamiltonian(params: ModelParams) -> Operator:
    """Single-atom dispersive Hamiltonian ``lambda (|1><1| a a^dag - |0><0| a^dag a)``."""
    if params.n != 1:
        raise ValueError("single-atom model requires n = 1")
    basis = params.basis
    num = photon_number(basis).matrix
    mat = excited_projector(basis, 0).matrix @ (num + np.eye(basis.dim)) - ground_projector(basis, 0).matrix @ num
    return Operator(basis, params.lam * mat, hermitian=True)


def two_atom_hamiltonian(params: ModelParams) -> Operator:
    """Two-atom dispersive Hamiltonian written term by term: Stark shifts plus s1^+ s2^- + h.c."""
    if params.n != 2:
        raise ValueError("two-atom model requires n = 2")
    basis = params.basis
    num = photon_number(basis).matrix
    eye = np.eye(basis.dim)
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for j in (0, 1):
        mat += excited_projector(basis, j).matrix @ (num + eye) - ground_projector(basis, j).matrix @ num
    swap = raising(basis, 0).matrix @ lowering(basis, 1).matrix
    mat += swap + swap.conj().T
    return Operator(basis, params.lam * mat, hermitian=True)
