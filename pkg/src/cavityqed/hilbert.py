"""Dense states and operators on n qubits, optionally tensored with one truncated cavity mode.

Ordering convention: atom 0 is the most significant binary digit of the
basis index and the photon number varies fastest, so the index of
``(bits, photons)`` is ``int(bits, 2) * (fock_cutoff + 1) + photons``.
Atom indices are 0-based throughout the package; the cavity, when present,
is the last subsystem (index ``atom_count``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-12


class BasisMismatchError(ValueError):
    """Two objects living on different Hilbert spaces were combined."""


@dataclass(frozen=True)
class BasisDescriptor:
    atom_count: int
    fock_cutoff: int | None = None

    def __post_init__(self):
        if self.atom_count < 1:
            raise ValueError(f"atom_count must be >= 1, got {self.atom_count}")
        if self.fock_cutoff is not None and self.fock_cutoff < 0:
            raise ValueError(f"fock_cutoff must be >= 0, got {self.fock_cutoff}")

    @property
    def has_cavity(self) -> bool:
        return self.fock_cutoff is not None

    @property
    def fock_dim(self) -> int:
        return 1 if self.fock_cutoff is None else self.fock_cutoff + 1

    @property
    def dim(self) -> int:
        return 2**self.atom_count * self.fock_dim

    @property
    def subsystem_dims(self) -> tuple[int, ...]:
        dims = (2,) * self.atom_count
        return dims + (self.fock_dim,) if self.has_cavity else dims

    def atoms_only(self) -> BasisDescriptor:
        return BasisDescriptor(self.atom_count)

    def encode(self, bits: Sequence[int] | str, photons: int | None = None) -> int:
        """Map an atomic bitstring (and photon number) to a basis index."""
        bits = _as_bits(bits)
        if len(bits) != self.atom_count:
            raise IndexError(f"bitstring has {len(bits)} digits, basis has {self.atom_count} atoms")
        if photons is None:
            photons = 0
        elif not self.has_cavity:
            if photons != 0:
                raise IndexError("photon number given for an atom-only basis")
        elif not 0 <= photons <= self.fock_cutoff:
            raise IndexError(f"photon number {photons} outside [0, {self.fock_cutoff}]")
        word = 0
        for b in bits:
            word = 2 * word + b
        return word * self.fock_dim + photons

    def decode(self, index: int) -> tuple[tuple[int, ...], int | None]:
        if not 0 <= index < self.dim:
            raise IndexError(f"index {index} outside [0, {self.dim})")
        word, photons = divmod(index, self.fock_dim)
        bits = tuple((word >> (self.atom_count - 1 - k)) & 1 for k in range(self.atom_count))
        return bits, (photons if self.has_cavity else None)

    def label(self, index: int) -> str:
        bits, photons = self.decode(index)
        s = "".join(map(str, bits))
        return s if photons is None else f"{s},{photons}ph"


def _as_bits(bits: Sequence[int] | str) -> tuple[int, ...]:
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise IndexError(f"bitstring must contain only 0/1, got {bits!r}")
    return out


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized ket. Construction fails if the norm drifts beyond ``NORM_TOL``;
    call :meth:`from_unnormalized` to renormalize explicitly."""

    basis: BasisDescriptor
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape != (self.basis.dim,):
            raise BasisMismatchError(f"expected {self.basis.dim} amplitudes, got {amps.shape[0]}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm = {norm:.12g})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_unnormalized(cls, basis: BasisDescriptor, amplitudes) -> StateVector:
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(basis, amps / norm)

    def normalized(self) -> StateVector:
        return StateVector.from_unnormalized(self.basis, self.amplitudes)

    def amplitude(self, bits: Sequence[int] | str, photons: int | None = None) -> complex:
        return complex(self.amplitudes[self.basis.encode(bits, photons)])

    def support(self, tol: float = 1e-12) -> dict[str, complex]:
        """Nonzero amplitudes keyed by basis label, in index order."""
        return {
            self.basis.label(i): complex(a)
            for i, a in enumerate(self.amplitudes)
            if abs(a) > tol
        }

    def __repr__(self):
        terms = " + ".join(f"({a:.4g})|{k}>" for k, a in self.support(1e-9).items())
        return f"StateVector({terms})"


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense square matrix on ``basis``. ``hermitian=None`` detects the flag."""

    basis: BasisDescriptor
    matrix: np.ndarray
    hermitian: bool | None = None

    def __post_init__(self):
        mat = _frozen(self.matrix)
        d = self.basis.dim
        if mat.shape != (d, d):
            raise BasisMismatchError(f"expected a {d}x{d} matrix, got {mat.shape}")
        deviation = np.max(np.abs(mat - mat.conj().T)) if d else 0.0
        if self.hermitian is None:
            object.__setattr__(self, "hermitian", bool(deviation <= HERMITIAN_TOL))
        elif self.hermitian and deviation > HERMITIAN_TOL:
            raise ValueError(f"matrix flagged Hermitian but |M - M^dag|_max = {deviation:.3g}")
        object.__setattr__(self, "matrix", mat)

    def _check(self, other: Operator):
        if other.basis != self.basis:
            raise BasisMismatchError(f"{self.basis} vs {other.basis}")

    def __add__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.basis, self.matrix - other.matrix)

    def __mul__(self, scalar) -> Operator:
        return Operator(self.basis, scalar * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            if other.basis != self.basis:
                raise BasisMismatchError(f"{self.basis} vs {other.basis}")
            return self.matrix @ other.amplitudes
        self._check(other)
        return Operator(self.basis, self.matrix @ other.matrix)

    def dag(self) -> Operator:
        return Operator(self.basis, self.matrix.conj().T)

    def commutator(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.basis, self.matrix @ other.matrix - other.matrix @ self.matrix)

    def expectation(self, psi: StateVector) -> complex:
        return complex(np.vdot(psi.amplitudes, self @ psi))

    def block(self, indices: Iterable[int]) -> np.ndarray:
        idx = np.fromiter(indices, dtype=int)
        return self.matrix[np.ix_(idx, idx)]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    basis: BasisDescriptor
    matrix: np.ndarray

    def __post_init__(self):
        mat = _frozen(self.matrix)
        d = self.basis.dim
        if mat.shape != (d, d):
            raise BasisMismatchError(f"expected a {d}x{d} matrix, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr:.12g}, expected 1")
        if np.linalg.eigvalsh(mat).min() < -NORM_TOL:
            raise ValueError("density matrix has negative eigenvalues")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_state(cls, psi: StateVector) -> DensityMatrix:
        v = psi.amplitudes
        return cls(psi.basis, np.outer(v, v.conj()))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def basis_state(basis: BasisDescriptor, bitstring: Sequence[int] | str, photons: int | None = None) -> StateVector:
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.encode(bitstring, photons)] = 1.0
    return StateVector(basis, amps)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.basis != b.basis:
        raise BasisMismatchError(f"{a.basis} vs {b.basis}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """|a> (x) |b>. ``a`` must be atom-only; the cavity of ``b`` (if any) stays last."""
    if a.basis.has_cavity:
        raise BasisMismatchError("left factor must not carry a cavity mode")
    basis = BasisDescriptor(a.basis.atom_count + b.basis.atom_count, b.basis.fock_cutoff)
    return StateVector(basis, np.kron(a.amplitudes, b.amplitudes))


def embed_vacuum(psi: StateVector, fock_cutoff: int) -> StateVector:
    """Atom-only state tensored with the cavity vacuum."""
    if psi.basis.has_cavity:
        raise BasisMismatchError("state already carries a cavity mode")
    vac = np.zeros(fock_cutoff + 1, dtype=complex)
    vac[0] = 1.0
    return StateVector(BasisDescriptor(psi.basis.atom_count, fock_cutoff), np.kron(psi.amplitudes, vac))


def vacuum_component(psi: StateVector) -> np.ndarray:
    """Unnormalized atomic amplitudes of the zero-photon branch."""
    if not psi.basis.has_cavity:
        return psi.amplitudes.copy()
    return psi.amplitudes.reshape(-1, psi.basis.fock_dim)[:, 0].copy()


def partial_trace(rho_or_state: DensityMatrix | StateVector, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the subsystems in ``keep``.

    Subsystems are numbered 0..atom_count-1 for the atoms and ``atom_count``
    for the cavity. The kept subsystems retain their relative order.
    """
    basis = rho_or_state.basis
    dims = basis.subsystem_dims
    n_sub = len(dims)
    keep = sorted(set(keep))
    if not keep or len(keep) == n_sub:
        raise ValueError("keep must be a nonempty proper subset of the subsystems")
    if keep[0] < 0 or keep[-1] >= n_sub:
        raise IndexError(f"subsystem indices must lie in [0, {n_sub})")
    traced = [k for k in range(n_sub) if k not in keep]

    if isinstance(rho_or_state, StateVector):
        psi = rho_or_state.amplitudes.reshape(dims)
        psi = np.transpose(psi, keep + traced)
        dk = int(np.prod([dims[k] for k in keep]))
        m = psi.reshape(dk, -1)
        reduced = m @ m.conj().T
    else:
        rho = rho_or_state.matrix.reshape(dims + dims)
        row = list(range(n_sub))
        col = [k + n_sub if k in keep else k for k in range(n_sub)]
        out = keep + [k + n_sub for k in keep]
        reduced = np.einsum(rho, row + col, out)
        dk = int(np.prod([dims[k] for k in keep]))
        reduced = reduced.reshape(dk, dk)

    kept_atoms = [k for k in keep if k < basis.atom_count]
    cavity_kept = basis.has_cavity and basis.atom_count in keep
    if not kept_atoms:
        # BasisDescriptor has no cavity-only form
        raise ValueError("reduced state must keep at least one atom")
    new_basis = BasisDescriptor(len(kept_atoms), basis.fock_cutoff if cavity_kept else None)
    return DensityMatrix(new_basis, reduced)


def _atom_factor(basis: BasisDescriptor, j: int, single: np.ndarray) -> np.ndarray:
    if not 0 <= j < basis.atom_count:
        raise IndexError(f"atom index {j} outside [0, {basis.atom_count})")
    factors = [single if k == j else np.eye(2) for k in range(basis.atom_count)]
    if basis.has_cavity:
        factors.append(np.eye(basis.fock_dim))
    return reduce(np.kron, factors)


# single-qubit matrices in the {|0>, |1>} basis
_RAISE = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|
_LOWER = _RAISE.T.copy()  # |0><1|
_EXCITED = np.diag([0.0, 1.0]).astype(complex)
_GROUND = np.diag([1.0, 0.0]).astype(complex)


def raising(basis: BasisDescriptor, j: int) -> Operator:
    """s_j^+ = |1><0| on atom j."""
    return Operator(basis, _atom_factor(basis, j, _RAISE), hermitian=False)


def lowering(basis: BasisDescriptor, j: int) -> Operator:
    """s_j^- = |0><1| on atom j."""
    return Operator(basis, _atom_factor(basis, j, _LOWER), hermitian=False)


def excited_projector(basis: BasisDescriptor, j: int) -> Operator:
    return Operator(basis, _atom_factor(basis, j, _EXCITED), hermitian=True)


def ground_projector(basis: BasisDescriptor, j: int) -> Operator:
    return Operator(basis, _atom_factor(basis, j, _GROUND), hermitian=True)


def _cavity_factor(basis: BasisDescriptor, single: np.ndarray) -> np.ndarray:
    if not basis.has_cavity:
        raise BasisMismatchError("basis has no cavity mode")
    return np.kron(np.eye(2**basis.atom_count), single)


def annihilation(basis: BasisDescriptor) -> Operator:
    """Truncated cavity lowering operator a."""
    a = np.diag(np.sqrt(np.arange(1, basis.fock_dim, dtype=float)), 1)
    return Operator(basis, _cavity_factor(basis, a.astype(complex)), hermitian=False)


def creation(basis: BasisDescriptor) -> Operator:
    return annihilation(basis).dag()


def photon_number(basis: BasisDescriptor) -> Operator:
    n = np.diag(np.arange(basis.fock_dim, dtype=float)).astype(complex)
    return Operator(basis, _cavity_factor(basis, n), hermitian=True)


def identity(basis: BasisDescriptor) -> Operator:
    return Operator(basis, np.eye(basis.dim, dtype=complex), hermitian=True)


def excitation_number(basis: BasisDescriptor) -> Operator:
    """Number of excited atoms plus photons (diagonal)."""
    diag = np.empty(basis.dim)
    for i in range(basis.dim):
        bits, photons = basis.decode(i)
        diag[i] = sum(bits) + (photons or 0)
    return Operator(basis, np.diag(diag).astype(complex), hermitian=True)
