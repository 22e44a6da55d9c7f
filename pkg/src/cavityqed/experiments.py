"""Quantitative studies built on the dispersive model.

Collision probabilities for the two-pulse experiment, a three-atom mixture
model that reproduces them from first principles, the timing-error study
for W_3 preparation, the dispersive-validity sweep and distillation scans.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Literal, Sequence

import numpy as np

from .dynamics import (
    Propagator,
    analytic_w_evolution,
    distillation_probability,
    measure_atom,
    to_interaction_frame,
)
from .entanglement import make_target, fidelity_to
from .hilbert import (
    BasisDescriptor,
    Operator,
    StateVector,
    basis_state,
    embed_vacuum,
    inner_product,
    partial_trace,
    photon_number,
)
from .models import ModelParams, static_frame_hamiltonian, vacuum_sector_hamiltonian

PROB_TOL = 1e-9
MIN_DISPERSIVE_RATIO = 5.0


@dataclass(frozen=True)
class SweepSeries:
    """A 1-D parameter grid with named output columns of the same length."""

    parameter: str
    grid: np.ndarray
    columns: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)
    probability_columns: tuple[str, ...] = ()

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        cols = {k: np.asarray(v, dtype=float) for k, v in self.columns.items()}
        for name, col in cols.items():
            if col.shape != grid.shape:
                raise ValueError(f"column {name!r} has shape {col.shape}, grid has {grid.shape}")
        for name in self.probability_columns:
            col = cols[name]
            if col.size and (col.min() < -PROB_TOL or col.max() > 1 + PROB_TOL):
                raise ValueError(f"probability column {name!r} leaves [0, 1]")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "columns", cols)

    def __len__(self):
        return self.grid.size

    @property
    def header(self) -> list[str]:
        return [self.parameter, *self.columns]

    def rows(self) -> list[dict[str, float]]:
        names = list(self.columns)
        return [
            {self.parameter: float(x), **{k: float(self.columns[k][i]) for k in names}}
            for i, x in enumerate(self.grid)
        ]

    def to_csv(self, decimals: int = 6) -> str:
        lines = [",".join(self.header)]
        for i, x in enumerate(self.grid):
            cells = [_compact(x, decimals)]
            cells += [format_fixed(self.columns[k][i], decimals) for k in self.columns]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_json(self, config: dict | None = None) -> str:
        payload = {"config": config if config is not None else self.metadata, "rows": self.rows()}
        return json.dumps(payload, indent=2)


def format_fixed(x: float, decimals: int) -> str:
    # round first so that tiny negatives print as 0.000000, not -0.000000
    return f"{(round(float(x), decimals) or 0.0):.{decimals}f}"


def _compact(x: float, decimals: int) -> str:
    s = format_fixed(x, decimals)
    return s.rstrip("0").rstrip(".") if "." in s else s


def _map_points(fn: Callable, items: Sequence, workers: int | None):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# ---------------------------------------------------------------- collisions


def collision_probabilities_closed_form(lambda_t):
    """Readout probabilities (P_ee, P_gg, P_eg, P_ge) of the two detected atoms,
    including the three-atom collision channels, as fitted trigonometric
    polynomials. Accepts scalars or arrays."""
    lt = np.asarray(lambda_t, dtype=float)
    c2, c3 = np.cos(2 * lt), np.cos(3 * lt)
    p_ee = 0.028 * (1 - c3)
    p_eg = 0.514 + 0.375 * c2 + 0.111 * c3
    p_ge = 0.430 - 0.375 * c2 - 0.055 * c3
    if lt.ndim == 0:
        return float(p_ee), float(p_ee), float(p_eg), float(p_ge)
    return p_ee, p_ee.copy(), p_eg, p_ge


@dataclass(frozen=True)
class CollisionMixture:
    """Channel weights for the events recorded as one atom per pulse.

    w_two_atom: genuinely one atom per pulse, pulse 1 excited, pulse 2 ground.
    w_extra_first: pulse 1 carried two excited atoms (e, e, g).
    w_extra_second: pulse 2 carried two ground atoms (e, g, g).
    """

    w_two_atom: float = 0.75
    w_extra_first: float = 0.125
    w_extra_second: float = 0.125

    def __post_init__(self):
        w = self.weights
        if min(w) < 0:
            raise ValueError("mixture weights must be non-negative")
        if abs(sum(w) - 1) > 1e-9:
            raise ValueError(f"mixture weights sum to {sum(w):.12g}, expected 1")

    @property
    def weights(self) -> tuple[float, float, float]:
        return (self.w_two_atom, self.w_extra_first, self.w_extra_second)


Channel = Literal["two_atom", "extra_first", "extra_second"]

# initial bits and the (undetected-candidates, detected pair) layout of each channel;
# detected pairs are ordered (pulse-1 atom, pulse-2 atom)
_CHANNELS: dict[str, tuple[str, tuple[int, ...]]] = {
    "two_atom": ("10", ()),
    "extra_first": ("110", (0, 1)),  # atoms 0, 1 share pulse 1; atom 2 is pulse 2
    "extra_second": ("100", (1, 2)),  # atom 0 is pulse 1; atoms 1, 2 share pulse 2
}


@lru_cache(maxsize=None)
def _vacuum_propagator(n: int) -> Propagator:
    return Propagator(vacuum_sector_hamiltonian(ModelParams.unit_exchange(n)))


def channel_probabilities(channel: Channel, lambda_t: float) -> tuple[float, float, float, float]:
    """(P_ee, P_gg, P_eg, P_ge) for a single collision channel, from vacuum-sector evolution."""
    bits, same_pulse = _CHANNELS[channel]
    n = len(bits)
    psi0 = basis_state(BasisDescriptor(n), bits)
    psi = _vacuum_propagator(n).evolve(psi0, lambda_t)
    if not same_pulse:
        joint = np.abs(psi.amplitudes) ** 2
    else:
        # the undetected atom is either of the two same-pulse atoms with equal weight
        joint = np.zeros(4)
        for lost in same_pulse:
            keep = [k for k in range(n) if k != lost]
            joint += np.real(np.diag(partial_trace(psi, keep).matrix)) / len(same_pulse)
    # joint is indexed by (pulse-1 bit, pulse-2 bit) with 1 = excited
    p_gg, p_ge, p_eg, p_ee = joint
    return float(p_ee), float(p_gg), float(p_eg), float(p_ge)


def collision_probabilities_mixture(mix: CollisionMixture, lambda_t) -> tuple:
    """Mixture-weighted channel probabilities (P_ee, P_gg, P_eg, P_ge).

    Accepts a scalar or an array of lambda*t values.
    """
    lts = np.atleast_1d(np.asarray(lambda_t, dtype=float))
    out = np.zeros((lts.size, 4))
    for weight, channel in zip(mix.weights, _CHANNELS):
        if weight == 0:
            continue
        out += weight * np.array([channel_probabilities(channel, lt) for lt in lts])
    if np.ndim(lambda_t) == 0:
        return tuple(float(v) for v in out[0])
    return tuple(out[:, k] for k in range(4))


def fit_mixture_weights(grid: Iterable[float] | None = None) -> CollisionMixture:
    """Least-squares weights (summing to 1) that make the mixture model match the
    closed-form collision curves over ``grid``."""
    lts = np.linspace(0, 2 * np.pi, 721) if grid is None else np.asarray(list(grid), dtype=float)
    target = np.concatenate(collision_probabilities_closed_form(lts))
    basis = {
        ch: np.concatenate(np.array([channel_probabilities(ch, lt) for lt in lts]).T)
        for ch in _CHANNELS
    }
    # w_two_atom = 1 - w_first - w_second
    a = np.column_stack([basis["extra_first"] - basis["two_atom"], basis["extra_second"] - basis["two_atom"]])
    b = target - basis["two_atom"]
    (w1, w2), *_ = np.linalg.lstsq(a, b, rcond=None)
    return CollisionMixture(float(1 - w1 - w2), float(w1), float(w2))


def figure1_series(lambda_t_grid, mixture: CollisionMixture | None = None) -> SweepSeries:
    """Collision probabilities over a grid; with ``mixture`` also the first-principles curves."""
    grid = np.asarray(lambda_t_grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    p_ee, p_gg, p_eg, p_ge = collision_probabilities_closed_form(grid)
    cols = {"P_eg": p_eg, "P_ge": p_ge, "P_ee": p_ee, "P_gg": p_gg}
    meta = {"source": "closed_form"}
    if mixture is not None:
        m_ee, m_gg, m_eg, m_ge = collision_probabilities_mixture(mixture, grid)
        cols.update({"mix_P_eg": m_eg, "mix_P_ge": m_ge, "mix_P_ee": m_ee, "mix_P_gg": m_gg})
        meta["mixture"] = dict(zip(("w_two_atom", "w_extra_first", "w_extra_second"), mixture.weights))
    return SweepSeries("lambda_t", grid, cols, meta, probability_columns=tuple(cols))


# ---------------------------------------------------------------- timing error


PhaseMode = Literal["paper", "model"]


@dataclass(frozen=True)
class TimingRecord:
    lambda_t0: float
    fraction_late: float
    fraction_early: float
    phase_mode: str
    fidelity_late: float
    fidelity_early: float


def _early_exit_state(lambda_t0: float, f: float, phase_mode: PhaseMode) -> StateVector:
    lt1 = (1 - f) * lambda_t0
    if phase_mode == "paper":
        # transfer branch picks up exp(-i f lambda t0) while the excited atom is outside
        psi = analytic_w_evolution(3, lt1)
        amps = psi.amplitudes.copy()
        amps[[2, 4]] *= np.exp(-1j * f * lambda_t0)
        return StateVector(psi.basis, amps)
    if phase_mode == "model":
        psi = _vacuum_propagator(3).evolve(basis_state(BasisDescriptor(3), "001"), lt1)
        # atoms 0 and 1 stay inside and keep interacting; atom 2 has left the cavity
        h2 = vacuum_sector_hamiltonian(ModelParams.unit_exchange(2)).matrix
        pair = Operator(BasisDescriptor(3), np.kron(h2, np.eye(2)), hermitian=True)
        return Propagator(pair).evolve(psi, f * lambda_t0)
    raise ValueError(f"unknown phase_mode {phase_mode!r}")


def timing_error_study(
    lambda_t0: float = 2 * np.pi / 9,
    fraction_late: float = 0.1,
    fraction_early: float = 0.1,
    phase_mode: PhaseMode = "paper",
) -> TimingRecord:
    """Fidelity of the three-atom W preparation when the excited atom is out of step.

    Late entry: the two ground atoms idle alone in the vacuum cavity (no
    dynamics), so the result is W_3(t0 (1 - f)). Early exit: the excited
    atom leaves at t0 (1 - f) while the other two keep exchanging.
    """
    for f in (fraction_late, fraction_early):
        if not 0 <= f < 0.5:
            raise ValueError(f"fractions must lie in [0, 0.5), got {f}")
    ref = analytic_w_evolution(3, lambda_t0)
    late = analytic_w_evolution(3, (1 - fraction_late) * lambda_t0)
    early = _early_exit_state(lambda_t0, fraction_early, phase_mode)
    return TimingRecord(
        lambda_t0=lambda_t0,
        fraction_late=fraction_late,
        fraction_early=fraction_early,
        phase_mode=phase_mode,
        fidelity_late=abs(inner_product(late, ref)) ** 2,
        fidelity_early=abs(inner_product(early, ref)) ** 2,
    )


# ---------------------------------------------------------------- dispersive validity


@dataclass(frozen=True)
class ValidationPoint:
    ratio: float
    infidelity: float
    trajectory_max_infidelity: float
    photon_leakage: float
    flagged: bool


def validation_point(ratio: float, lambda_t: float, n: int = 2, samples_per_period: int = 16) -> ValidationPoint:
    """Full (static-frame) vs effective vacuum-sector evolution from |10...0>|0ph>.

    Uses g = 1 and delta = ratio, so the physical time is lambda_t * ratio.
    """
    params = ModelParams(n=n, g=1.0, delta=float(ratio))
    t = lambda_t / params.lam
    bits = "1" + "0" * (n - 1)
    atoms0 = basis_state(params.atom_basis, bits)
    full_prop = Propagator(static_frame_hamiltonian(params))
    eff_prop = Propagator(vacuum_sector_hamiltonian(params))

    psi_full = to_interaction_frame(full_prop.evolve(embed_vacuum(atoms0, params.fock_cutoff), t), params, t)
    psi_eff = embed_vacuum(eff_prop.evolve(atoms0, t), params.fock_cutoff)
    infidelity = max(0.0, 1 - abs(inner_product(psi_eff, psi_full)) ** 2)

    # resolve the fast photon oscillation (period ~ 2 pi / delta) along the whole run
    periods = params.delta * t / (2 * np.pi)
    samples = int(min(200_000, max(200, samples_per_period * np.ceil(periods))))
    times = np.linspace(0, t, samples)
    traj = full_prop.trajectory(embed_vacuum(atoms0, params.fock_cutoff), times)
    photons = np.real(photon_number(params.basis).matrix.diagonal())
    leakage = float(np.max(np.abs(traj) ** 2 @ photons))
    eff_traj = eff_prop.trajectory(atoms0, times)
    # zero-photon amplitudes are frame independent
    vac = traj.reshape(samples, -1, params.basis.fock_dim)[:, :, 0]
    overlaps = np.abs(np.sum(eff_traj.conj() * vac, axis=1)) ** 2
    return ValidationPoint(
        ratio=float(ratio),
        infidelity=float(infidelity),
        trajectory_max_infidelity=float(np.max(1 - overlaps)),
        photon_leakage=leakage,
        flagged=ratio < MIN_DISPERSIVE_RATIO,
    )


def dispersive_validation_sweep(
    ratios: Sequence[float], lambda_t: float, n: int = 2, workers: int | None = None
) -> SweepSeries:
    """Infidelity of the effective model and photon leakage versus delta/g.

    Rows with delta/g below ``MIN_DISPERSIVE_RATIO`` are computed but flagged.
    """
    ratios = [float(r) for r in ratios]
    if not ratios:
        raise ValueError("ratio list is empty")
    if min(ratios) <= 0:
        raise ValueError("ratios must be positive")
    points = _map_points(lambda r: validation_point(r, lambda_t, n), ratios, workers)
    cols = {
        "infidelity": [p.infidelity for p in points],
        "trajectory_max_infidelity": [p.trajectory_max_infidelity for p in points],
        "photon_leakage": [p.photon_leakage for p in points],
        "flagged": [float(p.flagged) for p in points],
    }
    return SweepSeries("delta_over_g", ratios, cols, {"n": n, "lambda_t": lambda_t})


def validation_property(series: SweepSeries) -> dict[str, bool]:
    """Checks of the dispersive sweep: infidelity at least halves each time the
    ratio doubles, and photon leakage decreases strictly with the ratio."""
    r = series.grid
    inf = series.columns["infidelity"]
    leak = series.columns["photon_leakage"]
    order = np.argsort(r)
    r, inf, leak = r[order], inf[order], leak[order]
    halving = all(
        inf[j] <= 0.5 * inf[i]
        for i in range(len(r))
        for j in range(len(r))
        if np.isclose(r[j], 2 * r[i])
    )
    return {
        "infidelity_halves_on_doubling": bool(halving),
        "leakage_decreasing": bool(np.all(np.diff(leak) < 0)),
    }


# ---------------------------------------------------------------- distillation


def distillation_scan(n: int, lambda_t_grid) -> SweepSeries:
    """Closed-form and measured success probability of distilling W_{n-1} from W_n(t),
    with the post-measurement W fidelity."""
    grid = np.asarray(lambda_t_grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    closed = np.array([distillation_probability(n, lt) for lt in grid])
    measured = np.zeros_like(closed)
    fidelity = np.zeros_like(closed)
    target = make_target("W", n - 1) if n - 1 >= 2 else None
    for i, lt in enumerate(grid):
        psi = analytic_w_evolution(n, lt)
        branch = psi.amplitudes.reshape((2,) * n)[..., 0]
        prob = float(np.sum(np.abs(branch) ** 2))
        measured[i] = prob
        if prob > 1e-12 and target is not None:
            fidelity[i] = fidelity_to(measure_atom(psi, n - 1, 0).post_state, target)
    cols = {"probability": closed, "measured_probability": measured, "post_w_fidelity": fidelity}
    return SweepSeries("lambda_t", grid, cols, {"n": n}, probability_columns=tuple(cols))
