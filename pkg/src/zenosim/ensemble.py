"""Monte-Carlo simulation of dephasing interrupted by repeated projections.

Each shot draws one quasi-static detuning vector, evolves the register
through N+1 free segments separated by N projections of the chosen joint
observable, and evaluates the requested read-outs on the final density
matrix. Detunings are derived counter-based from (seed, shot, point), so
results are reproducible independent of execution order or batching.

The public entry points are :func:`run_shot` (scalar reference path) and
:func:`run_ensemble` (batched over shots, numerically equivalent).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .logical import resolve_state
from .spins import (basis_signs, dephasing_phases, evolve_dephasing,
                    ket_to_density, num_spins, pauli_matrix, validate_word)
from .channel import project

FIDELITY_PREFIX = "F:"


@dataclass(frozen=True)
class NoiseModel:
    """Per-spin Gaussian dephasing times T2* in ms."""

    t2_star: Tuple[float, ...]

    def __post_init__(self):
        if len(self.t2_star) == 0:
            raise ValueError("need at least one dephasing time")
        if any(t <= 0 for t in self.t2_star):
            raise ValueError("dephasing times must be positive")

    @property
    def sigma(self) -> np.ndarray:
        """Detuning widths sqrt(2)/T2* in rad/ms."""
        return np.sqrt(2.0) / np.asarray(self.t2_star)


@dataclass(frozen=True)
class ExperimentPlan:
    """Full description of one simulated projection experiment.

    readout entries are Pauli words ("XX") for correlators or "F:<spec>"
    for state fidelity with a resolvable state spec (see resolve_state).
    amplitude/offset are carried for analysis-time comparison curves only.
    """

    noise: NoiseModel
    initial_state: str
    observable: str
    readout: Tuple[str, ...]
    n_projections: int
    tau_grid: Tuple[float, ...]
    shots: int
    seed: int
    amplitude: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        validate_word(self.observable)
        if len(self.observable) != self.k:
            raise ValueError("observable length must match register size")
        if self.n_projections < 0:
            raise ValueError("projection count must be >= 0")
        if self.shots < 1:
            raise ValueError("need at least one shot")
        taus = np.asarray(self.tau_grid, dtype=float)
        if taus.size == 0 or np.any(taus < 0) or np.any(np.diff(taus) <= 0):
            raise ValueError("tau grid must be nonempty, nonnegative, strictly increasing")
        if not self.readout:
            raise ValueError("need at least one readout")
        for r in self.readout:
            if not r.startswith(FIDELITY_PREFIX):
                validate_word(r)

    @property
    def k(self) -> int:
        return len(self.noise.t2_star)


@dataclass(frozen=True)
class DecayCurve:
    """Ensemble mean and standard error per evolution time for one readout."""

    tau: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n_projections: int
    readout: str
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not (len(self.tau) == len(self.mean) == len(self.stderr)):
            raise ValueError("tau/mean/stderr length mismatch")
        if np.any(self.stderr < 0):
            raise ValueError("standard errors must be nonnegative")


def sample_detunings(seed: int, shot_index: int, point_index: int,
                     noise: NoiseModel) -> np.ndarray:
    """Quasi-static detuning vector for one shot, counter-based.

    The stream is keyed by the seed with (shot, point) as the block
    counter, so identical inputs give identical draws in any execution
    order. Draws are zero-mean Gaussians of width sqrt(2)/T2* per spin.
    """
    bg = np.random.Philox(
        key=np.uint64(seed),
        counter=[0, 0, np.uint64(shot_index), np.uint64(point_index)],
    )
    raw = np.random.Generator(bg).standard_normal(len(noise.t2_star))
    return raw * noise.sigma


def _readout_evaluators(plan: ExperimentPlan):
    """Per-readout (matrix-or-ket, is_fidelity) pairs."""
    out = []
    for r in plan.readout:
        if r.startswith(FIDELITY_PREFIX):
            psi = resolve_state(r[len(FIDELITY_PREFIX):])
            if psi.shape != (2**plan.k,):
                raise ValueError(f"fidelity target {r!r} has wrong register size")
            out.append((psi, True))
        else:
            if len(r) != plan.k:
                raise ValueError(f"readout word {r!r} has wrong register size")
            out.append((pauli_matrix(r), False))
    return out


def run_shot(plan: ExperimentPlan, deltas: Sequence[float], tau: float) -> np.ndarray:
    """Deterministic single-shot readout values for fixed detunings.

    Prepares the initial state, alternates N+1 free segments of duration
    tau/(N+1) with N instantaneous projections of the plan observable, and
    evaluates each readout on the final density matrix.
    """
    if tau < 0:
        raise ValueError("negative evolution time")
    rho = ket_to_density(resolve_state(plan.initial_state))
    if num_spins(rho) != plan.k:
        raise ValueError("initial state does not match register size")
    seg = tau / (plan.n_projections + 1)
    for _ in range(plan.n_projections):
        rho = evolve_dephasing(rho, deltas, seg)
        rho = project(plan.observable, rho)
    rho = evolve_dephasing(rho, deltas, seg)

    vals = np.empty(len(plan.readout))
    for i, (target, is_fid) in enumerate(_readout_evaluators(plan)):
        if is_fid:
            vals[i] = (target.conj() @ rho @ target).real
        else:
            vals[i] = np.trace(rho @ target).real
    return vals


def _run_point(plan: ExperimentPlan, deltas: np.ndarray, tau: float,
               evaluators) -> np.ndarray:
    """Batched readout values, shape (shots, n_readouts), for one tau point."""
    k = plan.k
    dim = 2**k
    shots = deltas.shape[0]
    psi0 = resolve_state(plan.initial_state)
    rho = np.broadcast_to(np.outer(psi0, psi0.conj()), (shots, dim, dim)).copy()

    seg = tau / (plan.n_projections + 1)
    signs = basis_signs(k)
    phases = np.exp(-0.5j * seg * deltas @ signs.T)  # (shots, dim)
    obs = pauli_matrix(plan.observable)

    def evolve(r):
        return phases[:, :, None] * r * phases.conj()[:, None, :]

    for _ in range(plan.n_projections):
        rho = evolve(rho)
        rho = (rho + obs[None] @ rho @ obs[None]) / 2
    rho = evolve(rho)

    vals = np.empty((shots, len(evaluators)))
    for i, (target, is_fid) in enumerate(evaluators):
        if is_fid:
            vals[:, i] = np.einsum("i,sij,j->s", target.conj(), rho, target).real
        else:
            vals[:, i] = np.einsum("sij,ji->s", rho, target).real
    return vals


def run_ensemble(plan: ExperimentPlan) -> List[DecayCurve]:
    """Simulate the full tau grid; one DecayCurve per readout.

    Detunings are drawn once per (shot, point) and held fixed within the
    shot. Output is deterministic for a given plan.
    """
    evaluators = _readout_evaluators(plan)
    taus = np.asarray(plan.tau_grid, dtype=float)
    means = np.empty((taus.size, len(plan.readout)))
    errs = np.empty_like(means)
    for p, tau in enumerate(taus):
        deltas = np.stack([
            sample_detunings(plan.seed, s, p, plan.noise)
            for s in range(plan.shots)
        ])
        vals = _run_point(plan, deltas, float(tau), evaluators)
        means[p] = vals.mean(axis=0)
        if plan.shots > 1:
            errs[p] = vals.std(axis=0, ddof=1) / np.sqrt(plan.shots)
        else:
            errs[p] = 0.0
    meta = {
        "t2_star": list(plan.noise.t2_star),
        "initial_state": plan.initial_state,
        "observable": plan.observable,
        "n_projections": plan.n_projections,
        "shots": plan.shots,
        "seed": plan.seed,
        "amplitude": plan.amplitude,
        "offset": plan.offset,
    }
    return [
        DecayCurve(taus.copy(), means[:, i].copy(), errs[:, i].copy(),
                   plan.n_projections, plan.readout[i],
                   dict(meta, readout=plan.readout[i]))
        for i in range(len(plan.readout))
    ]
