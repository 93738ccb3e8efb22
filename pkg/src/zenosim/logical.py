"""Logical-qubit encodings inside the projected eigenspaces.

Two-spin register: one logical qubit in the <XX> = +1 subspace with
|0>_L = |X,X>, |1>_L = |-X,-X>, logical Z = XI and logical X = ZZ.
Three-spin register: two logical qubits in the <XXX> = +1 subspace with
Z_L1 = XIX, X_L1 = IZZ, Z_L2 = IXX, X_L2 = ZIZ.

All logical operators commute with the projected observable, so the
projection channel preserves every logical expectation value exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Tuple

import numpy as np

from .spins import expectation, num_spins, product_ket, state_fidelity

_SQ2 = np.sqrt(2.0)


def _bell2() -> Mapping[str, np.ndarray]:
    zero = product_ket(["X", "X"])
    one = product_ket(["-X", "-X"])
    return {
        "0L": zero,
        "1L": one,
        "+L": (zero + one) / _SQ2,
        "-L": (zero - one) / _SQ2,
        "+iL": (zero + 1j * one) / _SQ2,
        "-iL": (zero - 1j * one) / _SQ2,
    }


def _basis3() -> Mapping[str, np.ndarray]:
    b00 = product_ket(["X", "X", "X"])
    b10 = product_ket(["X", "-X", "-X"])
    b11 = product_ket(["-X", "-X", "X"])
    return {
        "00L": b00,
        "X0L": (b00 + b10) / _SQ2,
        "PhiPlusL": (b00 + b11) / _SQ2,
    }


_STATES_2 = _bell2()
_STATES_3 = _basis3()

CARDINAL_2SPIN = ("0L", "1L", "+L", "-L", "+iL", "-iL")
ENTANGLED_2SPIN = ("+L", "-L", "+iL", "-iL")
LOGICAL_3SPIN = ("00L", "X0L", "PhiPlusL")

LOGICAL_OPS_2SPIN = {"Z": ("XI", 1.0), "X": ("ZZ", 1.0), "Y": ("YZ", -1.0)}
LOGICAL_OPS_3SPIN = {
    "Z1": ("XIX", 1.0), "X1": ("IZZ", 1.0),
    "Z2": ("IXX", 1.0), "X2": ("ZIZ", 1.0),
}

# Per-label correlator components of the restricted logical fidelity:
# F = (1 + sum coeff * <word>) / 2**m with m read-out logical qubits.
# Signs fold together the Pauli-product phase (e.g. Y_L = -YZ) and the
# target's stabilizer eigenvalue.
_COMPONENTS = {
    "0L": (("XI", 1.0),),
    "1L": (("XI", -1.0),),
    "+L": (("ZZ", 1.0),),
    "-L": (("ZZ", -1.0),),
    "+iL": (("YZ", -1.0),),
    "-iL": (("YZ", 1.0),),
    "00L": (("XIX", 1.0), ("IXX", 1.0), ("XXI", 1.0)),
    "X0L": (("IZZ", 1.0), ("IXX", 1.0), ("IYY", -1.0)),
    "PhiPlusL": (("ZZI", 1.0), ("XXI", 1.0), ("YYI", -1.0)),
}


def logical_state_2spin(label: str) -> np.ndarray:
    """Density matrix of a two-spin logical cardinal state."""
    if label not in _STATES_2:
        raise ValueError(f"unknown two-spin logical label {label!r}")
    psi = _STATES_2[label]
    return np.outer(psi, psi.conj())


def logical_state_3spin(label: str) -> np.ndarray:
    """Density matrix of a three-spin two-logical-qubit state."""
    if label not in _STATES_3:
        raise ValueError(f"unknown three-spin logical label {label!r}")
    psi = _STATES_3[label]
    return np.outer(psi, psi.conj())


def logical_target(label: str) -> np.ndarray:
    """Pure target state vector for a logical label (either register size)."""
    if label in _STATES_2:
        return _STATES_2[label]
    if label in _STATES_3:
        return _STATES_3[label]
    raise ValueError(f"unknown logical label {label!r}")


def resolve_state(spec: str) -> np.ndarray:
    """State vector from a spec: comma-separated product labels or a logical label.

    Examples: "X,X,X" (product state), "+iL" (two-spin logical), "PhiPlusL".
    """
    if "," in spec:
        return product_ket([s.strip() for s in spec.split(",")])
    if spec in _STATES_2 or spec in _STATES_3:
        return logical_target(spec)
    return product_ket([spec.strip()])


def logical_components(label: str) -> Tuple[Tuple[str, float], ...]:
    """(correlator word, coefficient) pairs of the restricted logical fidelity."""
    if label not in _COMPONENTS:
        raise ValueError(f"unknown logical label {label!r}")
    return _COMPONENTS[label]


def logical_fidelity(rho: np.ndarray, label: str) -> float:
    """Full-state fidelity of rho with the pure logical target state."""
    return state_fidelity(rho, logical_target(label))


def logical_pauli_fidelity(rho: np.ndarray, label: str) -> float:
    """Logical fidelity from logical-operator expectations only.

    F = (1 + sum coeff * <word>) / 2**m. Coincides with the full-state
    fidelity for states inside the projected subspace but treats the
    subspace projector as resolved, e.g. the maximally mixed two-spin
    state has logical fidelity 1/2 while its full-state fidelity is 1/4.
    """
    comps = logical_components(label)
    m = 1 if len(comps) == 1 else 2
    total = sum(coeff * expectation(rho, word) for word, coeff in comps)
    return (1.0 + total) / 2.0**m


def components_to_fidelity(label: str, values: Mapping[str, float]) -> float:
    """Restricted logical fidelity from pre-measured correlator means."""
    comps = logical_components(label)
    m = 1 if len(comps) == 1 else 2
    total = sum(coeff * values[word] for word, coeff in comps)
    return (1.0 + total) / 2.0**m


@dataclass(frozen=True)
class FidelityFlags:
    """Threshold flags for a measured state fidelity."""

    beats_classical_memory: bool
    witnesses_entanglement: bool


def thresholds(fidelity: float, bell_type: bool = True) -> FidelityFlags:
    """Classical-memory (2/3) and entanglement-witness (1/2) flags.

    The entanglement witness applies to Bell-type two-spin targets only;
    pass bell_type=False to suppress it. Both comparisons are strict.
    """
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError(f"fidelity {fidelity} outside [0, 1]")
    return FidelityFlags(
        beats_classical_memory=fidelity > 2.0 / 3.0,
        witnesses_entanglement=bell_type and fidelity > 0.5,
    )
