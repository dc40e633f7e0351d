"""Simulated balanced homodyne detection on positive-P field samples.

The quadrature is the LO overlap
``M(theta) = dtau * sum(f Omega+ e^{i theta} + f* Omega e^{-i theta})``.
Per trajectory only the two overlaps ``a = dtau sum(f* Omega)`` and
``b = dtau sum(f Omega+)`` are needed, so M at any phase is ``b e^{i theta} + a e^{-i theta}``.
"""
from __future__ import annotations

import numpy as np

from ..physics.field import FieldSlice


def local_oscillator(omega: np.ndarray, dtau: float) -> np.ndarray:
    """Input pulse shape normalized so that dtau * sum |f|^2 = 1."""
    omega = np.asarray(omega, dtype=complex)
    norm = np.sqrt(dtau * np.sum(np.abs(omega) ** 2))
    if norm == 0:
        raise ValueError("local oscillator shape is identically zero")
    return omega / norm


def lo_overlaps(omega: np.ndarray, omega_dag: np.ndarray, lo: np.ndarray,
                dtau: float) -> tuple[np.ndarray, np.ndarray]:
    """(dtau sum f* Omega, dtau sum f Omega+) over the last (tau) axis."""
    return dtau * (omega @ np.conj(lo)), dtau * (omega_dag @ lo)


def quadrature_M(field: FieldSlice, lo: np.ndarray, theta: float, dtau: float) -> complex:
    a, b = lo_overlaps(field.omega, field.omega_dag, lo, dtau)
    return b * np.exp(1j * theta) + a * np.exp(-1j * theta)


def quadrature_from_overlaps(overlap: np.ndarray, overlap_dag: np.ndarray,
                             thetas: np.ndarray | float) -> np.ndarray:
    """M for every phase; a trailing theta axis is appended to the overlap shape."""
    phase = np.exp(1j * np.asarray(thetas, dtype=float))
    return (np.asarray(overlap_dag)[..., None] * phase
            + np.asarray(overlap)[..., None] * np.conj(phase))


def positive_p_variance(m: np.ndarray, axis: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Normally ordered variance Re(<M^2> - <M>^2) and the imaginary-part diagnostic.

    The diagnostic is |Im| / |Re| of the same moment combination; it vanishes for
    an exact ensemble and measures sampling noise otherwise.
    """
    m = np.asarray(m)
    if m.shape[axis] < 2:
        raise ValueError("at least two non-discarded trajectories are needed for a variance")
    mean = np.mean(m, axis=axis)
    moment = np.mean(m**2, axis=axis) - mean**2
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(moment.imag) / np.abs(moment.real)
    return moment.real, np.nan_to_num(ratio, nan=0.0, posinf=np.inf)


def squeezing_ratio(m: np.ndarray, field_coupling: float, group_velocity: float,
                    axis: int = 0) -> np.ndarray:
    """S = 1 + v_g Var / (4 G); the commutator term restores the shot-noise floor."""
    if field_coupling <= 0:
        raise ValueError("field coupling must be positive to normalize the shot noise")
    var, _ = positive_p_variance(m, axis=axis)
    return 1.0 + group_velocity * var / (4.0 * field_coupling)


def to_decibels(s):
    """10 log10(S); S must be positive."""
    arr = np.asarray(s, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError(f"squeezing ratio must be positive to express in dB, got {s}")
    out = 10.0 * np.log10(arr)
    return float(out) if out.ndim == 0 else out


def batch_estimates(values: np.ndarray, batch_ids: np.ndarray, n_batches: int, statistic,
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Apply *statistic* to all samples and to each batch; return (estimate, stderr).

    The standard error is the spread of the per-batch estimates over sqrt(n_batches).
    """
    values = np.asarray(values)
    batch_ids = np.asarray(batch_ids)
    estimate = statistic(values)
    per_batch = [statistic(values[batch_ids == b]) for b in range(n_batches)
                 if np.count_nonzero(batch_ids == b) >= 2]
    if len(per_batch) < 2:
        return estimate, np.full(np.shape(estimate), np.nan)
    stack = np.stack(per_batch)
    stderr = np.std(stack, axis=0, ddof=1) / np.sqrt(len(per_batch))
    return estimate, stderr
