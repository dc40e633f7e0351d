"""Squeezing ratio over propagation length and LO phase."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .homodyne import batch_estimates, positive_p_variance, squeezing_ratio

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Optimum:
    z: float
    theta: float
    S: float
    stderr: float

    @property
    def S_dB(self) -> float:
        return 10.0 * np.log10(self.S) if self.S > 0 else float("nan")


@dataclass
class SqueezingSurface:
    """S(z_i, theta_j) with batch-means standard errors."""

    z: np.ndarray          # (n_z,)
    theta: np.ndarray      # (n_theta,)
    S: np.ndarray          # (n_z, n_theta)
    stderr: np.ndarray
    n_traj_used: int
    n_discarded: int
    imag_ratio: float = 0.0
    n_clipped: int = 0

    @classmethod
    def from_trajectories(cls, ts, thetas) -> SqueezingSurface:
        """Evaluate S at every recorded z and every phase of *thetas* for a TrajectorySet."""
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        m = ts.quadrature(thetas)

        def statistic(values: np.ndarray) -> np.ndarray:
            return squeezing_ratio(values, ts.field_coupling, ts.group_velocity, axis=0)

        s, err = batch_estimates(m, ts.batch_ids, ts.batch_count, statistic)
        _, ratio = positive_p_variance(m, axis=0)
        clipped = int(np.count_nonzero(s <= 0))
        if clipped:
            log.warning("%d surface entries have S <= 0 (sampling noise) and are clipped to 0",
                        clipped)
            s = np.maximum(s, 0.0)
        finite = ratio[np.isfinite(ratio)]
        return cls(z=np.asarray(ts.sample_z, dtype=float), theta=thetas, S=s, stderr=err,
                   n_traj_used=ts.n_used, n_discarded=ts.n_discarded,
                   imag_ratio=float(finite.max()) if finite.size else 0.0, n_clipped=clipped)

    @property
    def S_dB(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(self.S > 0, 10.0 * np.log10(np.where(self.S > 0, self.S, 1.0)),
                            np.nan)

    def find_optimum(self) -> Optimum:
        """Global minimum; ties go to the smaller z, then to theta closest to 0."""
        best = np.min(self.S)
        rows, cols = np.nonzero(self.S == best)
        order = np.lexsort((np.abs(self.theta[cols]), self.z[rows]))
        i, j = rows[order[0]], cols[order[0]]
        return Optimum(z=float(self.z[i]), theta=float(self.theta[j]), S=float(best),
                       stderr=float(self.stderr[i, j]))

    def optimum_over_length(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """For each phase: (best S over z, its stderr, the z where it occurs)."""
        idx = np.argmin(self.S, axis=0)
        cols = np.arange(self.theta.size)
        return self.S[idx, cols], self.stderr[idx, cols], self.z[idx]

    def along_length(self, theta: float) -> tuple[np.ndarray, np.ndarray]:
        """S(z) and stderr at the sampled phase nearest *theta*."""
        j = int(np.argmin(np.abs(self.theta - theta)))
        return self.S[:, j], self.stderr[:, j]

    def angle_by_length(self) -> np.ndarray:
        """Best phase at each z."""
        return self.theta[np.argmin(self.S, axis=1)]

    def to_dict(self) -> dict:
        opt = self.find_optimum()
        return {
            "z_opt_m": opt.z, "theta_opt_rad": opt.theta, "S_opt": opt.S,
            "S_opt_dB": opt.S_dB, "stderr_opt": opt.stderr,
            "n_traj_used": self.n_traj_used, "n_discarded": self.n_discarded,
            "max_imag_ratio": self.imag_ratio, "clipped_entries": self.n_clipped,
        }

    def summary(self) -> str:
        opt = self.find_optimum()
        return (f"S* = {opt.S:.4f} ± {opt.stderr:.4f} ({opt.S_dB:+.2f} dB) at "
                f"z = {1e3 * opt.z:.2f} mm, theta = {opt.theta:+.3f} rad "
                f"[{self.n_traj_used} trajectories, {self.n_discarded} discarded]")
