"""Parallel trajectory ensembles.

Trajectories are cut into fixed chunks of ``chunk_size`` consecutive indices.
Chunks run in a process pool (or inline with one thread) and are merged in
submission order, so the aggregate never depends on the worker count.
"""
from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError
from .measurement.homodyne import quadrature_from_overlaps
from .simulation import BatchRecord, Simulation, propagate_batch

log = logging.getLogger(__name__)

WARN_DISCARD_FRACTION = 0.05
FAIL_DISCARD_FRACTION = 0.5
THREADS_ENV = "SIT_SQUEEZE_THREADS"


@dataclass
class TrajectorySet:
    """LO overlaps of every kept trajectory at each recorded z plus run bookkeeping."""

    sample_z: np.ndarray
    overlap: np.ndarray          # (n_used, n_records)
    overlap_dag: np.ndarray
    batch_ids: np.ndarray        # (n_used,)
    batch_count: int
    field_coupling: float
    group_velocity: float
    n_requested: int
    n_discarded: int
    wall_time: float = 0.0
    # Per-batch field sums over kept trajectories: (batch_count, n_records, n_t).
    field_sums: np.ndarray | None = None
    batch_sizes: np.ndarray | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def n_used(self) -> int:
        return int(self.overlap.shape[0])

    @property
    def discard_fraction(self) -> float:
        return self.n_discarded / self.n_requested if self.n_requested else 0.0

    def quadrature(self, thetas) -> np.ndarray:
        """M per trajectory, z sample and phase: shape (n_used, n_records, n_theta)."""
        return quadrature_from_overlaps(self.overlap, self.overlap_dag, np.atleast_1d(thetas))

    def mean_field(self) -> np.ndarray:
        """Ensemble-mean Omega at each recorded z, shape (n_records, n_t)."""
        if self.field_sums is None:
            raise ValueError("ensemble was run without keeping fields")
        return self.field_sums.sum(axis=0) / max(self.n_used, 1)

    def batch_mean_fields(self) -> np.ndarray:
        if self.field_sums is None or self.batch_sizes is None:
            raise ValueError("ensemble was run without keeping fields")
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.field_sums / self.batch_sizes[:, None, None]

    def report(self) -> dict[str, float]:
        return {"requested": self.n_requested, "discarded": self.n_discarded,
                "used": self.n_used, "discard_fraction": self.discard_fraction,
                "wall_time_s": self.wall_time}


def resolve_threads(threads: int | None) -> int:
    """Explicit value, else SIT_SQUEEZE_THREADS, else the CPU count."""
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    if threads < 1:
        raise ValueError(f"threads must be at least 1, got {threads}")
    return threads


def batch_of(indices: np.ndarray, n_traj: int, batch_count: int) -> np.ndarray:
    return (np.asarray(indices, dtype=np.int64) * batch_count) // n_traj


def _run_chunk(args: tuple[Simulation, int, int, bool]) -> BatchRecord:
    sim, start, stop, keep_fields = args
    return propagate_batch(sim, range(start, stop), keep_fields=keep_fields)


def _fold(rec: BatchRecord, field_sums: np.ndarray | None, n_traj: int,
          batch_count: int) -> BatchRecord:
    """Add the kept fields of *rec* to the per-batch sums and drop them from the record."""
    if field_sums is not None and rec.fields is not None:
        batches = batch_of(rec.indices, n_traj, batch_count)
        for row in np.flatnonzero(~rec.diverged):
            field_sums[batches[row]] += rec.fields[row]
    rec.fields = rec.fields_dag = None
    return rec


def run_ensemble(sim: Simulation, n_traj: int, *, threads: int | None = 1,
                 keep_fields: bool = False) -> TrajectorySet:
    """Run trajectories 0..n_traj-1 and aggregate their records.

    Raises DivergenceError when more than half are discarded or fewer than two survive.
    """
    if n_traj < 2:
        raise ValueError(f"n_traj must be at least 2, got {n_traj}")
    threads = resolve_threads(threads)
    batch_count = min(sim.batch_count, n_traj)
    chunks = [(sim, s, min(s + sim.chunk_size, n_traj), keep_fields)
              for s in range(0, n_traj, sim.chunk_size)]
    log.info("running %d trajectories in %d chunks on %d worker(s)", n_traj, len(chunks),
             threads)

    started = time.perf_counter()
    field_sums = (np.zeros((batch_count, sim.grid.sample_z.size, sim.grid.n_t), dtype=complex)
                  if keep_fields else None)
    records: list[BatchRecord] = []
    if threads == 1 or len(chunks) == 1:
        for chunk in chunks:
            records.append(_fold(_run_chunk(chunk), field_sums, n_traj, batch_count))
    else:
        with ProcessPoolExecutor(max_workers=min(threads, len(chunks))) as pool:
            for rec in pool.map(_run_chunk, chunks):
                records.append(_fold(rec, field_sums, n_traj, batch_count))
    wall = time.perf_counter() - started

    indices = np.concatenate([r.indices for r in records]).astype(np.int64)
    diverged = np.concatenate([r.diverged for r in records])
    keep = ~diverged
    batch_ids = batch_of(indices, n_traj, batch_count)
    n_discarded = int(np.count_nonzero(diverged))
    fraction = n_discarded / n_traj
    log.info("ensemble finished in %.1f s, %d discarded", wall, n_discarded)
    if fraction > FAIL_DISCARD_FRACTION or n_traj - n_discarded < 2:
        raise DivergenceError(f"{n_discarded} of {n_traj} trajectories diverged",
                              requested=n_traj, discarded=n_discarded)
    notes = []
    if fraction > WARN_DISCARD_FRACTION:
        note = f"{100 * fraction:.1f}% of trajectories diverged and were discarded"
        log.warning(note)
        notes.append(note)
    batch_sizes = (np.bincount(batch_ids[keep], minlength=batch_count).astype(float)
                   if keep_fields else None)

    return TrajectorySet(
        sample_z=sim.grid.sample_z,
        overlap=np.concatenate([r.lo_overlap for r in records])[keep],
        overlap_dag=np.concatenate([r.lo_overlap_dag for r in records])[keep],
        batch_ids=batch_ids[keep], batch_count=batch_count,
        field_coupling=sim.couplings.field_coupling, group_velocity=sim.group_velocity,
        n_requested=n_traj, n_discarded=n_discarded, wall_time=wall,
        field_sums=field_sums, batch_sizes=batch_sizes, warnings=notes)
