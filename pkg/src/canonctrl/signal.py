"""Trajectories, the cut/shift/Hankel operators, and the excitation rank test.

Conventions used everywhere in the package:

* a trajectory is time-major: sample t (1-based) is a contiguous q-vector;
* every finite-horizon vector stacks samples in that interleaved time-major
  order, so a depth-L Hankel column reads
  (w_1(t), ..., w_q(t), w_1(t+1), ..., w_q(t+L-1)).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InfeasibleRankError, PartitionError
from .subspace import DEFAULT_RANK_TOL, RankTolerance


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A length-T, q-channel real time series, stored as a (T, q) array."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2:
            raise DimensionError(f"trajectory array must be (T, q), got {v.shape}")
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise DimensionError(f"trajectory needs T >= 1 and q >= 1, got {v.shape}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]

    def sample(self, t: int) -> np.ndarray:
        """The q-vector at 1-based time t."""
        if not 1 <= t <= self.T:
            raise ValueError(f"t={t} outside [1, {self.T}]")
        return self.values[t - 1].copy()


@dataclass(frozen=True)
class Partition:
    """Ordered split of channels {1, ..., total} into two disjoint blocks.

    The two blocks cover every channel exactly once.  For plant data the
    blocks are the to-be-controlled channels (picks_w) and the control
    channels (picks_c); a state-space model reuses the same container to
    place its inputs (picks_w slot) and outputs (picks_c slot) in the full
    variable vector, and there a block may be empty (autonomous or free
    systems).  Control splits must have both blocks nonempty; operations
    that rely on that check it via `require_control_split`.
    """

    total: int
    picks_w: tuple[int, ...]
    picks_c: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "picks_w", tuple(int(i) for i in self.picks_w))
        object.__setattr__(self, "picks_c", tuple(int(i) for i in self.picks_c))
        all_picks = self.picks_w + self.picks_c
        if sorted(all_picks) != list(range(1, self.total + 1)):
            raise PartitionError(
                f"picks {self.picks_w} + {self.picks_c} must partition 1..{self.total}"
            )

    def require_control_split(self) -> None:
        if not self.picks_w or not self.picks_c:
            raise PartitionError("control split needs both picks_w and picks_c nonempty")

    @property
    def n_w(self) -> int:
        return len(self.picks_w)

    @property
    def n_c(self) -> int:
        return len(self.picks_c)


def cut(w: Trajectory, L: int) -> Trajectory:
    """First L samples of w."""
    if not 1 <= L <= w.T:
        raise ValueError(f"L={L} outside [1, {w.T}]")
    return Trajectory(w.values[:L])


def shift(w: Trajectory, tau: int) -> Trajectory:
    """Samples tau..T of w (tau is 1-based; tau=1 is the identity)."""
    if not 1 <= tau <= w.T:
        raise ValueError(f"tau={tau} outside [1, {w.T}]")
    return Trajectory(w.values[tau - 1 :])


def hankel(w: Trajectory, L: int) -> np.ndarray:
    """Depth-L Hankel matrix of w, shape (q*L, T-L+1).

    Column j (1-based) is the window (w(j), ..., w(j+L-1)) stacked
    time-major with channels contiguous per sample.
    """
    if not 1 <= L <= w.T:
        raise ValueError(f"L={L} outside [1, {w.T}]")
    T, q = w.T, w.q
    cols = T - L + 1
    H = np.empty((q * L, cols))
    for j in range(cols):
        H[:, j] = w.values[j : j + L].reshape(-1)
    return H


def is_gpe(
    w: Trajectory,
    L: int,
    m_bound: int,
    n_bound: int,
    tol: RankTolerance = DEFAULT_RANK_TOL,
) -> tuple[bool, int]:
    """Excitation rank test: does rank H_L(w) equal m_bound*L + n_bound?

    m_bound and n_bound are caller-supplied input-count and order bounds for
    the generating system; the achieved rank is returned for diagnostics.
    """
    if m_bound < 0 or n_bound < 0:
        raise ValueError("bounds must be nonnegative")
    H = hankel(w, L)
    target = m_bound * L + n_bound
    if target > min(H.shape):
        raise InfeasibleRankError(
            f"target rank {target} exceeds min(H shape)={min(H.shape)}"
        )
    achieved = tol.rank(H)
    return achieved == target, achieved


def select_channels(w: Trajectory, picks: tuple[int, ...]) -> Trajectory:
    """Sub-trajectory of the 1-based channels `picks`, in the given order."""
    if not picks:
        raise PartitionError("cannot select an empty channel set")
    if any(not 1 <= p <= w.q for p in picks):
        raise PartitionError(f"picks {picks} outside 1..{w.q}")
    idx = [p - 1 for p in picks]
    return Trajectory(w.values[:, idx])


def stack_channels(first: Trajectory, second: Trajectory) -> Trajectory:
    """Channel-concatenate two trajectories of equal length."""
    if first.T != second.T:
        raise DimensionError(f"lengths differ: {first.T} vs {second.T}")
    return Trajectory(np.hstack([first.values, second.values]))


def arrange_by_partition(w: Trajectory, partition: Partition) -> Trajectory:
    """Reorder channels to (picks_w block, then picks_c block)."""
    partition.require_control_split()
    if w.q != partition.total:
        raise DimensionError(f"trajectory has {w.q} channels, partition {partition.total}")
    return Trajectory(w.values[:, [p - 1 for p in partition.picks_w + partition.picks_c]])


def channel_rows(picks: tuple[int, ...], q_total: int, L: int) -> np.ndarray:
    """Row indices (0-based) of the given channels inside a stacked L-window."""
    if any(not 1 <= p <= q_total for p in picks):
        raise PartitionError(f"picks {picks} outside 1..{q_total}")
    return np.array(
        [t * q_total + (p - 1) for t in range(L) for p in picks], dtype=int
    )


def write_csv(path, w: Trajectory, header: bool = True) -> None:
    """Write one row per sample, one column per channel, backed by repr floats."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        if header:
            writer.writerow([f"ch{i}" for i in range(1, w.q + 1)])
        for row in w.values:
            writer.writerow([repr(float(x)) for x in row])


def read_csv(path) -> Trajectory:
    """Read a trajectory CSV; a `ch1,...,chq` header is optional.

    Ragged rows are rejected.
    """
    rows: list[list[float]] = []
    width: int | None = None
    with open(path, newline="", encoding="utf-8") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            if not row:
                continue
            if lineno == 1 and row[0].strip().lower().startswith("ch"):
                width = len(row)
                continue
            try:
                vals = [float(x) for x in row]
            except ValueError as exc:
                raise ValueError(f"{path}: non-numeric entry on line {lineno}") from exc
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ValueError(
                    f"{path}: ragged row on line {lineno} ({len(vals)} != {width})"
                )
            rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return Trajectory(np.array(rows))
