from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """Uniform mesh of ``n`` cell centres ``x0 + i dx``."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if self.n < 3:
            raise ValueError("grid needs at least 3 cells")

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def length(self) -> float:
        return self.n * self.dx

    @classmethod
    def centered(cls, center: float, half_width: float, dx: float) -> "Grid1D":
        """Grid whose cell centres include ``center`` exactly and cover ``+-half_width``."""
        m = int(np.ceil(half_width / dx - 1e-9))
        return cls(center - m * dx, dx, 2 * m + 1)

    @classmethod
    def periodic(cls, x_start: float, length: float, n: int) -> "Grid1D":
        return cls(x_start, length / n, n)

    def index_of(self, x: float) -> int:
        return int(round((x - self.x0) / self.dx))

    def same_as(self, other: "Grid1D") -> bool:
        return self.n == other.n and np.isclose(self.dx, other.dx) and np.isclose(self.x0, other.x0)


def integrate(values: np.ndarray, dx: float) -> float:
    return float(np.sum(values) * dx)


def bin_masses(x: np.ndarray, mass: np.ndarray, edges: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Sum point masses at sorted positions ``x`` into bins with the given edges.

    A mass sitting on an interior edge (within ``tol``) is split evenly between
    the two neighbouring bins; masses on the outer edges belong to the end bins.
    """
    x = np.asarray(x, float)
    mass = np.asarray(mass, float)
    edges = np.asarray(edges, float)
    if tol is None:
        tol = 1e-9 * (np.min(np.diff(x)) if x.size > 1 else 1.0)
    csum = np.concatenate([[0.0], np.cumsum(mass)])
    below = csum[np.searchsorted(x, edges - tol, side="left")]
    upto = csum[np.searchsorted(x, edges + tol, side="right")]
    F = 0.5 * (below + upto)
    F[0] = below[0]
    F[-1] = upto[-1]
    return np.diff(F)
