"""Radial grids, quadrature weights and complex radial fields.

A grid is a partition 0 = e_0 < e_1 < ... < e_J = R_max into cells with one
node per cell.  Quadrature weights are the exact cell masses of the radial
measure omega_{n-1} r^{n-1} dr, so integrating an indicator aligned with cell
edges is exact and smooth integrands are handled at second order.  A second
weight family integrates r^{n-3} per cell exactly (used by the Hardy term and
every |u|^2 / r^2 quadrature), so the r^{-2} weight is never sampled at a
node near the origin.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError

COARSE_J = 128  # below this many cells a grid is flagged as coarse


def surface_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n (omega_{n-1})."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class RadialGrid:
    n: int
    nodes: np.ndarray      # (J,) strictly increasing, all > 0
    weights: np.ndarray    # (J,) exact cell masses of omega r^{n-1} dr
    edges: np.ndarray      # (J+1,) cell boundaries, edges[0] == 0
    mapping: str           # "uniform" | "log"
    coarse: bool = False

    # derived weight families, filled in __post_init__
    hardy_weights: np.ndarray = field(default=None, repr=False)
    cell_masses: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        n, e = self.n, self.edges
        omega = surface_area(n)
        hw = omega * (e[1:] ** (n - 2) - e[:-1] ** (n - 2)) / (n - 2)
        cm = (e[1:] ** n - e[:-1] ** n) / n          # weights / omega
        object.__setattr__(self, "hardy_weights", hw)
        object.__setattr__(self, "cell_masses", cm)

    @property
    def J(self) -> int:
        return self.nodes.size

    @property
    def R_max(self) -> float:
        return float(self.edges[-1])

    @property
    def omega(self) -> float:
        return surface_area(self.n)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.real(np.sum(self.weights * values)))

    def ball_volume(self, rho: float) -> float:
        """Quadrature of the indicator of B(0, rho) (cells fully inside)."""
        return float(np.sum(self.weights[self.edges[1:] <= rho * (1 + 1e-15)]))

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.n}|{self.mapping}|{self.J}|{self.R_max!r}".encode())
        h.update(np.ascontiguousarray(self.nodes).tobytes())
        return h.hexdigest()[:16]


def build_grid(n: int, R_max: float, J: int, mapping: str = "uniform",
               r_min: float | None = None) -> RadialGrid:
    """Build a radial grid with exact cell-mass weights.

    Uniform grids have equispaced edges and nodes at cell midpoints.
    Log-mapped grids have geometric edges from ``r_min`` (default R_max*1e-4)
    to R_max, nodes at the geometric means of the edges; the innermost cell
    [0, r_min] gets the node r_min / sqrt(ratio) so the node ratio is a single
    constant throughout.
    """
    if J < 16:
        raise DomainError(f"J must be >= 16, got {J}")
    if not R_max > 0:
        raise DomainError(f"R_max must be positive, got {R_max}")
    if int(n) != n or n < 3:
        raise DomainError(f"n must be an integer >= 3, got {n}")
    n = int(n)
    if mapping == "uniform":
        edges = np.linspace(0.0, R_max, J + 1)
        nodes = 0.5 * (edges[:-1] + edges[1:])
    elif mapping == "log":
        rm = R_max * 1e-4 if r_min is None else float(r_min)
        if not 0 < rm < R_max:
            raise DomainError(f"r_min must lie in (0, R_max), got {rm}")
        inner = np.geomspace(rm, R_max, J)
        edges = np.concatenate(([0.0], inner))
        q = (R_max / rm) ** (1.0 / (J - 1))
        nodes = np.empty(J)
        nodes[1:] = np.sqrt(inner[:-1] * inner[1:])
        nodes[0] = nodes[1] / q
    else:
        raise DomainError(f"unknown mapping {mapping!r} (uniform|log)")
    omega = surface_area(n)
    weights = omega * (edges[1:] ** n - edges[:-1] ** n) / n
    if not np.all(np.diff(nodes) > 0) or not np.all(weights > 0):
        raise DomainError("grid construction produced non-monotone nodes or weights")
    return RadialGrid(n=n, nodes=nodes, weights=weights, edges=edges,
                      mapping=mapping, coarse=J < COARSE_J)


@dataclass
class RadialField:
    """Complex amplitude sampled at the grid nodes."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.nodes.shape:
            raise DomainError("field values must match the grid node count")

    def copy(self) -> "RadialField":
        return RadialField(self.grid, self.values.copy())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values.view(float))))

    @classmethod
    def from_function(cls, grid: RadialGrid, fn) -> "RadialField":
        return cls(grid, np.asarray(fn(grid.nodes), dtype=complex))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialField":
        return cls(grid, np.zeros(grid.J, dtype=complex))


def gaussian_field(grid: RadialGrid, amplitude: float = 1.0,
                   sigma: float = 1.0) -> RadialField:
    r = grid.nodes
    return RadialField(grid, amplitude * np.exp(-(r * r) / (2.0 * sigma * sigma)))


def bubble_field(grid: RadialGrid, scale: float = 1.0) -> RadialField:
    """(1 + r^2)^{-(n-2)/2}: the energy-critical decay-rate profile."""
    r = grid.nodes / scale
    return RadialField(grid, (1.0 + r * r) ** (-(grid.n - 2) / 2.0))


# ---------------------------------------------------------------------------
# Serialization: CSV (r, Re u, Im u) plus a JSON sidecar with grid metadata
# ---------------------------------------------------------------------------

FLOAT_FMT = "{:.17e}"


def write_field_csv(f: RadialField, path, meta: dict | None = None) -> None:
    path = str(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "re_u", "im_u"])
        for r, v in zip(f.grid.nodes, f.values):
            w.writerow([FLOAT_FMT.format(r), FLOAT_FMT.format(v.real),
                        FLOAT_FMT.format(v.imag)])
    sidecar = {
        "n": f.grid.n, "J": f.grid.J, "R_max": f.grid.R_max,
        "mapping": f.grid.mapping, "grid_hash": f.grid.content_hash(),
    }
    if meta:
        sidecar.update(meta)
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_field_csv(path) -> tuple:
    """Read (field, sidecar_dict); the grid is rebuilt from the sidecar."""
    path = str(path)
    with open(path + ".json") as fh:
        meta = json.load(fh)
    grid = build_grid(meta["n"], meta["R_max"], meta["J"], meta["mapping"])
    rows = []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if header[:3] != ["r", "re_u", "im_u"]:
            raise DomainError(f"unexpected field CSV header in {path}")
        for row in rd:
            rows.append((float(row[0]), float(row[1]), float(row[2])))
    arr = np.asarray(rows)
    if arr.shape[0] != grid.J or not np.allclose(arr[:, 0], grid.nodes,
                                                 rtol=1e-12, atol=1e-12):
        raise DomainError(f"field CSV nodes do not match sidecar grid in {path}")
    return RadialField(grid, arr[:, 1] + 1j * arr[:, 2]), meta
