"""CSV and legacy-VTK writers for snapshots and convergence tables."""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Sequence

import numpy as np

from .grid import Mesh

SNAPSHOT_COLUMNS = ("x", "y", "rho", "u", "v", "T", "p")
TABLE_COLUMNS = ("N", "L1", "L1_order", "Linf", "Linf_order")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def snapshot_csv(Q, mesh: Mesh, t=None) -> str:
    """Snapshot of primitive ``Q`` as CSV text, one row per cell (i outer, j inner)."""
    buf = io.StringIO()
    buf.write(f"# nx={mesh.nx} ny={mesh.ny}" + ("" if t is None else f" t={_fmt(t)}") + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SNAPSHOT_COLUMNS)
    X, Y = np.meshgrid(mesh.xc, mesh.yc, indexing="ij")
    cols = [X, Y, Q[0], Q[1], Q[2], Q[3], Q[0] * Q[3]]
    for row in zip(*(c.ravel() for c in cols)):
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(Q, mesh: Mesh, path, t=None):
    path = Path(path)
    path.write_text(snapshot_csv(Q, mesh, t), encoding="utf-8")
    return path


def read_csv(path):
    """Read a snapshot written by :func:`write_csv`.

    Returns ``(Q, x_centers, y_centers, t)`` with ``Q`` of shape ``(4, nx, ny)``.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta = dict(item.split("=") for item in lines[0].lstrip("# ").split())
    nx, ny = int(meta["nx"]), int(meta["ny"])
    rows = list(csv.reader(lines[2:]))
    data = np.array([[float(v) for v in r] for r in rows]).T
    grid = data.reshape(len(SNAPSHOT_COLUMNS), nx, ny)
    t = float(meta["t"]) if "t" in meta else None
    return grid[2:6].copy(), grid[0, :, 0].copy(), grid[1, 0, :].copy(), t


def write_table_csv(rows: Sequence, path):
    """Convergence table (N, L1, order, Linf, order) as CSV."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.N), _fmt(r.L1), _fmt(r.L1_order), _fmt(r.Linf), _fmt(r.Linf_order)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")
    return Path(path)


def vtk_text(Q, mesh: Mesh, title="relaxflux snapshot") -> str:
    """Legacy ASCII rectilinear grid with cell data rho, T, p and velocity."""
    nx, ny = mesh.shape
    out = ["# vtk DataFile Version 3.0", title[:255], "ASCII", "DATASET RECTILINEAR_GRID",
           f"DIMENSIONS {nx + 1} {ny + 1} 1"]

    def coords(label, values):
        out.append(f"{label} {len(values)} double")
        out.append(" ".join(_fmt(v) for v in values))

    coords("X_COORDINATES", mesh.x_faces)
    coords("Y_COORDINATES", mesh.y_faces)
    coords("Z_COORDINATES", [0.0])
    out.append(f"CELL_DATA {nx * ny}")
    # VTK orders cells with x varying fastest
    for name, arr in (("density", Q[0]), ("temperature", Q[3]), ("pressure", Q[0] * Q[3])):
        out.append(f"SCALARS {name} double 1")
        out.append("LOOKUP_TABLE default")
        out.extend(_fmt(v) for v in arr.T.ravel())
    out.append("VECTORS velocity double")
    for u, v in zip(Q[1].T.ravel(), Q[2].T.ravel()):
        out.append(f"{_fmt(u)} {_fmt(v)} 0")
    return "\n".join(out) + "\n"


def write_vtk(Q, mesh: Mesh, path, title="relaxflux snapshot"):
    path = Path(path)
    path.write_text(vtk_text(Q, mesh, title), encoding="ascii")
    return path
