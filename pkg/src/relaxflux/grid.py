"""Rectangular meshes, ghost frames and boundary conditions.

Fields are stored as ``(ncomp, nx + 2G, ny + 2G)`` arrays with ``G = 2``
ghost layers on every side; index ``[:, G + i, G + j]`` is interior cell
``(i, j)``. Boundary conditions act on primitive variables ``(rho, u, v, T)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq

G = 2
SIDES = ("left", "right", "bottom", "top")


@dataclass(frozen=True)
class Mesh:
    x_faces: np.ndarray
    y_faces: np.ndarray

    def __post_init__(self):
        xf = np.asarray(self.x_faces, dtype=float)
        yf = np.asarray(self.y_faces, dtype=float)
        for name, f in (("x", xf), ("y", yf)):
            if f.ndim != 1 or f.size < 2:
                raise ValueError(f"{name}_faces needs at least two entries")
            if np.any(np.diff(f) <= 0):
                raise ValueError(f"{name}_faces must be strictly increasing")
        object.__setattr__(self, "x_faces", xf)
        object.__setattr__(self, "y_faces", yf)

    @property
    def nx(self) -> int:
        return self.x_faces.size - 1

    @property
    def ny(self) -> int:
        return self.y_faces.size - 1

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nx, self.ny

    @cached_property
    def dx(self):
        return np.diff(self.x_faces)

    @cached_property
    def dy(self):
        return np.diff(self.y_faces)

    @cached_property
    def xc(self):
        return 0.5 * (self.x_faces[1:] + self.x_faces[:-1])

    @cached_property
    def yc(self):
        return 0.5 * (self.y_faces[1:] + self.y_faces[:-1])

    @cached_property
    def area(self):
        return np.outer(self.dx, self.dy)

    @property
    def extent(self):
        return (self.x_faces[0], self.x_faces[-1], self.y_faces[0], self.y_faces[-1])

    # ghost cells copy the size of the interior cell they mirror
    @cached_property
    def dx_padded(self):
        return _pad_sizes(self.dx)

    @cached_property
    def dy_padded(self):
        return _pad_sizes(self.dy)

    @cached_property
    def xc_padded(self):
        return _pad_centers(self.x_faces, self.dx_padded)

    @cached_property
    def yc_padded(self):
        return _pad_centers(self.y_faces, self.dy_padded)

    @cached_property
    def dx_face(self):
        """Interface spacings ``0.5 (dx_i + dx_{i+1})`` for the nx + 1 x-faces."""
        d = self.dx_padded
        return 0.5 * (d[G - 1:G + self.nx] + d[G:G + self.nx + 1])

    @cached_property
    def dy_face(self):
        d = self.dy_padded
        return 0.5 * (d[G - 1:G + self.ny] + d[G:G + self.ny + 1])

    @property
    def hmin(self) -> float:
        return float(min(self.dx.min(), self.dy.min()))


def _pad_sizes(d):
    k = np.minimum(np.arange(G), d.size - 1)
    return np.concatenate([d[k][::-1], d, d[::-1][k]])


def _pad_centers(faces, dpad):
    left = faces[0] - np.cumsum(dpad[:G][::-1])[::-1]
    right = faces[-1] + np.cumsum(dpad[-G:])
    allfaces = np.concatenate([left, faces, right])
    return 0.5 * (allfaces[1:] + allfaces[:-1])


def geometric_segment(start, end, n, first, cluster="start"):
    """Faces of ``n`` cells on ``[start, end]`` growing geometrically.

    The smallest cell has size ``first`` and sits at the ``cluster`` end.
    """
    length = end - start
    if first * n > length * (1 + 1e-12):
        raise ValueError("first cell too large for a stretched segment")
    if abs(first * n - length) < 1e-12 * length:
        sizes = np.full(n, first)
    else:
        def total(r):
            return first * (r ** n - 1.0) / (r - 1.0) - length
        r = brentq(total, 1.0 + 1e-12, 10.0, xtol=1e-15)
        sizes = first * r ** np.arange(n)
    if cluster == "end":
        sizes = sizes[::-1]
    faces = start + np.concatenate([[0.0], np.cumsum(sizes)])
    faces[-1] = end
    return faces


def build_mesh(spec) -> Mesh:
    """Build a mesh from a description.

    Accepted forms (a dict, or an existing :class:`Mesh`)::

        {"extent": (x0, x1, y0, y1), "n": (nx, ny)}
        {"x_faces": [...], "y_faces": [...]}
        {"x_segments": [(a, b, n, first, cluster), ...], "y_segments": [...]}

    Segment tuples with ``first=None`` are uniform. Forms can be mixed per
    axis, e.g. ``x_faces`` with ``y_segments``.
    """
    if isinstance(spec, Mesh):
        return spec
    faces = []
    for k, axis in enumerate("xy"):
        if f"{axis}_faces" in spec:
            faces.append(np.asarray(spec[f"{axis}_faces"], dtype=float))
        elif f"{axis}_segments" in spec:
            parts = []
            for seg in spec[f"{axis}_segments"]:
                a, b, n, first, cluster = (tuple(seg) + (None, "start"))[:5]
                if first is None:
                    part = np.linspace(a, b, int(n) + 1)
                else:
                    part = geometric_segment(a, b, int(n), first, cluster)
                parts.append(part if not parts else part[1:])
            faces.append(np.concatenate(parts))
        else:
            ext = spec["extent"]
            n = spec["n"][k]
            faces.append(np.linspace(ext[2 * k], ext[2 * k + 1], int(n) + 1))
    return Mesh(faces[0], faces[1])


# ---------------------------------------------------------------- boundaries

StateFunction = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


class BoundaryCondition:
    name = "abstract"


@dataclass(frozen=True)
class Periodic(BoundaryCondition):
    name = "periodic"


@dataclass(frozen=True)
class Symmetry(BoundaryCondition):
    """Mirror plane (also the slip reflecting wall): normal velocity flips."""
    name = "symmetry"

    def mirror_rule(self, axis):
        s = np.ones(4)
        s[1 + axis] = -1.0
        return s, np.zeros(4)


@dataclass(frozen=True)
class SlipWall(Symmetry):
    name = "slip-wall"


@dataclass(frozen=True)
class NoSlipWall(BoundaryCondition):
    """No-slip wall; adiabatic unless ``temperature`` is given.

    Ghost velocity is ``2 U_wall - interior`` and, for isothermal walls,
    ghost temperature is ``2 T_wall - interior`` so the face average equals
    the wall value. Density is copied from the mirrored cell, or linearly
    extrapolated from the two nearest cells with ``density="linear"``.
    """
    velocity: float = 0.0
    temperature: float = None
    density: str = "mirror"
    name = "no-slip"

    def mirror_rule(self, axis):
        s = np.array([1.0, -1.0, -1.0, 1.0])
        c = np.zeros(4)
        c[2 - axis] = 2.0 * self.velocity      # tangential component
        if self.temperature is not None:
            s[3] = -1.0
            c[3] = 2.0 * self.temperature
        return s, c


@dataclass(frozen=True)
class Extrapolation(BoundaryCondition):
    """Outflow: ghost cells copy the adjacent interior cell."""
    name = "outflow"


@dataclass(frozen=True)
class StateBC(BoundaryCondition):
    """Ghost cells take a prescribed primitive state ``func(x, y, t)``.

    Covers supersonic inflow, exact-solution Dirichlet data and the
    time-dependent shock boundary of the double Mach reflection. Ghost
    slopes difference ``func`` across the ghost cell when ``smooth``;
    otherwise they are zero (data with jumps inside a ghost cell).
    """
    func: StateFunction = None
    smooth: bool = True
    name = "state"


def FixedState(Q) -> StateBC:
    Q = np.asarray(Q, dtype=float)

    def func(x, y, t):
        shape = np.broadcast(x, y).shape
        return np.broadcast_to(Q.reshape((4,) + (1,) * len(shape)), (4,) + shape).copy()
    return StateBC(func=func, smooth=False)


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    bc: BoundaryCondition


SideSpec = Union[BoundaryCondition, Sequence[Segment]]


@dataclass(frozen=True)
class BoundarySpec:
    left: SideSpec
    right: SideSpec
    bottom: SideSpec
    top: SideSpec

    def segments(self, side) -> List[Segment]:
        spec = getattr(self, side)
        if isinstance(spec, BoundaryCondition):
            return [Segment(-np.inf, np.inf, spec)]
        segs = sorted(spec, key=lambda s: s.start)
        for a, b in zip(segs[:-1], segs[1:]):
            if not np.isclose(a.end, b.start):
                raise ValueError(f"segments on {side} overlap or leave a gap")
        return segs

    @classmethod
    def all(cls, bc: BoundaryCondition) -> "BoundarySpec":
        return cls(bc, bc, bc, bc)

    def validate(self, mesh: Mesh):
        for side in SIDES:
            segs = self.segments(side)
            lo, hi = ((mesh.y_faces[0], mesh.y_faces[-1]) if side in ("left", "right")
                      else (mesh.x_faces[0], mesh.x_faces[-1]))
            if len(segs) > 1 or np.isfinite(segs[0].start):
                if not (np.isclose(segs[0].start, lo) and np.isclose(segs[-1].end, hi)):
                    raise ValueError(f"segments on {side} do not tile [{lo}, {hi}]")
        for a, b in (("left", "right"), ("bottom", "top")):
            pa = any(isinstance(s.bc, Periodic) for s in self.segments(a))
            pb = any(isinstance(s.bc, Periodic) for s in self.segments(b))
            if pa != pb:
                raise ValueError(f"periodic boundary on {a}/{b} must be paired")


def _segment_masks(segs, coords):
    """Boolean masks over ``coords`` for each segment; outer ones extend to infinity."""
    masks = []
    for k, seg in enumerate(segs):
        lo = -np.inf if k == 0 else seg.start
        hi = np.inf if k == len(segs) - 1 else seg.end
        masks.append((coords >= lo) & (coords < hi))
    return masks


def _state_values(bc, mesh, xs, ys, t, kind, axis):
    """Prescribed ghost values (or slopes) for a StateBC on a ghost strip."""
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    if kind == "center":
        return bc.func(X, Y, t)
    if not bc.smooth:
        return np.zeros_like(bc.func(X, Y, t))
    if kind == "slope_x":
        h = _local_sizes(mesh.xc_padded, mesh.dx_padded, xs)[:, None]
        return (bc.func(X + 0.5 * h, Y, t) - bc.func(X - 0.5 * h, Y, t)) / h
    h = _local_sizes(mesh.yc_padded, mesh.dy_padded, ys)[None, :]
    return (bc.func(X, Y + 0.5 * h, t) - bc.func(X, Y - 0.5 * h, t)) / h


def _local_sizes(centers, sizes, xs):
    idx = np.searchsorted(centers, xs)
    idx = np.clip(idx, 0, sizes.size - 1)
    return sizes[idx]


def fill_ghosts(P, bcs: BoundarySpec, mesh: Mesh, t=0.0, kind="center"):
    """Populate the ghost frame of the padded primitive field ``P`` in place.

    ``kind`` is ``"center"`` for cell values, ``"slope_x"``/``"slope_y"``
    for slope fields; mirror-type conditions then apply the sign parity of
    the reflected derivative. x-sides are filled first over interior rows,
    then y-sides over the full extended width (this defines the corners).
    Returns ``P``.
    """
    nx, ny = mesh.nx, mesh.ny
    for side in SIDES:
        axis = 0 if side in ("left", "right") else 1
        segs = bcs.segments(side)
        if axis == 0:
            along = mesh.yc_padded
            rows = np.arange(G, G + ny)
            along_sel = along[rows]
            n_int = nx
        else:
            along = mesh.xc_padded
            rows = np.arange(0, nx + 2 * G)
            along_sel = along
            n_int = ny
        masks = _segment_masks(segs, along_sel)
        for seg, mask in zip(segs, masks):
            if not mask.any():
                continue
            r = rows[mask]
            _apply(P, seg.bc, side, axis, r, n_int, mesh, t, kind)
    return P


def _take(P, axis, k, r):
    return P[:, k, r] if axis == 0 else P[:, r, k]


def _put(P, axis, k, r, val):
    if axis == 0:
        P[:, k, r] = val
    else:
        P[:, r, k] = val


def _apply(P, bc, side, axis, r, n_int, mesh, t, kind):
    lo = side in ("left", "bottom")
    ghosts = [G - 1 - k if lo else n_int + G + k for k in range(G)]
    if isinstance(bc, StateBC):
        # one evaluation covers every ghost layer; segment rows are contiguous
        if axis == 0:
            val = _state_values(bc, mesh, mesh.xc_padded[ghosts], mesh.yc_padded[r], t, kind, axis)
            P[:, ghosts, r[0]:r[-1] + 1] = val[:P.shape[0]]
        else:
            val = _state_values(bc, mesh, mesh.xc_padded[r], mesh.yc_padded[ghosts], t, kind, axis)
            P[:, r[0]:r[-1] + 1, ghosts] = val[:P.shape[0]]
        return
    for k in range(G):
        km = min(k, n_int - 1)      # meshes thinner than the ghost frame
        g = ghosts[k]
        if lo:
            m, near, per = G + km, G, G + (n_int - 1 - k) % n_int
        else:
            m, near, per = n_int + G - 1 - km, n_int + G - 1, G + k % n_int
        if isinstance(bc, Periodic):
            _put(P, axis, g, r, _take(P, axis, per, r))
        elif isinstance(bc, Extrapolation):
            _put(P, axis, g, r, _take(P, axis, near, r))
        elif hasattr(bc, "mirror_rule"):
            s, c = bc.mirror_rule(axis)
            src = _take(P, axis, m, r)
            ncomp = src.shape[0]
            s = s[:ncomp, None]
            c = c[:ncomp, None]
            if kind == "center":
                val = s * src + c
            elif (kind == "slope_x") == (axis == 0):
                val = -s * src          # derivative normal to the mirror
            else:
                val = s * src
            if getattr(bc, "density", "mirror") == "linear" and n_int > 1:
                step = 1 if lo else -1
                a, b = _take(P, axis, near, r)[0], _take(P, axis, near + step, r)[0]
                if kind == "center":
                    val[0] = a + (k + 1) * (a - b)
                else:
                    val[0] = a
            _put(P, axis, g, r, val)
        else:
            raise ValueError(f"unknown boundary condition {bc!r}")


def pad(field):
    """Embed an interior ``(ncomp, nx, ny)`` array in a zeroed ghost frame."""
    field = np.asarray(field, dtype=float)
    out = np.zeros((field.shape[0], field.shape[1] + 2 * G, field.shape[2] + 2 * G))
    out[:, G:-G, G:-G] = field
    return out


def interior(P):
    return P[:, G:-G, G:-G]
