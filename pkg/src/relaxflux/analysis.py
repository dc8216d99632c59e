"""Post-processing of solution fields: vortex identification near a wall."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import Mesh


def velocity_gradients(Q, mesh: Mesh):
    """``(du/dx, du/dy, dv/dx, dv/dy)`` by centred differences on cell centers."""
    u, v = Q[1], Q[2]
    return (np.gradient(u, mesh.xc, axis=0), np.gradient(u, mesh.yc, axis=1),
            np.gradient(v, mesh.xc, axis=0), np.gradient(v, mesh.yc, axis=1))


def vorticity(Q, mesh: Mesh):
    _, uy, vx, _ = velocity_gradients(Q, mesh)
    return vx - uy


def q_criterion(Q, mesh: Mesh):
    """``(|Omega|^2 - |S|^2) / 2``; positive where rotation dominates strain."""
    ux, uy, vx, vy = velocity_gradients(Q, mesh)
    return -0.5 * (ux * ux + vy * vy) - uy * vx


@dataclass(frozen=True)
class Vortex:
    circulation: float
    x_range: tuple
    top: float
    cells: int


def wall_vortices(Q, mesh: Mesh, y_max=0.35, clockwise=True):
    """Connected rotation-dominated regions below ``y_max``, strongest first.

    A region is a 4-connected set of cells with positive Q-criterion and
    vorticity of the requested sense. Its circulation is the area integral
    of the vorticity magnitude; ``top`` is the upper face of its highest cell.
    """
    w = vorticity(Q, mesh)
    sense = -1.0 if clockwise else 1.0
    below = mesh.y_faces[1:] <= y_max + 1e-12
    mask = (q_criterion(Q, mesh) > 0) & (sense * w > 0) & below[None, :]
    labels, n = ndimage.label(mask)
    if n == 0:
        return []
    idx = np.arange(1, n + 1)
    circ = ndimage.sum(sense * w * mesh.area, labels, index=idx)
    out = []
    for k in np.argsort(circ)[::-1]:
        i, j = np.nonzero(labels == idx[k])
        out.append(Vortex(float(circ[k]), (float(mesh.x_faces[i.min()]), float(mesh.x_faces[i.max() + 1])),
                          float(mesh.y_faces[j.max() + 1]), int(i.size)))
    return out


def primary_vortex_height(Q, mesh: Mesh, y_max=0.35):
    """Top of the strongest clockwise vortex attached to the bottom-wall region.

    In the shock-tube flow the reflected shock lifts the wall boundary layer
    into a clockwise roll-up; its height is read off the Q-criterion region.
    Returns ``nan`` when no such region exists.
    """
    found = wall_vortices(Q, mesh, y_max, clockwise=True)
    return found[0].top if found else float("nan")
