"""Piecewise-linear reconstruction of primitive variables.

Slopes live on padded arrays like every other cell field; the functions
here fill the interior and leave ghost slopes to :func:`grid.fill_ghosts`.
"""
from __future__ import annotations

import numpy as np

from .grid import G, Mesh


def minmod3(a, b, c):
    """Smallest-magnitude argument if all three share a sign, else zero."""
    a, b, c = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, c)))
    same = ((a > 0) & (b > 0) & (c > 0)) | ((a < 0) & (b < 0) & (c < 0))
    mag = np.minimum(np.minimum(np.abs(a), np.abs(b)), np.abs(c))
    return np.where(same, np.sign(a) * mag, 0.0)


def _one_sided(P, mesh: Mesh, axis):
    """Forward and backward divided differences at interior cells along ``axis``."""
    nx, ny = mesh.nx, mesh.ny
    if axis == 0:
        d = mesh.dx_padded[:, None]
        c = P[:, G:G + nx, G:G + ny]
        fwd = (P[:, G + 1:G + nx + 1, G:G + ny] - c) / (0.5 * (d[G + 1:G + nx + 1] + d[G:G + nx]))
        bwd = (c - P[:, G - 1:G + nx - 1, G:G + ny]) / (0.5 * (d[G:G + nx] + d[G - 1:G + nx - 1]))
    else:
        d = mesh.dy_padded[None, :]
        c = P[:, G:G + nx, G:G + ny]
        fwd = (P[:, G:G + nx, G + 1:G + ny + 1] - c) / (0.5 * (d[:, G + 1:G + ny + 1] + d[:, G:G + ny]))
        bwd = (c - P[:, G:G + nx, G - 1:G + ny - 1]) / (0.5 * (d[:, G:G + ny] + d[:, G - 1:G + ny - 1]))
    return fwd, bwd


def central_slopes(P, mesh: Mesh, axis):
    """``(Q_{i+1} - Q_{i-1}) / (2 dx_i)`` at every interior cell."""
    nx, ny = mesh.nx, mesh.ny
    if axis == 0:
        d = mesh.dx[:, None]
        return (P[:, G + 1:G + nx + 1, G:G + ny] - P[:, G - 1:G + nx - 1, G:G + ny]) / (2 * d)
    d = mesh.dy[None, :]
    return (P[:, G:G + nx, G + 1:G + ny + 1] - P[:, G:G + nx, G - 1:G + ny - 1]) / (2 * d)


def limited_slopes(P, mesh: Mesh, axis, alpha=1.3, middle=None):
    """Minmod slope from two alpha-scaled one-sided differences and a middle argument.

    ``middle`` is the predictor-based cell slope from the previous step;
    when it is ``None`` (first step) the central difference of the centers
    is used instead.
    """
    fwd, bwd = _one_sided(P, mesh, axis)
    if middle is None:
        middle = central_slopes(P, mesh, axis)
    return minmod3(alpha * fwd, middle, alpha * bwd)


def grp_cell_slopes(q_faces, sizes, axis):
    """Cell slopes from predictor values on the two faces bounding each cell.

    ``q_faces`` has ``n + 1`` entries along ``axis`` for ``n`` cells.
    """
    if axis == 0:
        return (q_faces[:, 1:, :] - q_faces[:, :-1, :]) / sizes[:, None]
    return (q_faces[:, :, 1:] - q_faces[:, :, :-1]) / sizes[None, :]


def interface_extrapolation(center, slope, halfwidth):
    """Linear extrapolation ``center + halfwidth * slope``.

    Pass a negative ``halfwidth`` for the left face of a cell.
    """
    return center + halfwidth * slope


def face_traces(P, S, mesh: Mesh, axis):
    """Left/right traces at the ``n + 1`` faces normal to ``axis``.

    ``P`` are padded centers and ``S`` padded slopes along ``axis`` (ghost
    ring 1 must be valid). Returns ``(QL, QR)`` of face shape.
    """
    nx, ny = mesh.nx, mesh.ny
    if axis == 0:
        d = mesh.dx_padded[:, None]
        L = slice(G - 1, G + nx)
        R = slice(G, G + nx + 1)
        J = slice(G, G + ny)
        QL = interface_extrapolation(P[:, L, J], S[:, L, J], 0.5 * d[L])
        QR = interface_extrapolation(P[:, R, J], S[:, R, J], -0.5 * d[R])
    else:
        d = mesh.dy_padded[None, :]
        L = slice(G - 1, G + ny)
        R = slice(G, G + ny + 1)
        I = slice(G, G + nx)
        QL = interface_extrapolation(P[:, I, L], S[:, I, L], 0.5 * d[:, L])
        QR = interface_extrapolation(P[:, I, R], S[:, I, R], -0.5 * d[:, R])
    return QL, QR


def face_neighbors(S, mesh: Mesh, axis):
    """Values of a padded cell field in the left/right cells of each face."""
    nx, ny = mesh.nx, mesh.ny
    if axis == 0:
        J = slice(G, G + ny)
        return S[:, G - 1:G + nx, J], S[:, G:G + nx + 1, J]
    I = slice(G, G + nx)
    return S[:, I, G - 1:G + ny], S[:, I, G:G + ny + 1]
