"""Batched Aberth-Ehrlich root finder."""
from __future__ import annotations

import numpy as np


class RootFindingError(RuntimeError):
    def __init__(self, msg: str, rows=()):
        super().__init__(msg)
        self.rows = list(rows)


def _horner(c: np.ndarray, z: np.ndarray):
    """Value and derivative of each row polynomial at each of its candidate roots."""
    p = np.broadcast_to(c[:, :1], z.shape).astype(complex)
    dp = np.zeros_like(p)
    for k in range(1, c.shape[1]):
        dp = dp * z + p
        p = p * z + c[:, k:k + 1]
    return p, dp


def aberth(coeffs, tol: float = 1e-12, maxiter: int = 400) -> np.ndarray:
    """All roots of each row of ``coeffs`` (highest power first, nonzero leading term).

    Returns an array of shape ``(n, m)`` for degree ``m``.  Raises
    :class:`RootFindingError` listing the rows that failed to reach relative
    tolerance ``tol``.
    """
    c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    n, m1 = c.shape
    m = m1 - 1
    if m < 1:
        return np.empty((n, 0), dtype=complex)
    if np.any(c[:, 0] == 0):
        raise ValueError("leading coefficient must be nonzero")
    c = c / c[:, :1]
    if m == 1:
        return -c[:, 1:2]
    # start on a circle sized by the geometric mean of the root moduli
    mags = np.abs(c[:, 1:])
    with np.errstate(divide="ignore"):
        r0 = np.max(mags ** (1.0 / np.arange(1, m + 1)), axis=1)
    r0 = np.where(r0 > 0, r0, 1.0)
    ang = 0.4 + 2 * np.pi * np.arange(m) / m
    z = r0[:, None] * np.exp(1j * ang)[None, :]
    done = np.zeros(n, dtype=bool)
    eye = np.eye(m, dtype=bool)
    for _ in range(maxiter):
        act = ~done
        if not act.any():
            break
        za, ca = z[act], c[act]
        p, dp = _horner(ca, za)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dp != 0, p / dp, 0)
            diff = za[:, :, None] - za[:, None, :]
            diff[:, eye] = 1
            inv = np.where(eye[None], 0, 1 / diff)
            s = inv.sum(axis=2)
            w = ratio / (1 - ratio * s)
        w = np.where(np.isfinite(w), w, 0)
        za = za - w
        z[act] = za
        scale = np.maximum(np.abs(za), 1e-300)
        conv = np.all((np.abs(w) <= tol * scale) | (p == 0), axis=1)
        idx = np.flatnonzero(act)
        done[idx[conv]] = True
    if not done.all():
        bad = np.flatnonzero(~done)
        raise RootFindingError(f"Aberth iteration did not converge for rows {bad[:10].tolist()}", bad)
    return z
