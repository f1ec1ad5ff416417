"""Uniform 1D mesh, cell-state containers and error norms."""

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .sediment_laws import signed_bedload_rate

H_DRY = 1e-10
_REL_GUARD = 1e-14


@dataclass(frozen=True)
class Mesh1D:
    x_min: float
    x_max: float
    J: int

    def __post_init__(self):
        if int(self.J) != self.J or self.J < 2:
            raise ValueError(f"mesh needs J >= 2 cells (got {self.J})")
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max must exceed x_min ({self.x_min}, {self.x_max})")

    @property
    def length(self):
        return self.x_max - self.x_min

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.J

    @property
    def centers(self):
        return self.x_min + (np.arange(self.J) + 0.5) * self.dx

    @property
    def interfaces(self):
        return self.x_min + np.arange(self.J + 1) * self.dx

    def ghost_centers(self):
        """Centers of the single ghost cell on each side."""
        return self.x_min - 0.5 * self.dx, self.x_max + 0.5 * self.dx


class CellState(NamedTuple):
    h: float
    hu: float
    z_b: float

    @property
    def u(self):
        return self.hu / self.h if self.h > H_DRY else 0.0


def to_conserved(h, u):
    h = np.asarray(h, dtype=float)
    return h, h * u


def to_primitive(h, hu):
    h = np.asarray(h, dtype=float)
    hu = np.asarray(hu, dtype=float)
    wet = h > H_DRY
    u = np.where(wet, hu / np.where(wet, h, 1.0), 0.0)
    return h, u


@dataclass
class FieldSnapshot:
    """Cell values ``(h, hu, z_b)`` on a mesh at time ``t``."""

    mesh: Mesh1D
    h: np.ndarray
    hu: np.ndarray
    z_b: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("h", "hu", "z_b"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (self.mesh.J,):
                raise ValueError(
                    f"{name} has shape {arr.shape}, expected ({self.mesh.J},)"
                )
            setattr(self, name, arr)

    @property
    def u(self):
        return to_primitive(self.h, self.hu)[1]

    @property
    def eta(self):
        return self.h + self.z_b

    def cell(self, j):
        return CellState(float(self.h[j]), float(self.hu[j]), float(self.z_b[j]))

    def copy(self):
        return replace(self, h=self.h.copy(), hu=self.hu.copy(), z_b=self.z_b.copy())


@dataclass
class RelaxSnapshot:
    """Snapshot extended with the relaxation pressure and bedload flux."""

    base: FieldSnapshot
    pi: np.ndarray = field(default=None)
    q_r: np.ndarray = field(default=None)


def project_exact(mesh, sol, t=0.0):
    """Sample the exact solution pointwise at cell centers."""
    h, u, z_b = sol.eval(mesh.centers, t)
    h, hu = to_conserved(h, u)
    return FieldSnapshot(mesh, h, hu, z_b, t)


def equilibrium_lift(snap, law, g=9.81):
    """Attach ``pi = g h^2 / 2`` and ``q_r = q_b`` to a snapshot.

    Accepts either a plain or an already lifted snapshot; lifting is
    idempotent.
    """
    base = snap.base if isinstance(snap, RelaxSnapshot) else snap
    pi = 0.5 * g * base.h * base.h
    q_r = np.where(base.h > H_DRY, signed_bedload_rate(law, base.u), 0.0)
    return RelaxSnapshot(base, pi, q_r)


@dataclass(frozen=True)
class FieldErrors:
    l1: float
    l2: float
    linf: float
    rel_l1: float
    rel_l2: float
    rel_linf: float

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _field_errors(num, ref, dx):
    err = num - ref
    abs_n = (
        float(np.sum(np.abs(err)) * dx),
        float(np.sqrt(np.sum(err * err) * dx)),
        float(np.max(np.abs(err))),
    )
    ref_n = (
        float(np.sum(np.abs(ref)) * dx),
        float(np.sqrt(np.sum(ref * ref) * dx)),
        float(np.max(np.abs(ref))),
    )
    rel = tuple(a / r if r >= _REL_GUARD else a for a, r in zip(abs_n, ref_n))
    return FieldErrors(*abs_n, *rel)


def norms(snap, sol):
    """L1, L2 and Linf errors of ``h``, ``u`` and ``z_b`` against ``sol``.

    Norms are weighted by the cell width. Relative values divide by the same
    norm of the exact field, falling back to the absolute value when that
    norm is below 1e-14.
    """
    mesh = snap.mesh
    h, u, z_b = sol.eval(mesh.centers, snap.t)
    return {
        "h": _field_errors(snap.h, h, mesh.dx),
        "u": _field_errors(snap.u, u, mesh.dx),
        "z_b": _field_errors(snap.z_b, z_b, mesh.dx),
    }
