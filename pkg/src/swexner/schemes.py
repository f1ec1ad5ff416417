"""Explicit first-order finite-volume schemes for the Shallow Water-Exner system.

Both schemes share one update, written per interface ``i`` as

    h_j  -= dt/dx (F_h[j+1/2]  - F_h[j-1/2])
    hu_j -= dt/dx (M_left[j+1/2] - M_right[j-1/2])
    z_j  -= dt/dx (F_z[j+1/2]  - F_z[j-1/2])

``M_left``/``M_right`` are the momentum fluxes seen by the cells left and
right of an interface; their difference carries the topography term.
Mass and bed updates are in flux-difference form, so their totals change
only through the boundary fluxes, which are recorded in every StepReport.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, PositivityError, StepLimitError
from .mesh import H_DRY, FieldSnapshot, to_primitive
from .sediment_laws import bedload_rate_dq, signed_bedload_rate

BC_MODES = ("exact", "transmissive")
SCHEMES = ("relaxation", "rusanov")
DT_COLLAPSE = 1e-6


@dataclass(frozen=True)
class BoundaryCondition:
    """Ghost-cell treatment on each side of the domain.

    ``exact`` fills the ghost cell from ``solution`` at the current time;
    ``transmissive`` copies the adjacent interior cell.
    """

    left: str = "exact"
    right: str = "exact"
    solution: object = None

    def __post_init__(self):
        for side in (self.left, self.right):
            if side not in BC_MODES:
                raise ValueError(f"unknown boundary mode {side!r}; use one of {BC_MODES}")
        if "exact" in (self.left, self.right) and self.solution is None:
            raise ValueError("exact boundary condition needs a solution")

    @classmethod
    def both(cls, mode, solution=None):
        return cls(mode, mode, solution)

    def ghosts(self, snap):
        """Return ``((h, hu, z_b) left, (h, hu, z_b) right)`` ghost states."""
        xl, xr = snap.mesh.ghost_centers()
        out = []
        for mode, x, j in ((self.left, xl, 0), (self.right, xr, -1)):
            if mode == "exact":
                h, u, z = self.solution.eval(x, snap.t)
                out.append((h, h * u, z))
            else:
                out.append((snap.h[j], snap.hu[j], snap.z_b[j]))
        return out[0], out[1]


@dataclass(frozen=True)
class StepReport:
    dt: float
    max_speed: float
    mass_influx: float
    bed_influx: float
    fastest_interface: int = 0


@dataclass(frozen=True)
class InterfaceFluxes:
    F_h: np.ndarray
    M_left: np.ndarray
    M_right: np.ndarray
    F_z: np.ndarray
    speed: np.ndarray


def bed_wave_speed(law, h, hu, g):
    """Small-transport estimate of the bed celerity, ``|c^2 dqb/dh| / |c^2 - u^2 + c^2 dqb/dq|``.

    Capped at ``|u| + sqrt(gh)``; exactly zero where there is no transport.
    """
    h = np.maximum(h, H_DRY)
    dq, dh = bedload_rate_dq(law, h, hu)
    u = hu / h
    c2 = g * h
    denom = np.abs(c2 - u * u + c2 * np.abs(dq))
    lam = c2 * np.abs(dh) / np.maximum(denom, 1e-300)
    return np.minimum(lam, np.abs(u) + np.sqrt(c2))


def _bed_block(zL, qL, zR, qR, sL, sR):
    """Riemann solution of the frozen-coefficient (z_b, q_r) block.

    The block is linear with speeds ``sL <= sR``, so its single intermediate
    state is the HLL state. Returns ``(flux, z_at_interface)``.
    """
    width = sR - sL
    inner = (sL < 0) & (sR > 0)
    safe = np.where(inner, width, 1.0)
    flux_mid = (sR * qL - sL * qR + sL * sR * (zR - zL)) / safe
    z_mid = (sR * zR - sL * zL - (qR - qL)) / safe
    upwind_left = sL >= 0
    flux = np.where(inner, flux_mid, np.where(upwind_left, qL, qR))
    z_int = np.where(inner, z_mid, np.where(upwind_left, zL, zR))
    return flux, z_int


def suliciu_flux(hL, uL, hR, uR, g):
    """Suliciu relaxation flux for the shallow water block.

    Uses one relaxation parameter per interface,
    ``a = max_k h_k (sqrt(g h_k) + 2 |u_R - u_L|)``, so that ``a / h`` bounds
    the sound speed on both sides.

    Returns:
        ``(F_h, F_hu, max_abs_speed)`` per interface.
    """
    hLs = np.maximum(hL, H_DRY)
    hRs = np.maximum(hR, H_DRY)
    piL = 0.5 * g * hL * hL
    piR = 0.5 * g * hR * hR
    du = np.abs(uR - uL)
    a = np.maximum(hLs * (np.sqrt(g * hLs) + 2 * du), hRs * (np.sqrt(g * hRs) + 2 * du))

    u_star = 0.5 * (uL + uR) - (piR - piL) / (2 * a)
    pi_star = 0.5 * (piL + piR) - 0.5 * a * (uR - uL)
    hL_star = 1.0 / (1.0 / hLs + (u_star - uL) / a)
    hR_star = 1.0 / (1.0 / hRs + (uR - u_star) / a)

    s1 = uL - a / hLs
    s3 = uR + a / hRs

    h = np.where(s1 >= 0, hL, np.where(u_star >= 0, hL_star, np.where(s3 > 0, hR_star, hR)))
    u = np.where(s1 >= 0, uL, np.where(s3 > 0, u_star, uR))
    pi = np.where(s1 >= 0, piL, np.where(s3 > 0, pi_star, piR))
    F_h = h * u
    F_hu = h * u * u + pi
    speed = np.maximum(np.maximum(np.abs(s1), np.abs(s3)), np.abs(u_star))
    return F_h, F_hu, speed


def relaxation_fluxes(hL, huL, zL, hR, huR, zR, law, g):
    """Interface fluxes of the five-wave relaxation scheme.

    The transport part is solved with the relaxed variables at equilibrium
    (``pi = g h^2/2``, ``q_r = q_b``). The bed block carries waves
    ``u -+ b/h``; its interface value of ``z_b`` drives a hydrostatic
    reconstruction of the depths, which then enter the Suliciu block with
    waves ``u - a/h, u, u + a/h``.
    """
    _, uL = to_primitive(hL, huL)
    _, uR = to_primitive(hR, huR)

    qL = np.where(hL > H_DRY, signed_bedload_rate(law, uL), 0.0)
    qR = np.where(hR > H_DRY, signed_bedload_rate(law, uR), 0.0)
    b_over_h = np.maximum(
        np.abs(uL) + bed_wave_speed(law, hL, huL, g),
        np.abs(uR) + bed_wave_speed(law, hR, huR, g),
    )
    # no transport on either side: the bed is locally frozen, no bed waves
    b_over_h = np.where((qL == 0) & (qR == 0), 0.0, b_over_h)
    u_bar = 0.5 * (uL + uR)
    sL = u_bar - b_over_h
    sR = u_bar + b_over_h
    F_z, z_star = _bed_block(zL, qL, zR, qR, sL, sR)
    z_int = np.clip(z_star, np.minimum(zL, zR), np.maximum(zL, zR))

    hL_rec = np.maximum(0.0, hL + zL - z_int)
    hR_rec = np.maximum(0.0, hR + zR - z_int)
    F_h, F_hu, speed = suliciu_flux(hL_rec, uL, hR_rec, uR, g)

    M_left = F_hu + 0.5 * g * (hL * hL - hL_rec * hL_rec)
    M_right = F_hu + 0.5 * g * (hR * hR - hR_rec * hR_rec)
    speed = np.maximum(speed, np.maximum(np.abs(sL), np.abs(sR)))
    return InterfaceFluxes(F_h, M_left, M_right, F_z, speed)


def rusanov_fluxes(hL, huL, zL, hR, huR, zR, law, g):
    """Local Lax-Friedrichs fluxes with a centred topography term.

    Water-mass diffusion acts on the free surface ``h + z_b`` and the
    topography product uses interface-averaged depths, which together keep
    a lake at rest exactly steady. Bed diffusion uses the bed-wave speed.
    """
    _, uL = to_primitive(hL, huL)
    _, uR = to_primitive(hR, huR)
    c_h = np.maximum(np.abs(uL) + np.sqrt(g * hL), np.abs(uR) + np.sqrt(g * hR))
    c_b = np.maximum(bed_wave_speed(law, hL, huL, g), bed_wave_speed(law, hR, huR, g))

    qL = np.where(hL > H_DRY, signed_bedload_rate(law, uL), 0.0)
    qR = np.where(hR > H_DRY, signed_bedload_rate(law, uR), 0.0)

    F_h = 0.5 * (huL + huR) - 0.5 * c_h * ((hR + zR) - (hL + zL))
    F_hu = (
        0.5 * (huL * uL + 0.5 * g * hL * hL + huR * uR + 0.5 * g * hR * hR)
        - 0.5 * c_h * (huR - huL)
    )
    F_z = 0.5 * (qL + qR) - 0.5 * c_b * (zR - zL)
    topo = 0.25 * g * (hL + hR) * (zR - zL)
    return InterfaceFluxes(F_h, F_hu + topo, F_hu - topo, F_z, np.maximum(c_h, c_b))


_FLUXES = {"relaxation": relaxation_fluxes, "rusanov": rusanov_fluxes}


def _padded(snap, bc):
    (hl, hul, zl), (hr, hur, zr) = bc.ghosts(snap)
    h = np.concatenate(([hl], snap.h, [hr]))
    hu = np.concatenate(([hul], snap.hu, [hur]))
    z = np.concatenate(([zl], snap.z_b, [zr]))
    return h, hu, z


def _check(snap):
    x = snap.mesh.centers
    for name in ("h", "hu", "z_b"):
        bad = np.flatnonzero(~np.isfinite(getattr(snap, name)))
        if bad.size:
            j = int(bad[0])
            raise DivergenceError(j, float(x[j]), f"non-finite {name}")
    bad = np.flatnonzero(snap.h <= 0)
    if bad.size:
        j = int(bad[0])
        raise PositivityError(j, float(x[j]), float(snap.h[j]))


def _step(scheme, snap, law, bc, cfl, g, dt_max):
    if not cfl > 0:
        raise ValueError(f"cfl must be > 0 (got {cfl})")
    h, hu, z = _padded(snap, bc)
    fx = _FLUXES[scheme](h[:-1], hu[:-1], z[:-1], h[1:], hu[1:], z[1:], law, g)
    dx = snap.mesh.dx
    # np.max is a fixed-order reduction: the step is deterministic
    max_speed = float(np.max(fx.speed))
    if not math.isfinite(max_speed):
        bad = int(np.flatnonzero(~np.isfinite(fx.speed))[0])
        raise DivergenceError(min(bad, snap.mesh.J - 1), float(snap.mesh.interfaces[bad]), "non-finite wave speed")
    dt = cfl * dx / max_speed if max_speed > 0 else math.inf
    if dt_max is not None:
        dt = min(dt, dt_max)
    if not math.isfinite(dt):
        raise ValueError("time step is unbounded: give dt_max for a state with no waves")
    lam = dt / dx
    new = FieldSnapshot(
        snap.mesh,
        snap.h - lam * (fx.F_h[1:] - fx.F_h[:-1]),
        snap.hu - lam * (fx.M_left[1:] - fx.M_right[:-1]),
        snap.z_b - lam * (fx.F_z[1:] - fx.F_z[:-1]),
        snap.t + dt,
    )
    _check(new)
    report = StepReport(
        dt=dt,
        max_speed=max_speed,
        mass_influx=dt * float(fx.F_h[0] - fx.F_h[-1]),
        bed_influx=dt * float(fx.F_z[0] - fx.F_z[-1]),
        fastest_interface=int(np.argmax(fx.speed)),
    )
    return new, report


def relaxation_step(snap, law, bc, cfl=1.0, g=9.81, dt_max=None):
    """Advance one step with the relaxation scheme.

    Raises:
        PositivityError: a cell depth became nonpositive.
        DivergenceError: a non-finite value appeared.
    """
    return _step("relaxation", snap, law, bc, cfl, g, dt_max)


def rusanov_step(snap, law, bc, cfl=1.0, g=9.81, dt_max=None):
    """Advance one step with the Rusanov cross-check scheme."""
    return _step("rusanov", snap, law, bc, cfl, g, dt_max)


def default_max_steps(mesh, T):
    return max(10_000, int(10 * mesh.J * T / mesh.dx))


def integrate(snap, law, bc, cfl, T, scheme="relaxation", g=9.81, max_steps=None):
    """Step ``snap`` until time ``T``, landing exactly on it.

    Returns:
        ``(final_snapshot, reports)`` with one StepReport per step.

    Raises:
        StepLimitError: more than ``max_steps`` steps were needed.
        DivergenceError: the CFL time step collapsed below ``DT_COLLAPSE``
            times the first one (runaway wave speeds), or a step failed.
        PositivityError: a step produced a nonpositive depth.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; use one of {SCHEMES}")
    if T < snap.t:
        raise ValueError(f"end time {T} precedes snapshot time {snap.t}")
    if max_steps is None:
        max_steps = default_max_steps(snap.mesh, T)
    reports = []
    cur = snap.copy()
    while cur.t < T:
        if len(reports) >= max_steps:
            raise StepLimitError(f"no convergence to T={T} within {max_steps} steps (t={cur.t})")
        remaining = T - cur.t
        cur, rep = _step(scheme, cur, law, bc, cfl, g, remaining)
        reports.append(rep)
        if rep.dt < remaining and rep.dt < DT_COLLAPSE * reports[0].dt:
            i = rep.fastest_interface
            raise DivergenceError(
                min(i, cur.mesh.J - 1),
                float(cur.mesh.interfaces[i]),
                f"wave speed ({rep.max_speed:.3g} m/s, time step collapsed)",
            )
        if T - cur.t <= 1e-14 * max(1.0, T):
            cur.t = T
    return cur, reports


def budget_defect(initial, final, reports):
    """Return the mass and bed budget defects, relative to the initial totals.

    The defect is ``|sum(final) dx - sum(initial) dx - boundary influx|``
    divided by ``sum(|initial|) dx``.
    """
    dx = initial.mesh.dx
    mass_in = math.fsum(r.mass_influx for r in reports)
    bed_in = math.fsum(r.bed_influx for r in reports)
    mass0 = math.fsum(initial.h) * dx
    bed_scale = math.fsum(np.abs(initial.z_b)) * dx
    mass = abs(math.fsum(final.h) * dx - mass0 - mass_in) / mass0
    bed = abs(math.fsum(final.z_b) * dx - math.fsum(initial.z_b) * dx - bed_in)
    bed = bed / bed_scale if bed_scale > 0 else bed
    return {"mass": mass, "bed": bed, "mass_influx": mass_in, "bed_influx": bed_in}
