"""Closed-form unsteady solution of the Shallow Water-Exner system.

For a uniform discharge ``q`` the bedload flux is linear in space,
``q_b = alpha x + beta``, the flow ``(h, u)`` is steady, and the bed is
lowered uniformly at rate ``alpha``:

    u_e^2 = ((alpha x + beta) / A)^(1/p)
    u     = sqrt(u_e^2 + u_cr^2),     h = q / u
    z_b0  = -(u^3 + 2 g q) / (2 g u) + C
    z_b   = z_b0 - alpha t
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .sediment_laws import bedload_rate, effective_params


@dataclass(frozen=True)
class ExactSolution:
    q: float
    alpha: float
    beta: float
    C: float
    law: object
    g: float = 9.81

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError(f"q must be > 0 (got {self.q})")
        if not self.law.A > 0:
            raise ValueError("exact solution needs a law with A > 0")
        if not self.g > 0:
            raise ValueError(f"g must be > 0 (got {self.g})")

    def flux_line(self, x):
        """``alpha x + beta``, the bedload flux carried by the solution."""
        return self.alpha * np.asarray(x, dtype=float) + self.beta

    def check_domain(self, x):
        lin = self.flux_line(x)
        bad = ~(lin > 0)
        if np.any(bad):
            xb = np.asarray(x, dtype=float)[bad] if np.ndim(x) else float(x)
            raise DomainError(
                f"alpha*x + beta <= 0 at x={np.min(xb):.6g}: solution undefined"
            )
        return lin

    def velocity(self, x):
        A, u_cr2 = effective_params(self.law)
        lin = self.check_domain(x)
        ue2 = (lin / A) ** (1.0 / self.law.p)
        u2 = ue2 + u_cr2
        if np.any(~(u2 > u_cr2)):
            raise DomainError("shear stress does not exceed the critical value")
        return np.sqrt(u2)

    def bed0(self, u):
        """Initial bed ``z_b0`` as a function of the local velocity."""
        g, q = self.g, self.q
        return -(u**3 + 2.0 * g * q) / (2.0 * g * u) + self.C

    def eval(self, x, t=0.0):
        """Return ``(h, u, z_b)`` at positions ``x`` and time ``t``."""
        u = self.velocity(x)
        h = self.q / u
        z_b = self.bed0(u) - self.alpha * t
        return _unwrap(h), _unwrap(u), _unwrap(z_b)

    def free_surface(self, x, t=0.0):
        h, _, z_b = self.eval(x, t)
        return h + z_b

    def dbed0_dx(self, x):
        """Analytic ``d z_b0 / dx = (q/u^2 - u/g) du/dx``."""
        u = self.velocity(x)
        lin = self.flux_line(x)
        A, p = self.law.A, self.law.p
        dux2 = (self.alpha / (p * A)) * (lin / A) ** (1.0 / p - 1.0)
        du = dux2 / (2.0 * u)
        return _unwrap((self.q / u**2 - u / self.g) * du)

    def froude(self, x):
        h, u, _ = self.eval(x)
        return u / np.sqrt(self.g * h)

    def frozen_bed(self):
        """View of this solution with the bed held at ``z_b0`` for all time.

        ``(h, u, z_b0)`` is a steady state of the fixed-bed shallow water
        equations, so this is the reference for runs with no transport.
        """
        return FrozenBedSolution(self)


@dataclass(frozen=True)
class FrozenBedSolution:
    base: ExactSolution

    @property
    def g(self):
        return self.base.g

    def eval(self, x, t=0.0):
        return self.base.eval(x, 0.0)


def qb_of_exact(sol, x):
    """Bedload rate from the sediment law applied to the exact velocity.

    Equals ``alpha x + beta`` up to rounding.
    """
    _, u, _ = sol.eval(x, 0.0)
    return bedload_rate(sol.law, u)


def residual(sol, x, t, dx=1e-3, dt=1e-3):
    """Central-difference residuals of the mass, momentum and Exner equations.

    Returns:
        ``(r_mass, r_momentum, r_exner)``; each is ``O(dx^2 + dt^2)``.
    """
    x = np.asarray(x, dtype=float)
    g = sol.g

    def fields(xx, tt):
        h, u, z = sol.eval(xx, tt)
        return h, h * u, z

    h_tp, hu_tp, z_tp = fields(x, t + dt)
    h_tm, hu_tm, z_tm = fields(x, t - dt)
    h_xp, hu_xp, z_xp = fields(x + dx, t)
    h_xm, hu_xm, z_xm = fields(x - dx, t)
    h_c, _, _ = fields(x, t)

    def mom_flux(h, hu):
        return hu * hu / h + 0.5 * g * h * h

    r_mass = (h_tp - h_tm) / (2 * dt) + (hu_xp - hu_xm) / (2 * dx)
    r_mom = (
        (hu_tp - hu_tm) / (2 * dt)
        + (mom_flux(h_xp, hu_xp) - mom_flux(h_xm, hu_xm)) / (2 * dx)
        + g * h_c * (z_xp - z_xm) / (2 * dx)
    )
    qb_p = bedload_rate(sol.law, hu_xp / h_xp)
    qb_m = bedload_rate(sol.law, hu_xm / h_xm)
    r_exner = (z_tp - z_tm) / (2 * dt) + (qb_p - qb_m) / (2 * dx)
    return _unwrap(r_mass), _unwrap(r_mom), _unwrap(r_exner)


def _unwrap(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a
