"""Bedload transport laws.

Every law of the threshold family

    q_b = kappa * (tau_b - tau_cr)^p * sqrt((s-1) g d_s^3),
    tau_b = f u^2 / (8 (s-1) g d_s)

is handled through its reduced form ``q_b = A * (u^2 - u_cr^2)_+^p``.
Laws expose the three reduced parameters ``A``, ``u_cr2`` and ``p``; the
module-level functions only rely on those.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

MPM_KAPPA = 8.0
MPM_TAU_CR = 0.047


@dataclass(frozen=True)
class SedimentLaw:
    """Threshold bedload law with Darcy-Weisbach shear stress.

    Attributes:
        kappa: empirical coefficient (>= 0; 0 means a fixed bed).
        p: exponent.
        tau_cr: critical Shields stress.
        f: Darcy-Weisbach friction coefficient.
        s: relative sediment density rho_s / rho.
        d_s: grain diameter [m].
        g: gravitational acceleration [m/s^2].
    """

    kappa: float
    p: float = 1.5
    tau_cr: float = 0.0
    f: float = 0.1
    s: float = 2.65
    d_s: float = 0.001
    g: float = 9.81

    def __post_init__(self):
        bad = []
        if not self.kappa >= 0:
            bad.append(f"kappa must be >= 0 (got {self.kappa})")
        if not self.p > 0:
            bad.append(f"p must be > 0 (got {self.p})")
        if not self.tau_cr >= 0:
            bad.append(f"tau_cr must be >= 0 (got {self.tau_cr})")
        if not self.f > 0:
            bad.append(f"f must be > 0 (got {self.f})")
        if not self.s > 1:
            bad.append(f"s must be > 1 (got {self.s})")
        if not self.d_s > 0:
            bad.append(f"d_s must be > 0 (got {self.d_s})")
        if not self.g > 0:
            bad.append(f"g must be > 0 (got {self.g})")
        if bad:
            raise ValueError("; ".join(bad))

    @property
    def stress_factor(self):
        """f / (8 (s-1) g d_s): converts u^2 into Shields stress."""
        return self.f / (8.0 * (self.s - 1.0) * self.g * self.d_s)

    @property
    def A(self):
        return (
            self.kappa
            * self.stress_factor**self.p
            * np.sqrt((self.s - 1.0) * self.g * self.d_s**3)
        )

    @property
    def u_cr2(self):
        return self.tau_cr / self.stress_factor


@dataclass(frozen=True)
class GrassLaw:
    """Grass model ``q_b = A_g |u|^3``; no threshold, ``p = 3/2``."""

    A_g: float

    p = 1.5
    u_cr2 = 0.0

    def __post_init__(self):
        if not self.A_g > 0:
            raise ValueError(f"A_g must be > 0 (got {self.A_g})")

    @property
    def A(self):
        return self.A_g


def meyer_peter_muller(f=0.1, s=2.65, d_s=0.001, g=9.81):
    """Meyer-Peter & Mueller preset (kappa=8, p=3/2, tau_cr=0.047)."""
    return SedimentLaw(kappa=MPM_KAPPA, p=1.5, tau_cr=MPM_TAU_CR, f=f, s=s, d_s=d_s, g=g)


def fixed_bed():
    """Law with ``q_b == 0`` everywhere."""
    return SedimentLaw(kappa=0.0)


def shields_stress(law, u):
    """Dimensionless bottom shear stress for velocity ``u``."""
    u = np.asarray(u, dtype=float)
    return law.stress_factor * (u * u)


def effective_params(law):
    """Return ``(A, u_cr^2)`` of the reduced form ``q_b = A u_e^{2p}``."""
    return law.A, law.u_cr2


def bedload_rate(law, u):
    """Bedload transport magnitude ``A (u^2 - u_cr^2)_+^p`` [m^2/s].

    Depends on ``u`` only through ``u^2``; zero at and below the threshold.
    """
    u = np.asarray(u, dtype=float)
    excess = np.maximum(u * u - law.u_cr2, 0.0)
    out = law.A * excess**law.p
    return out if out.ndim else float(out)


def signed_bedload_rate(law, u):
    """``sign(u) * bedload_rate(law, u)``: the Exner flux, moving with the flow."""
    u = np.asarray(u, dtype=float)
    out = np.sign(u) * bedload_rate(law, u)
    return out if np.ndim(out) else float(out)


def bedload_rate_dq(law, h, q):
    """Partial derivatives of ``q_b(h, q) = A ((q/h)^2 - u_cr^2)_+^p``.

    Args:
        law: sediment law.
        h: water depth [m], strictly positive.
        q: discharge [m^2/s].

    Returns:
        Tuple ``(dqb_dq, dqb_dh)``. Both vanish below the threshold and, as a
        one-sided limit, at the threshold itself.

    Raises:
        DomainError: if any ``h <= 0``.
    """
    h = np.asarray(h, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(~(h > 0)):
        raise DomainError("bedload_rate_dq requires h > 0")
    u = q / h
    excess = u * u - law.u_cr2
    active = excess > 0
    w = np.where(active, excess, 1.0)
    common = np.where(active, law.A * law.p * w ** (law.p - 1.0), 0.0)
    dq = common * 2.0 * u / h
    dh = -common * 2.0 * u * u / h
    if dq.ndim == 0:
        return float(dq), float(dh)
    return dq, dh
