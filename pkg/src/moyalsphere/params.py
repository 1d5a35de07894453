"""Sphere parameters shared by the curvature, area and Gauss-Bonnet code."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterWindowError


@dataclass(frozen=True)
class SphereParams:
    """Radius and noncommutative parameters of a Moyal sphere.

    Parameters
    ----------
    A : float
        Sphere radius (length).
    theta : float
        Noncommutative parameter (length**2).
    mu : float
        Second parameter of the deformed 4n-dimensional product; 0 for the
        ordinary Moyal space.
    half_dim : int
        ``M`` for a ``2M``-dimensional space.
    allow_out_of_window : bool
        Skip the ``0 < theta_eff < A**2/2`` check. Positivity of ``A`` and
        ``theta`` is always enforced.
    """

    A: float
    theta: float
    mu: float = 0.0
    half_dim: int = 1
    allow_out_of_window: bool = False

    def __post_init__(self):
        if not (self.A > 0 and math.isfinite(self.A)):
            raise ParameterWindowError(f"radius must be positive, got A={self.A}")
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise ParameterWindowError(f"theta must be positive, got {self.theta}")
        if self.mu < 0 or not math.isfinite(self.mu):
            raise ParameterWindowError(f"mu must be nonnegative, got {self.mu}")
        if int(self.half_dim) != self.half_dim or self.half_dim < 1:
            raise ParameterWindowError(f"half_dim must be a positive integer, got {self.half_dim}")
        if not self.allow_out_of_window and not self.in_window:
            raise ParameterWindowError(
                f"theta_eff={self.theta_eff!r} outside (0, A^2/2) = (0, {self.A ** 2 / 2!r})"
            )

    @property
    def theta_eff(self) -> float:
        """``sqrt(theta**2 + mu**2)``; equals ``theta`` when ``mu == 0``."""
        if self.mu == 0:
            return self.theta
        return math.hypot(self.theta, self.mu)

    @property
    def lam(self) -> float:
        """Dimensionless ratio ``A**2 / theta_eff``."""
        return self.A ** 2 / self.theta_eff

    @property
    def in_window(self) -> bool:
        return 0 < self.theta_eff < self.A ** 2 / 2

    @property
    def dim(self) -> int:
        return 2 * self.half_dim

    def with_theta(self, theta, mu=0.0) -> "SphereParams":
        return SphereParams(self.A, theta, mu, self.half_dim, self.allow_out_of_window)
