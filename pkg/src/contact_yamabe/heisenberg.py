"""The Heisenberg group H^n as reference space.

Real coordinates are ordered (t, x^1..x^n, y^1..y^n) with
z^alpha = x^alpha + i y^alpha, so the real index of x^alpha is alpha
and of y^alpha is n + alpha, matching the frame-label convention.

The contact form is Theta = dt - i z^a dzbar^a + i zbar^a dz^a, the
frame fields are Z_0 = d/dt, Z_alpha = d/dz^alpha - i zbar^alpha d/dt,
and the extremal of the Yamabe functional is Phi = |w + i|^{-n} with
w = t + i|z|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graded import GradedPolynomial
from .jets import Jet, JetSpace


@dataclass(frozen=True)
class HPoint:
    z: tuple
    t: float

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def r(self) -> float:
        return math.sqrt(sum(abs(zi) ** 2 for zi in self.z))

    @property
    def w(self) -> complex:
        return self.t + 1j * self.r**2

    @property
    def rho(self) -> float:
        """Heisenberg norm (|z|^4 + t^2)^(1/4)."""
        return (self.r**4 + self.t**2) ** 0.25

    def coords(self) -> np.ndarray:
        return np.array(
            [self.t] + [zi.real for zi in self.z] + [zi.imag for zi in self.z]
        )

    @staticmethod
    def from_coords(x) -> "HPoint":
        x = np.asarray(x, dtype=float)
        n = (len(x) - 1) // 2
        z = tuple(complex(x[1 + k], x[1 + n + k]) for k in range(n))
        return HPoint(z, float(x[0]))

    def dilate(self, s: float) -> "HPoint":
        return HPoint(tuple(s * zi for zi in self.z), s * s * self.t)


def volume_density(n: int) -> float:
    """Lebesgue weight of (-1)^n Theta ^ dTheta^n: dV = 4^n n! dt dmu(z)."""
    return 4.0**n * math.factorial(n)


# -- frame action on scalar closures ---------------------------------------


def frame_apply(n: int, j: int, f, x: HPoint) -> complex:
    """Directional derivative Z_j f at x.

    ``f`` is a closure f(z_list, t) written against generic arithmetic;
    its gradient is extracted with first-order jets.
    """
    space = JetSpace(2 * n + 1, 1)
    coords = Jet.variables(space, x.coords())
    t = coords[0]
    z = [coords[1 + k] + 1j * coords[1 + n + k] for k in range(n)]
    val = f(z, t)
    if not isinstance(val, Jet):
        return 0.0
    g = val.gradient()
    d_t = g[0]
    if j == 0:
        return complex(d_t)
    if 1 <= j <= n:
        dz = 0.5 * (g[j] - 1j * g[n + j])
        return complex(dz - 1j * np.conj(x.z[j - 1]) * d_t)
    if n < j <= 2 * n:
        a = j - n
        dzb = 0.5 * (g[a] + 1j * g[n + a])
        return complex(dzb + 1j * x.z[a - 1] * d_t)
    raise IndexError(f"frame index {j} out of range")


# -- the extremal -----------------------------------------------------------


def extremal_phi(x: HPoint, eps: float = 1.0, n: int | None = None) -> float:
    """Phi^eps = eps^n |w + i eps^2|^{-n}, computed in log space."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    nn = x.n if n is None else n
    mag2 = x.t**2 + (x.r**2 + eps**2) ** 2
    return math.exp(nn * math.log(eps) - 0.5 * nn * math.log(mag2))


def phi_derivatives(x: HPoint) -> tuple:
    """(Z_alpha Phi)_alpha, (Z_albar Phi)_alpha, Z_0 Phi in closed form."""
    n = x.n
    denom = (x.t**2 + (x.r**2 + 1) ** 2) ** (0.5 * (n + 2))
    hol = tuple(
        1j * n * np.conj(za) * (x.t + 1j * (x.r**2 + 1)) / denom for za in x.z
    )
    antihol = tuple(
        -1j * n * za * (x.t - 1j * (x.r**2 + 1)) / denom for za in x.z
    )
    reeb = -n * x.t / denom
    return hol, antihol, reeb


def z_phi(n: int, j: int, x: HPoint) -> complex:
    hol, antihol, reeb = phi_derivatives(x)
    if j == 0:
        return complex(reeb)
    if 1 <= j <= n:
        return complex(hol[j - 1])
    return complex(antihol[j - n - 1])


# -- symbolic model frame ----------------------------------------------------


def model_frame_polynomial(n: int, j: int) -> dict:
    """Z_j as a derivation: map direction label -> GradedPolynomial coefficient."""
    one = GradedPolynomial.constant(n, 1.0)
    if j == 0:
        return {0: one}
    if 1 <= j <= n:
        return {j: one, 0: GradedPolynomial.variable(n, j + n) * (-1j)}
    if n < j <= 2 * n:
        return {j: one, 0: GradedPolynomial.variable(n, j - n) * (1j)}
    raise IndexError(f"frame index {j} out of range")


def frame_commutator(n: int, j: int, k: int) -> dict:
    """[Z_j, Z_k] as a derivation with polynomial coefficients (exact)."""
    X = model_frame_polynomial(n, j)
    Y = model_frame_polynomial(n, k)
    out: dict = {}
    for b, Yb in Y.items():
        acc = GradedPolynomial(n)
        for a, Xa in X.items():
            acc = acc + Xa * Yb.diff(a)
        if acc.terms:
            out[b] = out.get(b, GradedPolynomial(n)) + acc
    for b, Xb in X.items():
        acc = GradedPolynomial(n)
        for a, Ya in Y.items():
            acc = acc + Ya * Xb.diff(a)
        if acc.terms:
            out[b] = out.get(b, GradedPolynomial(n)) - acc
    return {b: p for b, p in out.items() if p.terms}
