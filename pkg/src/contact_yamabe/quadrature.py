"""Integral classes over the Heisenberg group.

Everything reduces to a product of a sphere integral and a radial
moment: for a polynomial P(z, zbar, t) and a kernel F(r, t),

    int P * F dV = 4^n n! * sum_{monomials} c
                   * int_{S^{2n-1}} zeta^A zetabar^B dnu
                   * int int F t^k r^{|A|+|B| + 2n - 1} dr dt.

Sphere integrals have the closed form 2 pi^n / (n+m-1)! * (number of
permutations matching the multi-indices); radial moments of the kernels
used here are Gamma-function ratios (the N1 table).  Alongside the
closed forms there are an adaptive-quadrature route (QUADPACK after
mapping to a finite box) and a Monte Carlo sphere route with a fixed
default seed, so every constant can be cross-checked three ways.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .exact import PiPow, gamma_exact
from .graded import GradedPolynomial

DEFAULT_SEED = 20240901


# -- N1 integrals -----------------------------------------------------------


@dataclass(frozen=True)
class N1Params:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        a, b, g = self.alpha, self.beta, self.gamma
        if not (a > 0 and g + 1 > 0 and b + 1 > 0 and a - g - 1 > 0):
            raise ValueError(f"N1 parameters out of domain: {self}")
        if not (2 * a - 2 * g - b > 3):
            raise ValueError(f"N1 convergence condition fails: {self}")


def n1_closed(alpha, beta, gamma) -> float:
    """Gamma-ratio closed form of the (r, t) kernel integral."""
    N1Params(alpha, beta, gamma)
    lg = math.lgamma
    val = (
        lg(0.5 * (beta + 1))
        + lg(alpha - gamma - 0.5 * beta - 1.5)
        + lg(0.5 * (gamma + 1))
        + lg(0.5 * (alpha - gamma - 1))
        - lg(alpha - gamma - 1)
        - lg(0.5 * alpha)
    )
    return 0.5 * math.exp(val)


def n1_exact(alpha, beta, gamma) -> PiPow:
    """Exact value for integer or half-integer parameters."""
    N1Params(float(alpha), float(beta), float(gamma))
    a, b, g = Fraction(alpha), Fraction(beta), Fraction(gamma)
    num = (
        gamma_exact((b + 1) / 2)
        * gamma_exact(a - g - b / 2 - Fraction(3, 2))
        * gamma_exact((g + 1) / 2)
        * gamma_exact((a - g - 1) / 2)
    )
    den = gamma_exact(a - g - 1) * gamma_exact(a / 2) * 2
    return num / den


def n1_numeric(alpha, beta, gamma, tol: float = 1e-10) -> float:
    """Adaptive quadrature of int_0^inf int_-inf^inf |t+i(1+r^2)|^-a r^b |t|^g.

    The domain is mapped to a finite box by t = tan(u), r = s/(1-s).
    """
    N1Params(alpha, beta, gamma)

    def inner(s):
        r = s / (1.0 - s)
        dr = 1.0 / (1.0 - s) ** 2
        base = 1.0 + r * r

        def ft(u):
            t = math.tan(u)
            dt = 1.0 / math.cos(u) ** 2
            mag2 = t * t + base * base
            return mag2 ** (-0.5 * alpha) * (abs(t) ** gamma if gamma else 1.0) * dt

        val, _ = integrate.quad(ft, -0.5 * math.pi, 0.5 * math.pi,
                                epsabs=1e-15, epsrel=tol, limit=200)
        return val * r**beta * dr

    val, _ = integrate.quad(inner, 0.0, 1.0, epsabs=1e-15, epsrel=tol, limit=200)
    return val


# -- sphere integrals --------------------------------------------------------


def _match_count(A, B) -> int:
    """Number of permutations sigma with A = sigma(B); multiset counting."""
    if len(A) != len(B):
        raise ValueError("multi-indices must have equal length")
    from collections import Counter

    ca, cb = Counter(A), Counter(B)
    if ca != cb:
        return 0
    count = 1
    for mult in ca.values():
        count *= math.factorial(mult)
    return count


def sphere_monomial_exact(A, B, n: int) -> PiPow:
    """int_{S^{2n-1}} z^A zbar^B dnu = 2 pi^n / (n+m-1)! * sum_sigma delta(A, sigma B)."""
    m = len(A)
    count = _match_count(tuple(A), tuple(B))
    return PiPow(Fraction(2 * count, math.factorial(n + m - 1)), 2 * n)


def sphere_monomial(A, B, n: int) -> float:
    return float(sphere_monomial_exact(A, B, n))


def sphere_surface(n: int) -> float:
    return float(PiPow(Fraction(2, math.factorial(n - 1)), 2 * n))


def sample_sphere(n: int, count: int, rng) -> np.ndarray:
    """Uniform samples on S^{2n-1} in C^n, shape (n, count)."""
    g = rng.standard_normal((n, count)) + 1j * rng.standard_normal((n, count))
    return g / np.linalg.norm(g, axis=0, keepdims=True)


# -- radial kernels ----------------------------------------------------------


@dataclass(frozen=True)
class RadialTerm:
    """c * t^tpow * (1+r^2)^upow * |t + i(1+r^2)|^(-alpha)."""

    coeff: complex
    alpha: int
    tpow: int = 0
    upow: int = 0

    def __call__(self, r, t):
        base = 1.0 + r * r
        mag2 = t * t + base * base
        val = self.coeff * mag2 ** (-0.5 * self.alpha)
        if self.tpow:
            val = val * t**self.tpow
        if self.upow:
            val = val * base**self.upow
        return val


class RadialFunction:
    """A finite sum of RadialTerm kernels."""

    def __init__(self, terms):
        self.terms = list(terms)

    def __call__(self, r, t):
        return sum(term(r, t) for term in self.terms)

    def moment_closed(self, m: int) -> complex:
        """int int F(r,t) r^m dr dt via the N1 table (odd t-powers vanish)."""
        total = 0j
        for term in self.terms:
            if term.tpow % 2 == 1:
                continue
            for i in range(term.upow + 1):
                total += (
                    term.coeff
                    * math.comb(term.upow, i)
                    * n1_closed(term.alpha, m + 2 * i, term.tpow)
                )
        return total

    def moment_numeric(self, m: int, tol: float = 1e-9) -> complex:
        re = radial_moment(lambda r, t: np.real(self(r, t)), m, tol)
        im = radial_moment(lambda r, t: np.imag(self(r, t)), m, tol)
        return re + 1j * im


def radial_moment(F, m: int, tol: float = 1e-9) -> float:
    """Adaptive quadrature of int_0^inf int_-inf^inf F(r, t) r^m dt dr."""

    def inner(s):
        r = s / (1.0 - s)
        dr = 1.0 / (1.0 - s) ** 2

        def ft(u):
            t = math.tan(u)
            dt = 1.0 / math.cos(u) ** 2
            return F(r, t) * dt

        val, _ = integrate.quad(ft, -0.5 * math.pi, 0.5 * math.pi,
                                epsabs=1e-15, epsrel=tol, limit=200)
        return val * r**m * dr

    val, _ = integrate.quad(inner, 0.0, 1.0, epsabs=1e-15, epsrel=tol, limit=200)
    return val


# -- polynomial x radial integrals over H^n ----------------------------------


def _split_monomials(P: GradedPolynomial):
    """Group terms by (z-degree, t-power); values are (A, B, coeff) lists."""
    groups: dict = {}
    for (ze, zbe, te), c in P.terms.items():
        A = tuple(
            k + 1 for k in range(P.n) for _ in range(ze[k])
        )
        B = tuple(
            k + 1 for k in range(P.n) for _ in range(zbe[k])
        )
        groups.setdefault((len(A) + len(B), te), []).append((A, B, c))
    return groups


def contraction_integral(
    P: GradedPolynomial,
    F: RadialFunction,
    n: int,
    mode: str = "closed",
    samples: int = 0,
    rng=None,
    tol: float = 1e-9,
):
    """int_{H^n} P(z, zbar, t) F(r, t) dV.

    mode "closed": exact sphere values x N1 radial table.
    mode "quad":   exact sphere values x adaptive radial quadrature.
    mode "mc":     Monte Carlo sphere average x N1 radial table;
                   returns (value, sigma) with sigma the standard error.

    Monomials whose holomorphic and antiholomorphic slots cannot be
    permutation-matched contribute exactly zero.
    """
    vol = 4.0**n * math.factorial(n)
    groups = _split_monomials(P)

    if mode in ("closed", "quad"):
        total = 0j
        for (deg, te), monos in groups.items():
            moment_cache: dict = {}
            for A, B, c in monos:
                sph = sphere_monomial(A, B, n)
                if sph == 0.0:
                    continue
                key = (deg, te)
                if key not in moment_cache:
                    Ft = RadialFunction(
                        [
                            RadialTerm(t0.coeff, t0.alpha, t0.tpow + te, t0.upow)
                            for t0 in F.terms
                        ]
                    )
                    m = deg + 2 * n - 1
                    moment_cache[key] = (
                        Ft.moment_closed(m)
                        if mode == "closed"
                        else Ft.moment_numeric(m, tol)
                    )
                total += c * sph * moment_cache[key]
        return vol * total

    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        rng = np.random.default_rng(DEFAULT_SEED)
    if samples <= 0:
        samples = 100_000
    zeta = sample_sphere(n, samples, rng)
    surface = sphere_surface(n)
    per_sample = np.zeros(samples, dtype=complex)
    for (deg, te), monos in groups.items():
        Pk = GradedPolynomial(n)
        for A, B, c in monos:
            Pk = Pk + GradedPolynomial.monomial(n, A + tuple(b + n for b in B), c)
        vals = Pk(list(zeta), np.zeros(samples))
        Ft = RadialFunction(
            [
                RadialTerm(t0.coeff, t0.alpha, t0.tpow + te, t0.upow)
                for t0 in F.terms
            ]
        )
        radial = Ft.moment_closed(deg + 2 * n - 1)
        per_sample += vals * (surface * radial)
    mean = per_sample.mean()
    sigma = np.sqrt(np.mean(np.abs(per_sample - mean) ** 2) / samples)
    return vol * mean, vol * float(sigma)


# -- kernels used by the coefficient suite -----------------------------------


def kernel_phi_power(n: int) -> RadialFunction:
    """|Phi|^p with p = 2 + 2/n, i.e. |w + i|^{-(2n+2)}."""
    return RadialFunction([RadialTerm(1.0, 2 * n + 2)])


def kernel_phi_squared(n: int) -> RadialFunction:
    return RadialFunction([RadialTerm(1.0, 2 * n)])


def kernel_gradient_pair(n: int, jtype: str, ktype: str) -> RadialFunction:
    """Radial factor of Z_j Phi * Z_k Phi once monomial factors are stripped.

    jtype/ktype in {"hol", "anti", "reeb"}: Z_alpha Phi carries the
    monomial zbar^alpha, Z_albar Phi carries z^alpha, Z_0 Phi none; the
    remaining radial factors multiply to the kernels below (all over
    |w + i|^{2n+4}).
    """
    a = 2 * n + 4
    n2 = float(n * n)
    pair = (jtype, ktype)
    if pair == ("hol", "hol"):
        # (in)^2 (t + i(1+r^2))^2
        return RadialFunction(
            [
                RadialTerm(-n2, a, 2, 0),
                RadialTerm(-2j * n2, a, 1, 1),
                RadialTerm(n2, a, 0, 2),
            ]
        )
    if pair == ("anti", "anti"):
        return RadialFunction(
            [
                RadialTerm(-n2, a, 2, 0),
                RadialTerm(2j * n2, a, 1, 1),
                RadialTerm(n2, a, 0, 2),
            ]
        )
    if pair in (("hol", "anti"), ("anti", "hol")):
        return RadialFunction([RadialTerm(n2, a, 2, 0), RadialTerm(n2, a, 0, 2)])
    if pair == ("hol", "reeb") or pair == ("reeb", "hol"):
        return RadialFunction([RadialTerm(-1j * n2, a, 2, 0), RadialTerm(n2, a, 1, 1)])
    if pair == ("anti", "reeb") or pair == ("reeb", "anti"):
        return RadialFunction([RadialTerm(1j * n2, a, 2, 0), RadialTerm(n2, a, 1, 1)])
    if pair == ("reeb", "reeb"):
        return RadialFunction([RadialTerm(n2, a, 2, 0)])
    raise ValueError(f"unknown pair {pair}")
