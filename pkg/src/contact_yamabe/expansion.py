"""Graded expansions of the special coframe, frame, and volume form.

Given the curvature and Tanno data at the center (with vanishing
Webster torsion there), the homogeneous parts of the special coframe
follow from the recursion

    omega^b_{a(m)} = (1/m) (R^b_{a cd} z^c theta^d + ...)_(m)
    theta^b_(m)    = (1/m) (z^a omega^b_a + dz^b)_(m)
    theta_(m)      = (1/m) (2 J_{ab} z^a theta^b + 2 dt)_(m)

with J_{ab} expanded through grade 2 from the Tanno tensor.  The frame
coefficients s^k_j (W_j = s^k_j Z_k) come from inverting the matrix
theta^j(Z_k) = I + nilpotent; the volume ratio dV_theta / dV comes from
wedging the graded coframe, and v_m^{jk} collects the products of
frame coefficients weighting the gradient integrands.

All outputs are polynomial identities; they power both the closed-form
coefficient table and the Monte Carlo / quadrature verification paths.
"""

from __future__ import annotations

import math

import numpy as np

from .graded import GradedForm, GradedPolynomial
from .heisenberg import model_frame_polynomial
from .quadrature import (
    RadialFunction,
    contraction_integral,
    kernel_gradient_pair,
    kernel_phi_power,
    kernel_phi_squared,
)


def bar(n: int, j: int) -> int:
    if j == 0:
        return 0
    return j + n if j <= n else j - n


# -- input data ----------------------------------------------------------------


def random_constrained_tanno(n: int, rng, scale: float = 1.0) -> np.ndarray:
    """Random Q^{bar gamma}_{alpha beta}(q) satisfying the structural constraint.

    The admissible tensors satisfy the linear relation
    Q[r, b, a] = Q[a, b, r] - Q[a, r, b]; samples are orthogonal
    projections of Gaussian tensors onto that subspace.
    """
    dim = n**3

    def constraint_matrix():
        rows = []
        for r in range(n):
            for b in range(n):
                for a in range(n):
                    row = np.zeros(dim)
                    row[(r * n + b) * n + a] += 1.0
                    row[(a * n + b) * n + r] -= 1.0
                    row[(a * n + r) * n + b] += 1.0
                    rows.append(row)
        return np.array(rows)

    C = constraint_matrix()
    _, s, vt = np.linalg.svd(C)
    null = vt[np.sum(s > 1e-12) :]  # orthonormal basis of the kernel
    coeff = rng.standard_normal(len(null)) + 1j * rng.standard_normal(len(null))
    Q = (coeff @ null).reshape(n, n, n) * scale
    return Q


def mixed_curvature_completion(q_invariant: float, n: int) -> tuple:
    """Coefficients (a, b) of the trace-consistent mixed curvature block.

    R^alpha_{beta, lambda bar mu} = a d^a_b d_{l m} + b d^a_l d_{b m}
    solves the normalized-trace conditions: the Ricci-type trace
    vanishes and the opposite trace equals q_invariant / 4.
    """
    b = -q_invariant / (4.0 * n * (n * n - 1))
    a = q_invariant / (4.0 * (n * n - 1))
    return a, b


def synthetic_curvature(Q_hol: np.ndarray, n: int) -> np.ndarray:
    """Curvature components at q consistent with a given Tanno tensor.

    The barred-lower block comes from the quadratic Tanno formula; the
    mixed block is the minimal trace-consistent completion (only its
    traces enter any of the integrals); all other blocks vanish.
    Labels are horizontal, 1..2n, stored with offset 1 in a
    (2n+1)^4 array shaped like the chart pipeline output.
    """
    from .frames import curvature_from_tanno

    d = 2 * n + 1
    R = np.zeros((d, d, d, d), dtype=complex)
    anti = curvature_from_tanno(Q_hol, n)  # [alpha, beta, lambda, mu]
    for a in range(n):
        for b in range(n):
            for l in range(n):
                for m in range(n):
                    val = anti[a, b, l, m]
                    R[1 + a, 1 + n + b, 1 + l, 1 + m] = val
                    R[1 + a, 1 + n + b, 1 + m, 1 + l] = -val
                    R[1 + n + a, 1 + b, 1 + n + l, 1 + n + m] = np.conj(val)
                    R[1 + n + a, 1 + b, 1 + n + m, 1 + n + l] = -np.conj(val)
    frak = float(np.sum(np.abs(Q_hol) ** 2))
    ca, cb = mixed_curvature_completion(frak, n)
    for a in range(n):
        for b in range(n):
            for l in range(n):
                for m in range(n):
                    val = ca * (a == b) * (l == m) + cb * (a == l) * (b == m)
                    R[1 + a, 1 + b, 1 + l, 1 + n + m] = val
                    R[1 + a, 1 + b, 1 + n + m, 1 + l] = -val
                    R[1 + n + a, 1 + n + b, 1 + n + l, 1 + m] = np.conj(val)
                    R[1 + n + a, 1 + n + b, 1 + m, 1 + n + l] = -np.conj(val)
    return R


def scalar_curvature_from(R_q: np.ndarray, n: int) -> complex:
    """Scalar curvature at q from special-frame curvature components."""
    total = 0j
    for b in range(1, n + 1):
        bb = b + n
        for a in range(1, n + 1):
            aa = a + n
            total += R_q[a, b, a, bb] + R_q[aa, b, aa, bb]
            total += R_q[a, bb, a, b] + R_q[aa, bb, aa, b]
    return total


# -- the engine ----------------------------------------------------------------


class GradedFrameData:
    """Homogeneous expansion data of a special frame with A(q) = 0."""

    def __init__(self, n: int, R_q: np.ndarray, Q_hol: np.ndarray,
                 J2_extra: np.ndarray | None = None):
        self.n = n
        self.R = np.asarray(R_q, dtype=complex)
        self.Q = np.asarray(Q_hol, dtype=complex)
        if J2_extra is not None:
            J2_extra = np.asarray(J2_extra, dtype=complex)
            sym = 0.5 * (J2_extra + np.swapaxes(J2_extra, 2, 3))
            anti = 0.5 * (sym - np.swapaxes(sym, 0, 1))
            self.J2_extra = anti  # antisym in (alpha, beta), sym in (rho, mu)
        else:
            self.J2_extra = None
        self._build()

    # J_{ab} graded parts as polynomials (lowered, antisymmetric)
    def _j_lowered(self):
        n = self.n
        P = GradedPolynomial
        J = {}
        for a in range(1, 2 * n + 1):
            for b in range(1, 2 * n + 1):
                J[(a, b)] = P(n)
        for al in range(1, n + 1):
            J[(al, al + n)] = J[(al, al + n)] + P.constant(n, -1j)
            J[(al + n, al)] = J[(al + n, al)] + P.constant(n, 1j)
        # grade 1: J_{alpha beta (1)} = Q^{bar alpha}_{beta gamma} z^gamma
        for al in range(1, n + 1):
            for be in range(1, n + 1):
                p = P(n)
                for g in range(1, n + 1):
                    c = self.Q[al - 1, be - 1, g - 1]
                    if c:
                        p = p + P.monomial(n, (g,), c)
                if p.terms:
                    J[(al, be)] = J[(al, be)] + p
                    J[(al + n, be + n)] = J[(al + n, be + n)] + p.conjugate()
        # grade 2 mixed: J_{alpha bar beta (2)} = (i/2) Q^{bar g}_{a l} conj(Q^{bar g}_{b m}) z^l zbar^m
        for al in range(1, n + 1):
            for be in range(1, n + 1):
                p = P(n)
                for g in range(n):
                    for l in range(1, n + 1):
                        for m in range(1, n + 1):
                            c = 0.5j * self.Q[g, al - 1, l - 1] * np.conj(
                                self.Q[g, be - 1, m - 1]
                            )
                            if c:
                                p = p + P.monomial(n, (l, m + n), c)
                if p.terms:
                    J[(al, be + n)] = J[(al, be + n)] + p
                    J[(al + n, be)] = J[(al + n, be)] + p.conjugate()
        # optional grade-2 holomorphic pair block (t-independent, (0,2) part)
        if self.J2_extra is not None:
            for al in range(1, n + 1):
                for be in range(1, n + 1):
                    p = P(n)
                    for r in range(1, n + 1):
                        for m in range(1, n + 1):
                            c = self.J2_extra[al - 1, be - 1, r - 1, m - 1]
                            if c:
                                p = p + P.monomial(n, (r + n, m + n), c)
                    if p.terms:
                        J[(al, be)] = J[(al, be)] + p
                        J[(al + n, be + n)] = J[(al + n, be + n)] + p.conjugate()
        return J

    def _build(self):
        n = self.n
        P = GradedPolynomial
        F = GradedForm
        self.J_low = self._j_lowered()

        dz = {a: F.basis(n, a) for a in range(1, 2 * n + 1)}
        dt = F.basis(n, 0)
        Theta = dt
        for al in range(1, n + 1):
            Theta = Theta + dz[al + n].scale(P.monomial(n, (al,), -1j))
            Theta = Theta + dz[al].scale(P.monomial(n, (al + n,), 1j))
        self.Theta = Theta

        # omega^b_{a(2)} = (1/2) R^b_{a c d}(q) z^c dz^d
        omega2 = {}
        for a in range(1, 2 * n + 1):
            for b in range(1, 2 * n + 1):
                form = F(n)
                for c in range(1, 2 * n + 1):
                    for dd in range(1, 2 * n + 1):
                        coeff = self.R[b, a, c, dd]
                        if coeff:
                            form = form + dz[dd].scale(
                                P.monomial(n, (c,), 0.5 * coeff)
                            )
                omega2[(a, b)] = form
        self.omega2 = omega2

        # theta^b graded parts: (1) = dz^b, (2) = 0, (3) = (1/3) z^a omega^b_{a(2)}
        theta_b = {}
        for b in range(1, 2 * n + 1):
            part3 = F(n)
            for a in range(1, 2 * n + 1):
                part3 = part3 + omega2[(a, b)].scale(
                    P.monomial(n, (a,), 1.0 / 3.0)
                )
            theta_b[b] = dz[b] + part3
        self.theta_b = theta_b

        # theta graded parts: (2) = Theta, (m) = (1/m)(2 J_{ab} z^a theta^b + 2 dt)_(m)
        theta = Theta
        for m in (3, 4):
            acc = F(n)
            for a in range(1, 2 * n + 1):
                for b in range(1, 2 * n + 1):
                    Jab = self.J_low[(a, b)]
                    if not Jab.terms:
                        continue
                    acc = acc + theta_b[b].scale(Jab * P.monomial(n, (a,), 2.0))
            part = acc.graded_part(m)
            theta = theta + part.scale(P.constant(n, 1.0 / m))
        self.theta = theta

        # frame coefficients s^k_j from inverting C[j][k] = theta^j(Z_k)
        d = 2 * n + 1
        frames = [model_frame_polynomial(n, k) for k in range(d)]
        C = [[None] * d for _ in range(d)]
        forms = [self.theta] + [theta_b[b] for b in range(1, d)]
        for j in range(d):
            for k in range(d):
                C[j][k] = forms[j].apply_vectors(frames[k]).truncate(4)
        Nmat = [[C[j][k] - (1.0 if j == k else 0.0) for k in range(d)] for j in range(d)]
        S = [[P.constant(n, 1.0 if j == k else 0.0) for k in range(d)] for j in range(d)]
        term = [[P.constant(n, 1.0 if j == k else 0.0) for k in range(d)] for j in range(d)]
        for _ in range(5):
            new = [[P(n) for _ in range(d)] for _ in range(d)]
            nonzero = False
            for i in range(d):
                for j in range(d):
                    acc = P(n)
                    for k in range(d):
                        acc = acc + term[i][k] * Nmat[k][j]
                    acc = (acc * (-1.0)).truncate(4)
                    new[i][j] = acc
                    nonzero = nonzero or bool(acc.terms)
            if not nonzero:
                break
            for i in range(d):
                for j in range(d):
                    S[i][j] = S[i][j] + new[i][j]
            term = new
        self.s_matrix = S  # S[k][j] = s^k_j

        # volume ratio: theta ^ (dtheta)^n / (Theta ^ dTheta^n)
        dtheta = F(n)
        for a in range(1, d):
            for b in range(1, d):
                Jab = self.J_low[(a, b)]
                if not Jab.terms:
                    continue
                dtheta = dtheta + theta_b[a].wedge(theta_b[b]).scale(Jab)
        dtheta = dtheta.truncate(2 * 1 + 4)
        top = self.theta
        for _ in range(n):
            top = top.wedge(dtheta)
            top = top.truncate(2 * n + 2 + 4)
        key = tuple(range(0, 2 * n + 1))  # sorted: (0, 1, ..., 2n)
        coeff = top.coefficient(key)
        c0 = coeff.graded_part(0).coeff(())
        self.volume_series = coeff * (1.0 / c0)
        self.dtheta_form = dtheta

    # -- extracted data ----------------------------------------------------

    def s_part(self, k: int, j: int, m: int) -> GradedPolynomial:
        """Graded part s^k_{j(m)}."""
        return self.s_matrix[k][j].graded_part(m)

    def v_part(self, m: int) -> GradedPolynomial:
        return self.volume_series.graded_part(m)

    def v_jk(self, m: int, j: int, k: int) -> GradedPolynomial:
        """v_m^{jk} = sum over splits of v s^j_{beta} s^k_{bar beta} parts."""
        n = self.n
        o = lambda idx: 2 if idx == 0 else 1
        total = GradedPolynomial(n)
        for m0 in range(m + 1):
            for m1 in range(m - m0 + 1):
                m2 = m - m0 - m1
                v = self.v_part(m0)
                if not v.terms:
                    continue
                for be in range(1, n + 1):
                    sj = self.s_part(j, be, m1 + o(j) - 1)
                    if not sj.terms:
                        continue
                    sk = self.s_part(k, bar(n, be), m2 + o(k) - 1)
                    if not sk.terms:
                        continue
                    total = total + v * sj * sk
        return total


# -- coefficient integrals -------------------------------------------------


def _z_factor(n: int, label: int) -> GradedPolynomial:
    """Monomial carried by Z_label Phi: zbar^a for holomorphic, z^a else."""
    if label == 0:
        return GradedPolynomial.constant(n, 1.0)
    if label <= n:
        return GradedPolynomial.variable(n, label + n)
    return GradedPolynomial.variable(n, label - n)


def _pair_type(n: int, label: int) -> str:
    if label == 0:
        return "reeb"
    return "hol" if label <= n else "anti"


def a_m_integral(data: GradedFrameData, m: int, mode: str = "closed", **kw):
    """a_m = int |Phi|^p v_m dV."""
    return contraction_integral(
        data.v_part(m), kernel_phi_power(data.n), data.n, mode=mode, **kw
    )


def b_m_integral(data: GradedFrameData, m: int, mode: str = "closed", **kw):
    """b_m = 2 int v_m^{jk} Z_j Phi Z_k Phi dV."""
    n = data.n
    d = 2 * n + 1
    total = 0j
    sigma2 = 0.0
    for j in range(d):
        for k in range(d):
            vjk = data.v_jk(m, j, k)
            if not vjk.terms:
                continue
            poly = vjk * _z_factor(n, j) * _z_factor(n, k)
            kern = kernel_gradient_pair(n, _pair_type(n, j), _pair_type(n, k))
            out = contraction_integral(poly, kern, n, mode=mode, **kw)
            if mode == "mc":
                val, sig = out
                total += val
                sigma2 += sig**2
            else:
                total += out
    total = 2.0 * total
    if mode == "mc":
        return total, 2.0 * math.sqrt(sigma2)
    return total


def c2_integral(data: GradedFrameData, mode: str = "closed", **kw):
    """c_2 = R(q) int |Phi|^2 dV with R(q) from the curvature traces."""
    n = data.n
    scal = scalar_curvature_from(data.R, n)
    base = contraction_integral(
        GradedPolynomial.constant(n, 1.0), kernel_phi_squared(n), n, mode=mode, **kw
    )
    if mode == "mc":
        val, sig = base
        return scal * val, abs(scal) * sig
    return scal * base
