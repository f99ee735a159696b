"""The Tanaka-Webster-Tanno connection on a chart.

All quantities are computed pointwise from jet expansions of the chart
fields.  The frame used for component computations is the coordinate
horizontal frame W_a = d/dx^a - theta(d/dx^a) T (a = 1..2n) together
with W_0 = T; connection coefficients come from the Koszul formulas

    2 h(nabla_X Y, Z) = X h(Y,Z) + Y h(X,Z) - Z h(X,Y)
                        - h([X,Z],Y) - h([Y,Z],X) + h([X,Y],Z)

for horizontal X, Y, Z, and

    2 h(nabla_T Y, Z) = T h(Y,Z) - h([T,Z],Y) + h([T,Y],Z)

for the Reeb direction, with Gamma^0_{jk} = Gamma^l_{j0} = 0.

Jet orders: values of theta and J at order N give dtheta, the Reeb
field, h at N-1, Gamma and the Tanno/Webster tensors at N-2, and the
curvature at N-3; point values of everything need N = 3.
"""

from __future__ import annotations

import math

import numpy as np

from .charts import ContactChart, gauss_solve, mat_inverse, mat_mul, mat_vec
from .jets import Jet, JetSpace, TaylorPoly


def _restrict(obj, order: int):
    if isinstance(obj, Jet):
        return obj if obj.space.order == order else obj.restrict(order)
    if isinstance(obj, list):
        return [_restrict(o, order) for o in obj]
    raise TypeError(type(obj))


def values(obj):
    """Extract value parts of nested jet lists as a numpy array."""
    if isinstance(obj, Jet):
        return np.asarray(obj.value)
    if isinstance(obj, list):
        return np.array([values(o) for o in obj])
    return np.asarray(obj)


def _directional(vec, fields, out_order):
    """Apply the vector field ``vec`` (coordinate components, jets) to jets."""
    vecs = _restrict(vec, out_order)

    def apply_one(f):
        total = None
        for i, vi in enumerate(vecs):
            term = vi * f.diff(i)
            total = term if total is None else total + term
        return total

    if isinstance(fields, Jet):
        return apply_one(fields)
    return [_directional(vec, f, out_order) for f in fields]


def pfaffian(A):
    """Pfaffian of an even antisymmetric matrix over a commutative ring."""
    m = len(A)
    if m == 0:
        return 1.0
    if m == 2:
        return A[0][1]
    total = None
    for j in range(1, m):
        rest = [r for r in range(m) if r not in (0, j)]
        minor = [[A[r][c] for c in rest] for r in rest]
        term = A[0][j] * pfaffian(minor)
        if j % 2 == 0:
            term = term * (-1.0)
        total = term if total is None else total + term
    return total


def volume_density_from(theta, dtheta, n: int):
    """Lebesgue weight of (-1)^n theta ^ dtheta^n against dt dx^1 dy^1 ...

    The coordinate order of the package is (t, x^1..x^n, y^1..y^n); the
    reported density is against the interleaved orientation
    dt dx^1 dy^1 ... dx^n dy^n, which is +4^n n! on the model space.
    """
    d = 2 * n + 1
    sign = (-1.0) ** (n * (n - 1) // 2 + n)
    scale = 2.0**n * math.factorial(n) * sign
    total = None
    for k in range(d):
        rest = [r for r in range(d) if r != k]
        minor = [[dtheta[r][c] for c in rest] for r in rest]
        term = theta[k] * pfaffian(minor) * (scale * (-1.0) ** k)
        total = term if total is None else total + term
    return total


class TWTJets:
    """Jet-valued TWT data at a point (or batch of points) of a chart."""

    def __init__(self, chart: ContactChart, x, order: int = 3):
        self.chart = chart
        self.n = chart.n
        self.x = np.asarray(x, dtype=float)
        self.order = order
        self._build()

    # frame labels: 0 = Reeb, a = 1..2n the horizontal coordinate frame
    def _build(self):
        chart, n, N = self.chart, self.n, self.order
        d = 2 * n + 1
        coords = chart.coord_jets(self.x, N)
        theta = chart.theta_fn(coords)
        J = chart.j_fn(coords)

        # exterior derivative (factor-1/2 convention), level N-1
        dtheta = [
            [
                (theta[j].diff(i) - theta[i].diff(j)) * 0.5
                for j in range(d)
            ]
            for i in range(d)
        ]
        thL = _restrict(theta, N - 1)
        JL = _restrict(J, N - 1)

        # Reeb field: (dtheta + theta x theta) T = theta
        K = [
            [dtheta[i][j] + thL[i] * thL[j] for j in range(d)]
            for i in range(d)
        ]
        T = [row[0] for row in gauss_solve(K, [[thL[i]] for i in range(d)])]

        # coordinate metric h_ij = theta_i theta_j - dtheta(d_i, J d_j)
        BJ = mat_mul(dtheta, JL)
        h_coord = [
            [
                thL[i] * thL[j] - (BJ[i][j] + BJ[j][i]) * 0.5
                for j in range(d)
            ]
            for i in range(d)
        ]
        self.h_asym = max(
            float(np.max(np.abs((BJ[i][j] - BJ[j][i]).value)))
            for i in range(d)
            for j in range(i + 1, d)
        )

        # horizontal coordinate frame
        W = [None] * d  # W[0] = T, W[a] = d_a - theta_a T
        W[0] = T
        for a in range(1, d):
            W[a] = [
                (T[i] * thL[a]) * (-1.0) + (1.0 if i == a else 0.0) + thL[0] * 0.0
                for i in range(d)
            ]

        E = [[W[m][i] for m in range(d)] for i in range(d)]  # columns = frame
        P = mat_inverse(E)

        def h_pair(u, v):
            return sum(
                u[i] * h_coord[i][j] * v[j] for i in range(d) for j in range(d)
            )

        h_frame = [[h_pair(W[a], W[b]) for b in range(1, d)] for a in range(1, d)]
        h_full = [[h_pair(W[j], W[k]) for k in range(d)] for j in range(d)]

        J_frame = mat_mul(P, mat_mul(JL, E))

        self.coords = coords
        self.theta = theta
        self.dtheta = dtheta
        self.J = J
        self.T = T
        self.h_coord = h_coord
        self.W = W
        self.E = E
        self.P = P
        self.h_frame = h_frame
        self.h_full = h_full
        self.J_frame = J_frame

        if N >= 2:
            self._build_connection()
        if N >= 3:
            self._build_curvature()

    def _build_connection(self):
        n, d, N = self.n, 2 * self.n + 1, self.order
        W2 = _restrict(self.W, N - 2)
        h2 = _restrict(self.h_coord, N - 2)

        def bracket(u, v):
            """[u, v] in coordinates at level N-2."""
            out = []
            for i in range(d):
                term = None
                for jx in range(d):
                    t1 = _restrict(u[jx], N - 2) * v[i].diff(jx)
                    t2 = _restrict(v[jx], N - 2) * u[i].diff(jx)
                    add = t1 - t2
                    term = add if term is None else term + add
                out.append(term)
            return out

        def h_pair2(u, v):
            return sum(u[i] * h2[i][j] * v[j] for i in range(d) for j in range(d))

        # brackets of all frame pairs, coordinates and frame components
        C_coord = [[None] * d for _ in range(d)]
        for j in range(d):
            for k in range(j + 1, d):
                C_coord[j][k] = bracket(self.W[j], self.W[k])
        P2 = _restrict(self.P, N - 2)
        C_frame = [[None] * d for _ in range(d)]
        for j in range(d):
            for k in range(j + 1, d):
                C_frame[j][k] = mat_vec(P2, C_coord[j][k])

        # directional derivatives of the frame metric
        dh = [
            [[None] * (d - 1) for _ in range(d - 1)] for _ in range(d)
        ]  # dh[j][a][b] = W_j h_{ab}
        for j in range(d):
            for a in range(d - 1):
                for b in range(a, d - 1):
                    v = _directional(self.W[j], self.h_frame[a][b], N - 2)
                    dh[j][a][b] = v
                    dh[j][b][a] = v

        h_frame2 = [[_restrict(self.h_frame[a][b], N - 2) for b in range(d - 1)]
                    for a in range(d - 1)]
        hinv = mat_inverse(h_frame2)

        zero_vec = [self.theta[0].restrict(N - 2) * 0.0 for _ in range(d)]

        def Cc(j, k):
            if j == k:
                return zero_vec
            return C_coord[j][k] if j < k else [c * (-1.0) for c in C_coord[k][j]]

        W22 = W2

        # Koszul: horizontal-horizontal and Reeb rows
        zero = self.theta[0].restrict(N - 2) * 0.0
        Gamma = [[[zero for _ in range(d)] for _ in range(d)] for _ in range(d)]
        # Gamma[l][j][k] = theta^l( nabla_{W_j} W_k )
        for a in range(1, d):
            for b in range(1, d):
                rhs = []
                for dd in range(1, d):
                    expr = (
                        dh[a][b - 1][dd - 1]
                        + dh[b][a - 1][dd - 1]
                        - dh[dd][a - 1][b - 1]
                        - h_pair2(Cc(a, dd), W22[b])
                        - h_pair2(Cc(b, dd), W22[a])
                        + h_pair2(Cc(a, b), W22[dd])
                    )
                    rhs.append(expr * 0.5)
                for c in range(1, d):
                    Gamma[c][a][b] = sum(
                        hinv[c - 1][dd - 1] * rhs[dd - 1] for dd in range(1, d)
                    )
        for b in range(1, d):
            rhs = []
            for dd in range(1, d):
                expr = (
                    dh[0][b - 1][dd - 1]
                    - h_pair2(Cc(0, dd), W22[b])
                    + h_pair2(Cc(0, b), W22[dd])
                )
                rhs.append(expr * 0.5)
            for c in range(1, d):
                Gamma[c][0][b] = sum(
                    hinv[c - 1][dd - 1] * rhs[dd - 1] for dd in range(1, d)
                )

        self.C_coord = C_coord
        self.C_frame = C_frame
        self.Gamma = Gamma
        self.hinv_frame = hinv
        self.dh = dh

        # Tanno tensor Q^l_{jk} = W_k J^l_j - Gamma^s_{kj} J^l_s + Gamma^l_{ks} J^s_j
        Jf = self.J_frame
        Jf2 = _restrict(Jf, N - 2)
        Q = [[[None] * d for _ in range(d)] for _ in range(d)]
        for l in range(d):
            for j in range(d):
                for k in range(d):
                    term = _directional(self.W[k], Jf[l][j], N - 2)
                    for s in range(d):
                        term = term - Gamma[s][k][j] * Jf2[l][s]
                        term = term + Gamma[l][k][s] * Jf2[s][j]
                    Q[l][j][k] = term
        self.Q_frame = Q

        # Webster torsion tau(T, W_a) = Gamma^c_{0a} W_c - [T, W_a]
        A = [[None] * (d - 1) for _ in range(d)]  # rows incl. theta-component
        for a in range(1, d):
            tb = C_frame[0][a]
            for comp in range(d):
                A[comp][a - 1] = Gamma[comp][0][a] - tb[comp]
        self.A_mixed = [[A[c + 1][a] for a in range(d - 1)] for c in range(d - 1)]
        self.A_reeb_residual = [A[0][a] for a in range(d - 1)]
        self.A_lower = [
            [
                sum(self.A_mixed[c][a] * h_frame2[c][b] for c in range(d - 1))
                for b in range(d - 1)
            ]
            for a in range(d - 1)
        ]

    def _build_curvature(self):
        n, d, N = self.n, 2 * self.n + 1, self.order
        G3 = _restrict(self.Gamma, N - 3)
        Cf3 = [
            [
                None if self.C_frame[j][k] is None else _restrict(self.C_frame[j][k], N - 3)
                for k in range(d)
            ]
            for j in range(d)
        ]

        def Cframe(j, k):
            if j == k:
                return None
            if j < k:
                return Cf3[j][k]
            return [c * (-1.0) for c in Cf3[k][j]]

        zero = self.theta[0].restrict(N - 3) * 0.0
        R = [[[[zero for _ in range(d)] for _ in range(d)] for _ in range(d)]
             for _ in range(d)]
        # R[s][j][k][l] = theta^s(R(W_k, W_l) W_j), s and j horizontal
        for s in range(1, d):
            for j in range(1, d):
                for k in range(d):
                    for l in range(k + 1, d):
                        term = _directional(self.W[k], self.Gamma[s][l][j], N - 3)
                        term = term - _directional(self.W[l], self.Gamma[s][k][j], N - 3)
                        for e in range(1, d):
                            term = term + G3[e][l][j] * G3[s][k][e]
                            term = term - G3[e][k][j] * G3[s][l][e]
                        Cm = Cframe(k, l)
                        for m in range(d):
                            term = term - Cm[m] * G3[s][m][j]
                        R[s][j][k][l] = term
                        R[s][j][l][k] = term * (-1.0)
        self.R_frame = R

        # Ricci and scalar curvature
        Ric = [[None] * d for _ in range(d)]
        for j in range(d):
            for k in range(d):
                tr = zero
                for s in range(1, d):
                    if j == 0:
                        continue
                    tr = tr + R[s][j][s][k]
                Ric[j][k] = tr
        hf3 = _restrict(self.h_full, N - 3)
        hf_inv = mat_inverse(hf3)
        scal = zero
        for j in range(d):
            for k in range(d):
                scal = scal + hf_inv[j][k] * Ric[j][k]
        self.Ric_frame = Ric
        self.scalar = scal

    # -- derived conveniences ------------------------------------------------

    def volume_density(self):
        thL = _restrict(self.theta, self.order - 1)
        return volume_density_from(thL, self.dtheta, self.n)

    def coordinate_christoffels(self):
        """Gamma-coord^k_{ij} with nabla_{d_i} d_j = Gamma^k_{ij} d_k, level N-2."""
        d = 2 * self.n + 1
        N = self.order
        E2 = _restrict(self.E, N - 2)
        P2 = _restrict(self.P, N - 2)
        G = self.Gamma
        out = [[[None] * d for _ in range(d)] for _ in range(d)]
        for i in range(d):
            dP = [[self.P[s][j].diff(i) for j in range(d)] for s in range(d)]
            for j in range(d):
                inner = []
                for s in range(d):
                    term = dP[s][j]
                    for m in range(d):
                        for l in range(d):
                            g = G[s][l][m]
                            if _mag_is_zero(g):
                                continue
                            term = term + P2[m][j] * P2[l][i] * g
                    inner.append(term)
                for k in range(d):
                    out[k][i][j] = sum(E2[k][s] * inner[s] for s in range(d))
        return out


def _mag_is_zero(jet) -> bool:
    return not np.any(jet.c)


# -- plain-value wrappers ----------------------------------------------------


def first_order_data(chart: ContactChart, x) -> dict:
    """Numpy values of the metric-level data at x (no connection)."""
    tw = TWTJets(chart, x, order=1)
    return {
        "theta": values(tw.theta),
        "dtheta": values(tw.dtheta),
        "J": values(tw.J),
        "T": values(tw.T),
        "h": values(tw.h_coord),
        "h_frame": values(tw.h_frame),
        "E": values(tw.E),
        "J_frame": values(tw.J_frame),
        "volume_density": float(np.atleast_1d(values(tw.volume_density()))[0])
        if np.asarray(x).ndim == 1
        else values(tw.volume_density()),
        "h_asym": tw.h_asym,
    }


def twt_point(chart: ContactChart, x, order: int = 3) -> dict:
    """Values of the full TWT data at a single point or batch."""
    tw = TWTJets(chart, x, order=order)
    out = {
        "theta": values(tw.theta),
        "dtheta": values(tw.dtheta),
        "J": values(tw.J),
        "T": values(tw.T),
        "h": values(tw.h_coord),
        "h_frame": values(tw.h_frame),
        "h_full": values(tw.h_full),
        "E": values(tw.E),
        "P": values(tw.P),
        "J_frame": values(tw.J_frame),
        "volume_density": values(tw.volume_density()),
    }
    if order >= 2:
        out["Gamma"] = values(tw.Gamma)
        out["Q_frame"] = values(tw.Q_frame)
        out["A_mixed"] = values(tw.A_mixed)
        out["A_lower"] = values(tw.A_lower)
        out["A_reeb_residual"] = values(tw.A_reeb_residual)
    if order >= 3:
        out["R_frame"] = values(tw.R_frame)
        out["Ric_frame"] = values(tw.Ric_frame)
        out["scalar"] = values(tw.scalar)
    return out


def twt_axiom_residuals(chart: ContactChart, x) -> dict:
    """Numerical residuals of the defining axioms of the connection at x."""
    tw = TWTJets(chart, x, order=3)
    d = 2 * chart.n + 1
    G = values(tw.Gamma)
    hf = values(tw.h_frame)
    Jf = values(tw.J_frame)
    A = values(tw.A_mixed)
    B = values(tw.dtheta)
    W = values(tw.W)
    Cf = [
        [
            None if tw.C_frame[j][k] is None else values(tw.C_frame[j][k])
            for k in range(d)
        ]
        for j in range(d)
    ]
    dh = np.array(
        [[[values(tw.dh[j][a][b]) for b in range(d - 1)] for a in range(d - 1)]
         for j in range(d)]
    )

    # nabla h = 0: W_j h_ab - Gamma^c_{ja} h_cb - Gamma^c_{jb} h_ac
    nh = 0.0
    for j in range(d):
        for a in range(1, d):
            for b in range(1, d):
                r = dh[j][a - 1][b - 1] - sum(
                    G[c][j][a] * hf[c - 1][b - 1] + G[c][j][b] * hf[a - 1][c - 1]
                    for c in range(1, d)
                )
                nh = max(nh, float(np.max(np.abs(r))))

    # horizontal torsion: Gamma^c_{ab} - Gamma^c_{ba} - C^c_{ab} = 0 and
    # -C^0_{ab} = 2 dtheta(W_a, W_b)
    tor_h = 0.0
    tor_T = 0.0
    for a in range(1, d):
        for b in range(a + 1, d):
            C = Cf[a][b]
            for c in range(1, d):
                r = G[c][a][b] - G[c][b][a] - C[c]
                tor_h = max(tor_h, float(np.max(np.abs(r))))
            dthab = np.einsum("i...,ij...,j...->...", W[a], B, W[b]) if W[a].ndim > 1 else W[a] @ B @ W[b]
            r = -C[0] - 2.0 * dthab
            tor_T = max(tor_T, float(np.max(np.abs(r))))

    # tau_* anticommutes with J on the horizontal bundle
    AJ = np.einsum("ca...,ab...->cb...", A, Jf[1:, 1:]) if A.ndim > 2 else A @ Jf[1:, 1:]
    JA = np.einsum("cb...,ba...->ca...", Jf[1:, 1:], A) if A.ndim > 2 else Jf[1:, 1:] @ A
    anti = float(np.max(np.abs(AJ + JA)))

    # self-adjointness of the Webster torsion
    Alow = values(tw.A_lower)
    selfadj = float(np.max(np.abs(Alow - np.swapaxes(Alow, 0, 1))))

    # tau_* image horizontal
    reeb_res = float(np.max(np.abs(values(tw.A_reeb_residual))))

    return {
        "nabla_h": nh,
        "torsion_horizontal": tor_h,
        "torsion_reeb_part": tor_T,
        "torsion_J_anticommute": anti,
        "webster_self_adjoint": selfadj,
        "webster_horizontal": reeb_res,
    }


def field_taylor(chart: ContactChart, center, order: int, kind: str = "geodesic"):
    """Taylor polynomials of connection data around a center point.

    kind "geodesic": coordinate Christoffels and Reeb components (the
    data the parabolic geodesic ODE needs), as a single TaylorPoly with
    output shape (d*d*d + d,).
    kind "scalar":   scalar curvature.
    """
    d = 2 * chart.n + 1
    if kind == "geodesic":
        tw = TWTJets(chart, center, order=order + 2)
        Gc = tw.coordinate_christoffels()
        flat = [Gc[k][i][j] for k in range(d) for i in range(d) for j in range(d)]
        tgt = flat[0].space.order
        flat = flat + [t.restrict(tgt) for t in _restrict(tw.T, tgt)]
        return TaylorPoly.from_jets(np.asarray(center, dtype=float), flat)
    if kind == "scalar":
        tw = TWTJets(chart, center, order=order + 3)
        return TaylorPoly.from_jets(np.asarray(center, dtype=float), [tw.scalar])
    raise ValueError(f"unknown kind {kind!r}")


def nijenhuis_residual(chart: ContactChart, x, X0, Y0, Z0) -> float:
    """Residual of 2h(Q(X,Y),Z) = h(N(X,Z) - th(X)N(T,Z) - th(Z)N(X,T), JY).

    X0, Y0, Z0 are constant-coefficient coordinate vector fields;
    N = [J,J] + 2 dtheta (x) T with [J,J] the Nijenhuis torsion of J.
    """
    d = 2 * chart.n + 1
    tw = TWTJets(chart, x, order=2)
    Jv = values(tw.J)
    Tv = values(tw.T)
    Bv = values(tw.dtheta)
    hv = values(tw.h_coord)
    thv = values(tw.theta)

    J1 = tw.J  # level N
    coords_order = J1[0][0].space.order

    def bracket_const_fields(u_field, v_field):
        """[u, v] for jet-valued component fields at this point."""
        out = []
        for i in range(d):
            term = 0.0
            for jx in range(d):
                uj = u_field[jx]
                vj = v_field[jx]
                term = term + uj.value * v_field[i].gradient()[jx] - vj.value * u_field[i].gradient()[jx]
            out.append(term)
        return np.array(out)

    def as_field(vec):
        return [sum(J1[i][j] * 0.0 for j in range(d)) + float(vec[i]) for i in range(d)]

    def j_apply_field(vec_field):
        return [sum(J1[i][j] * vec_field[j] for j in range(d)) for i in range(d)]

    def nijJ(u, v):
        """[J,J](u,v) for constant u, v at the point."""
        uf, vf = as_field(u), as_field(v)
        Ju, Jv_ = j_apply_field(uf), j_apply_field(vf)
        t1 = bracket_const_fields(Ju, Jv_)
        t2 = Jv @ Jv @ np.zeros(d)  # [u, v] = 0 for constant fields
        t3 = Jv @ bracket_const_fields(Ju, vf)
        t4 = Jv @ bracket_const_fields(uf, Jv_)
        return t1 - t3 - t4

    def N1(u, v):
        return nijJ(u, v) + 2.0 * (u @ Bv @ v) * Tv

    # Q as a coordinate tensor from the frame components
    Qf = values(tw.Q_frame)
    E = values(tw.E)
    P = values(tw.P)
    Qc = np.einsum("il,ljk,jr,ks->irs", E, Qf, P, P)

    X0, Y0, Z0 = map(np.asarray, (X0, Y0, Z0))
    QXY = np.einsum("ijk,j,k->i", Qc, X0, Y0)
    lhs = 2.0 * QXY @ hv @ Z0
    arg = (
        N1(X0, Z0)
        - (thv @ X0) * N1(Tv, Z0)
        - (thv @ Z0) * N1(X0, Tv)
    )
    rhs = arg @ hv @ (Jv @ Y0)
    return float(abs(lhs - rhs))
