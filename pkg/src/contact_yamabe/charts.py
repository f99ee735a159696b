"""Chart-based contact Riemannian structures.

A chart supplies the contact form theta and the (1,1)-tensor J as
closures over the real coordinates (t, x^1..x^n, y^1..y^n); the metric
h, Reeb field and connection are derived.  Closures are written against
generic arithmetic so they can be fed floats, batched arrays, or jets.

Compatibility requires (with the factor-1/2 exterior derivative
convention used throughout)

    h(X, T) = theta(X),  J^2 = -Id + theta (x) T,  dtheta(X, Y) = h(X, JY),

which forces h = theta (x) theta - dtheta(., J.).  Construction is
aborted if the compatibility residuals exceed 1e-6 at sample points.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .jets import Jet, JetSpace


# -- generic small linear algebra over rings (floats, arrays, jets) ---------


def mat_vec(A, v):
    return [sum(A[i][j] * v[j] for j in range(len(v))) for i in range(len(A))]


def mat_mul(A, B):
    rows, inner, cols = len(A), len(B), len(B[0])
    return [
        [sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)]
        for i in range(rows)
    ]


def _mag(x) -> float:
    if isinstance(x, Jet):
        return float(np.max(np.abs(x.value)))
    return float(np.max(np.abs(x)))


def _is_zero(x) -> bool:
    if isinstance(x, Jet):
        return not np.any(x.c)
    return not np.any(np.asarray(x))


def gauss_solve(A, B):
    """Solve A X = B by Gaussian elimination over a commutative ring.

    ``A`` is a nested list (m x m), ``B`` a nested list (m x k).
    Pivots are chosen by the magnitude of the value part, which must be
    uniformly safe across any batch axis.
    """
    m = len(A)
    k = len(B[0])
    A = [row[:] for row in A]
    B = [row[:] for row in B]
    for col in range(m):
        piv = max(range(col, m), key=lambda r: _mag(A[r][col]))
        if _mag(A[piv][col]) == 0.0:
            raise ZeroDivisionError("singular system in gauss_solve")
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            B[col], B[piv] = B[piv], B[col]
        inv = 1.0 / A[col][col] if not isinstance(A[col][col], Jet) else A[col][col].inverse()
        for j in range(col, m):
            A[col][j] = A[col][j] * inv
        for j in range(k):
            B[col][j] = B[col][j] * inv
        for r in range(m):
            if r == col:
                continue
            f = A[r][col]
            if _is_zero(f):
                continue
            for j in range(col, m):
                A[r][j] = A[r][j] - f * A[col][j]
            for j in range(k):
                B[r][j] = B[r][j] - f * B[col][j]
    return B


def mat_inverse(A):
    m = len(A)
    eye = [[1.0 if i == j else 0.0 for j in range(m)] for i in range(m)]
    return gauss_solve(A, eye)


# -- chart -------------------------------------------------------------------


@dataclass
class ContactChart:
    """A coordinate chart carrying theta and J with a derivative oracle.

    ``theta_fn(coords)`` returns the 2n+1 covector components and
    ``j_fn(coords)`` the (2n+1)^2 matrix J^i_j (columns act on d/dx^j),
    both as nested lists over the coordinate ring.
    """

    n: int
    theta_fn: object
    j_fn: object
    name: str = "custom"
    params: dict = field(default_factory=dict)
    validate_on_init: bool = True

    def __post_init__(self):
        if self.validate_on_init:
            report = self.compatibility_report()
            bad = {k: v for k, v in report.items() if v > 1e-6}
            if bad:
                raise ValueError(
                    f"chart {self.name!r} violates the compatibility equations: {bad}"
                )

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    # -- field evaluation ---------------------------------------------------

    def coord_jets(self, x, order: int):
        space = JetSpace(self.dim, order)
        x = np.asarray(x, dtype=float)
        return Jet.variables(space, x)

    def theta_jets(self, x, order: int):
        return self.theta_fn(self.coord_jets(x, order))

    def j_jets(self, x, order: int):
        return self.j_fn(self.coord_jets(x, order))

    def theta_values(self, x):
        x = np.asarray(x, dtype=float)
        return np.array([np.broadcast_to(np.asarray(c, dtype=float), x.shape[1:]) if not np.shape(c) else c for c in self.theta_fn(list(x))])

    # -- sample points for validation ----------------------------------------

    def sample_points(self, count: int = 12, radius: float = 0.5, seed: int = 7):
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-radius, radius, size=(count, self.dim))
        pts[0] = 0.0
        return pts

    def compatibility_report(self, points=None) -> dict:
        """Residuals of the compatibility equations at sample points."""
        from . import connection

        if points is None:
            points = self.sample_points()
        worst = {
            "J squared": 0.0,
            "J Reeb": 0.0,
            "theta after J": 0.0,
            "dtheta J antisymmetry": 0.0,
            "metric symmetry": 0.0,
            "metric positivity": 0.0,
            "contact nondegeneracy": 0.0,
        }
        for x in points:
            data = connection.first_order_data(self, x)
            th, J, T, B, h = (
                data["theta"],
                data["J"],
                data["T"],
                data["dtheta"],
                data["h"],
            )
            d = self.dim
            JJ = J @ J
            target = -np.eye(d) + np.outer(T, th)
            worst["J squared"] = max(worst["J squared"], np.max(np.abs(JJ - target)))
            worst["J Reeb"] = max(worst["J Reeb"], np.max(np.abs(J @ T)))
            worst["theta after J"] = max(worst["theta after J"], np.max(np.abs(th @ J)))
            # dtheta(X, JY) = -dtheta(JX, Y) is equivalent to BJ symmetric
            bj = B @ J
            worst["dtheta J antisymmetry"] = max(
                worst["dtheta J antisymmetry"], np.max(np.abs(bj - bj.T))
            )
            worst["metric symmetry"] = max(
                worst["metric symmetry"], np.max(np.abs(h - h.T))
            )
            hh = data["h_frame"]
            eigs = np.linalg.eigvalsh(0.5 * (hh + hh.T))
            worst["metric positivity"] = max(
                worst["metric positivity"], max(0.0, -float(eigs.min()))
            )
            worst["contact nondegeneracy"] = max(
                worst["contact nondegeneracy"],
                0.0 if abs(data["volume_density"]) > 1e-8 else 1.0,
            )
        return worst


# -- built-in charts ---------------------------------------------------------


def _standard_theta(n: int):
    def theta_fn(coords):
        t = coords[0]
        x = coords[1 : 1 + n]
        y = coords[1 + n : 1 + 2 * n]
        comps = [t * 0 + 1.0]
        comps += [2.0 * y[a] for a in range(n)]
        comps += [-2.0 * x[a] for a in range(n)]
        return comps

    return theta_fn


def _frame_basis_matrices(n: int, coords):
    """Columns of (T, E_1..E_n, F_1..F_n) in the coordinate basis, and inverse.

    E_a = d/dx^a - 2 y^a d/dt and F_a = d/dy^a + 2 x^a d/dt span the
    horizontal bundle of the standard contact form.
    """
    x = coords[1 : 1 + n]
    y = coords[1 + n : 1 + 2 * n]
    d = 2 * n + 1
    zero = coords[0] * 0.0
    B = [[zero for _ in range(d)] for _ in range(d)]
    Binv = [[zero for _ in range(d)] for _ in range(d)]
    B[0][0] = zero + 1.0
    Binv[0][0] = zero + 1.0
    for a in range(n):
        B[1 + a][1 + a] = zero + 1.0
        B[1 + n + a][1 + n + a] = zero + 1.0
        B[0][1 + a] = -2.0 * y[a]
        B[0][1 + n + a] = 2.0 * x[a]
        Binv[1 + a][1 + a] = zero + 1.0
        Binv[1 + n + a][1 + n + a] = zero + 1.0
        Binv[0][1 + a] = 2.0 * y[a]
        Binv[0][1 + n + a] = -2.0 * x[a]
    return B, Binv


def _j_standard_frame(n: int, zero):
    """J0 on the (E, F) frame: E_a -> F_a, F_a -> -E_a, T -> 0."""
    d = 2 * n + 1
    J = [[zero for _ in range(d)] for _ in range(d)]
    for a in range(n):
        J[1 + n + a][1 + a] = zero + 1.0
        J[1 + a][1 + n + a] = zero - 1.0
    return J


def heisenberg_chart(n: int) -> ContactChart:
    theta_fn = _standard_theta(n)

    def j_fn(coords):
        zero = coords[0] * 0.0
        B, Binv = _frame_basis_matrices(n, coords)
        Jf = _j_standard_frame(n, zero)
        return mat_mul(B, mat_mul(Jf, Binv))

    return ContactChart(n=n, theta_fn=theta_fn, j_fn=j_fn, name="heisenberg",
                        params={"n": n})


def perturbed_chart(
    n: int,
    amplitude: float = 0.1,
    direction=None,
) -> ContactChart:
    """Non-integrable structure on H^n: theta standard, J a sheared J0.

    J = G J0 G^{-1} with G a product of two plane shears acting in the
    spans of (E_1, F_1) and (E_2, F_2).  A shear [[1, 0], [s, 1]] has
    unit determinant for any function s, so G preserves dtheta on the
    horizontal bundle exactly and the compatibility equations hold to
    machine precision; position-dependent s makes the torsion of J
    (hence the Tanno tensor) nonzero.

    ``direction`` gives the two linear forms defining the shear angles,
    as rows of coefficients against (t, x^1..x^n, y^1..y^n).
    """
    if n < 2:
        raise ValueError("the perturbed chart needs n >= 2")
    if direction is None:
        d1 = [0.25] + [0.0] * 2 * n
        d2 = [-0.125] + [0.0] * 2 * n
        d1[1] = 1.0          # x^1
        d1[1 + n + 1] = 0.5  # y^2
        d2[1 + n] = 1.0      # y^1
        d2[2] = -0.5         # x^2
        direction = [d1, d2]
    direction = [list(map(float, row)) for row in direction]
    if len(direction) != 2 or any(len(row) != 2 * n + 1 for row in direction):
        raise ValueError("direction must be two rows of length 2n+1")

    theta_fn = _standard_theta(n)

    def j_fn(coords):
        zero = coords[0] * 0.0
        d = 2 * n + 1
        s1 = sum(c * coords[i] for i, c in enumerate(direction[0]) if c) * amplitude
        s2 = sum(c * coords[i] for i, c in enumerate(direction[1]) if c) * amplitude

        def shear(plane: int, s):
            G = [[zero + (1.0 if i == j else 0.0) for j in range(d)] for i in range(d)]
            Gi = [[zero + (1.0 if i == j else 0.0) for j in range(d)] for i in range(d)]
            # E_plane -> E_plane + s F_plane
            G[1 + n + plane][1 + plane] = s
            Gi[1 + n + plane][1 + plane] = -s
            return G, Gi

        G1, G1i = shear(0, s1)
        G2, G2i = shear(1, s2)
        G = mat_mul(G2, G1)
        Gi = mat_mul(G1i, G2i)
        Jf = mat_mul(G, mat_mul(_j_standard_frame(n, zero), Gi))
        B, Binv = _frame_basis_matrices(n, coords)
        return mat_mul(B, mat_mul(Jf, Binv))

    return ContactChart(
        n=n,
        theta_fn=theta_fn,
        j_fn=j_fn,
        name="heisenberg-perturbed",
        params={"n": n, "amplitude": amplitude, "direction": direction},
    )


def conformal_chart(base: ContactChart, u_fn, name=None) -> ContactChart:
    """The conformally transformed structure theta -> e^{2u} theta, J -> J."""

    def theta_fn(coords):
        factor = (2.0 * u_fn(coords)).exp() if isinstance(coords[0], Jet) else np.exp(
            2.0 * u_fn(coords)
        )
        return [c * factor for c in base.theta_fn(coords)]

    return ContactChart(
        n=base.n,
        theta_fn=theta_fn,
        j_fn=base.j_fn,
        name=name or f"{base.name}+conformal",
        params=dict(base.params),
    )


def builtin_chart(name: str, n: int, **kwargs) -> ContactChart:
    if name == "heisenberg":
        return heisenberg_chart(n)
    if name == "heisenberg-perturbed":
        return perturbed_chart(n, **kwargs)
    raise ValueError(f"unknown chart {name!r}")


def chart_from_config(path_or_dict) -> ContactChart:
    """Build a chart from a JSON config {"name", "n", ...extras}."""
    if isinstance(path_or_dict, (str, bytes)):
        with open(path_or_dict) as fh:
            cfg = json.load(fh)
    else:
        cfg = dict(path_or_dict)
    allowed = {"name", "n", "amplitude", "direction"}
    unknown = set(cfg) - allowed
    if unknown:
        raise ValueError(f"unknown chart config fields: {sorted(unknown)}")
    name = cfg.pop("name")
    n = int(cfg.pop("n"))
    return builtin_chart(name, n, **cfg)
