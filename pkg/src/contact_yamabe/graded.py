"""Polynomials in (z, zbar, t) graded by parabolic degree.

A monomial z^A zbar^B t^k has grade |A| + |B| + 2k, so the grading is
the weight under the parabolic dilation (z, t) -> (s z, s^2 t).  The
Euler field P = z^a d/dz^a + 2t d/dt acts on a grade-m homogeneous part
as multiplication by m.

Frame-index access convention: variable a in 1..n is z^a, variable
a in n+1..2n is zbar^(a-n), and index 0 is t.
"""

from __future__ import annotations

from itertools import product

import numpy as np

_TOL = 1e-15


class GradedPolynomial:
    """Sparse polynomial over complex coefficients.

    Terms are stored as ``{(zexp, zbexp, texp): coeff}`` with ``zexp``
    and ``zbexp`` tuples of length n.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = dict(terms) if terms else {}

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, n: int, c) -> "GradedPolynomial":
        p = cls(n)
        if c != 0:
            zero = (0,) * n
            p.terms[(zero, zero, 0)] = complex(c)
        return p

    @classmethod
    def variable(cls, n: int, a: int) -> "GradedPolynomial":
        """z^a for a in 1..2n, or t for a == 0."""
        zero = (0,) * n
        p = cls(n)
        if a == 0:
            p.terms[(zero, zero, 1)] = 1.0 + 0j
        elif 1 <= a <= n:
            e = list(zero)
            e[a - 1] = 1
            p.terms[(tuple(e), zero, 0)] = 1.0 + 0j
        elif n < a <= 2 * n:
            e = list(zero)
            e[a - n - 1] = 1
            p.terms[(zero, tuple(e), 0)] = 1.0 + 0j
        else:
            raise IndexError(f"variable index {a} out of range")
        return p

    @classmethod
    def monomial(cls, n: int, indices, coeff=1.0) -> "GradedPolynomial":
        """Product z^{j_1} ... z^{j_s} (index 0 meaning t) times coeff."""
        p = cls.constant(n, coeff)
        for j in indices:
            p = p * cls.variable(n, j)
        return p

    # -- ring operations ----------------------------------------------

    def copy(self):
        return GradedPolynomial(self.n, self.terms)

    def _compat(self, other):
        if isinstance(other, GradedPolynomial):
            if other.n != self.n:
                raise ValueError("mixed variable counts")
            return other
        return GradedPolynomial.constant(self.n, other)

    def __add__(self, other):
        other = self._compat(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            v = out.get(key, 0) + c
            if abs(v) <= _TOL:
                out.pop(key, None)
            else:
                out[key] = v
        return GradedPolynomial(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedPolynomial(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._compat(other))

    def __rsub__(self, other):
        return self._compat(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, GradedPolynomial):
            if other == 0:
                return GradedPolynomial(self.n)
            return GradedPolynomial(
                self.n, {k: c * other for k, c in self.terms.items()}
            )
        if other.n != self.n:
            raise ValueError("mixed variable counts")
        out = {}
        for (za, zba, ta), ca in self.terms.items():
            for (zb, zbb, tb), cb in other.terms.items():
                key = (
                    tuple(x + y for x, y in zip(za, zb)),
                    tuple(x + y for x, y in zip(zba, zbb)),
                    ta + tb,
                )
                v = out.get(key, 0) + ca * cb
                if abs(v) <= _TOL:
                    out.pop(key, None)
                else:
                    out[key] = v
        return GradedPolynomial(self.n, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        diff = self - self._compat(other)
        return not diff.terms

    # -- grading ------------------------------------------------------

    @staticmethod
    def term_grade(key) -> int:
        zexp, zbexp, texp = key
        return sum(zexp) + sum(zbexp) + 2 * texp

    def graded_part(self, m: int) -> "GradedPolynomial":
        return GradedPolynomial(
            self.n, {k: c for k, c in self.terms.items() if self.term_grade(k) == m}
        )

    def max_grade(self) -> int:
        return max((self.term_grade(k) for k in self.terms), default=0)

    def truncate(self, max_grade: int) -> "GradedPolynomial":
        return GradedPolynomial(
            self.n,
            {k: c for k, c in self.terms.items() if self.term_grade(k) <= max_grade},
        )

    def euler_applied(self) -> "GradedPolynomial":
        """P p, with P = z^a d/dz^a + zbar^a d/dzbar^a + 2t d/dt."""
        out = {}
        for key, c in self.terms.items():
            out[key] = c * self.term_grade(key)
        return GradedPolynomial(self.n, out)

    # -- calculus -----------------------------------------------------

    def diff(self, a: int) -> "GradedPolynomial":
        """Partial derivative along z^a (a in 1..2n) or t (a == 0)."""
        out = {}
        for (ze, zbe, te), c in self.terms.items():
            if a == 0:
                if te:
                    out[(ze, zbe, te - 1)] = out.get((ze, zbe, te - 1), 0) + c * te
            elif 1 <= a <= self.n:
                k = a - 1
                if ze[k]:
                    e = list(ze)
                    e[k] -= 1
                    key = (tuple(e), zbe, te)
                    out[key] = out.get(key, 0) + c * ze[k]
            else:
                k = a - self.n - 1
                if zbe[k]:
                    e = list(zbe)
                    e[k] -= 1
                    key = (ze, tuple(e), te)
                    out[key] = out.get(key, 0) + c * zbe[k]
        return GradedPolynomial(self.n, out)

    def apply_Z(self, j: int) -> "GradedPolynomial":
        """Apply the model frame field Z_j.

        Z_0 = d/dt, Z_alpha = d/dz^alpha - i zbar^alpha d/dt and its
        conjugate Z_albar = d/dzbar^alpha + i z^alpha d/dt.
        """
        if j == 0:
            return self.diff(0)
        n = self.n
        if 1 <= j <= n:
            corr = GradedPolynomial.variable(n, j + n) * (-1j)
        elif n < j <= 2 * n:
            corr = GradedPolynomial.variable(n, j - n) * (1j)
        else:
            raise IndexError(f"frame index {j} out of range")
        return self.diff(j) + corr * self.diff(0)

    def conjugate(self) -> "GradedPolynomial":
        return GradedPolynomial(
            self.n,
            {(zbe, ze, te): c.conjugate() for (ze, zbe, te), c in self.terms.items()},
        )

    # -- evaluation ---------------------------------------------------

    def __call__(self, z, t):
        """Evaluate at complex z (length n, scalars or arrays) and real t."""
        z = [np.asarray(zi) for zi in z]
        zb = [np.conj(zi) for zi in z]
        t = np.asarray(t)
        total = 0
        for (ze, zbe, te), c in self.terms.items():
            term = c * np.ones_like(t, dtype=complex)
            for k in range(self.n):
                if ze[k]:
                    term = term * z[k] ** ze[k]
                if zbe[k]:
                    term = term * zb[k] ** zbe[k]
            if te:
                term = term * t.astype(complex) ** te
            total = total + term
        return total

    def coeff(self, indices) -> complex:
        """Coefficient of the monomial z^{j_1}...z^{j_s} (0 meaning t)."""
        n = self.n
        ze, zbe, te = [0] * n, [0] * n, 0
        for j in indices:
            if j == 0:
                te += 1
            elif j <= n:
                ze[j - 1] += 1
            else:
                zbe[j - n - 1] += 1
        return self.terms.get((tuple(ze), tuple(zbe), te), 0j)

    def norm(self) -> float:
        return sum(abs(c) for c in self.terms.values())

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for key in sorted(self.terms, key=lambda k: (self.term_grade(k), k)):
            ze, zbe, te = key
            mono = "".join(
                f"*z{k + 1}^{e}" for k, e in enumerate(ze) if e
            ) + "".join(f"*zb{k + 1}^{e}" for k, e in enumerate(zbe) if e)
            if te:
                mono += f"*t^{te}"
            bits.append(f"({self.terms[key]:.6g}){mono}")
        return " + ".join(bits)


def taylor_part(F: GradedPolynomial, scheme, m: int) -> GradedPolynomial:
    """Grade-m part of F via sum over multi-indices of z^K Z_K F(0) / (#K)!.

    Z_K means Z_{k_s} ... Z_{k_1} for K = (k_1, ..., k_s).  Exact on
    polynomials, which makes it an independent oracle for graded_part.
    """
    from math import factorial

    n = F.n
    out = GradedPolynomial(n)
    for K in scheme.multi_indices(m):
        g = F
        for j in reversed(K):
            g = g.apply_Z(j)
        val = g.coeff(())  # evaluation at the origin
        if val:
            out = out + GradedPolynomial.monomial(n, K, val / factorial(len(K)))
    return out


class GradedForm:
    """Differential form with GradedPolynomial coefficients.

    Basis covectors are labelled 0 (dt) and 1..2n (dz^a); a form is a
    map from sorted label tuples to coefficients.  The wedge uses the
    alternation convention in which evaluation on vectors carries 1/k!,
    so products of basis covectors need no combinatorial prefactor.
    The form grade counts dz^a with weight 1 and dt with weight 2 in
    addition to the coefficient grade.
    """

    __slots__ = ("n", "parts")

    def __init__(self, n: int, parts=None):
        self.n = n
        self.parts = dict(parts) if parts else {}

    @staticmethod
    def _merge(a, b):
        """Concatenate sorted index tuples; return (sign, merged) or None."""
        if set(a) & set(b):
            return None
        merged = a + b
        perm = sorted(range(len(merged)), key=lambda i: merged[i])
        sign = 1
        seen = list(perm)
        # count inversions
        inv = 0
        for i in range(len(seen)):
            for j in range(i + 1, len(seen)):
                if seen[i] > seen[j]:
                    inv += 1
        sign = -1 if inv % 2 else 1
        return sign, tuple(sorted(merged))

    @classmethod
    def basis(cls, n: int, label: int) -> "GradedForm":
        return cls(n, {(label,): GradedPolynomial.constant(n, 1.0)})

    def __add__(self, other):
        if other == 0:
            return self
        if self.n != other.n:
            raise ValueError("mixed variable counts")
        out = dict(self.parts)
        for key, p in other.parts.items():
            q = out.get(key)
            out[key] = p if q is None else q + p
        out = {k: p for k, p in out.items() if p.terms}
        return GradedForm(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedForm(self.n, {k: -p for k, p in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, p) -> "GradedForm":
        """Multiply by a GradedPolynomial or scalar."""
        return GradedForm(self.n, {k: q * p for k, q in self.parts.items()})

    def wedge(self, other: "GradedForm") -> "GradedForm":
        out = GradedForm(self.n)
        acc = {}
        for ka, pa in self.parts.items():
            for kb, pb in other.parts.items():
                m = self._merge(ka, kb)
                if m is None:
                    continue
                sign, key = m
                prod = pa * pb * sign
                q = acc.get(key)
                acc[key] = prod if q is None else q + prod
        out.parts = {k: p for k, p in acc.items() if p.terms}
        return out

    def d(self) -> "GradedForm":
        """Exterior derivative (component formula d(p e^I) = dp ^ e^I)."""
        out = GradedForm(self.n)
        for key, p in self.parts.items():
            for a in range(0, 2 * self.n + 1):
                dp = p.diff(a)
                if not dp.terms:
                    continue
                out = out + GradedForm(self.n, {(a,): dp}).wedge(
                    GradedForm(self.n, {key: GradedPolynomial.constant(self.n, 1.0)})
                )
        return out

    def graded_part(self, m: int) -> "GradedForm":
        """Part homogeneous of parabolic degree m (dz weight 1, dt weight 2)."""
        out = {}
        for key, p in self.parts.items():
            w = sum(2 if i == 0 else 1 for i in key)
            q = p.graded_part(m - w)
            if q.terms:
                out[key] = q
        return GradedForm(self.n, out)

    def truncate(self, max_grade: int) -> "GradedForm":
        out = {}
        for key, p in self.parts.items():
            w = sum(2 if i == 0 else 1 for i in key)
            q = p.truncate(max_grade - w)
            if q.terms:
                out[key] = q
        return GradedForm(self.n, out)

    def apply_vectors(self, vectors) -> GradedPolynomial:
        """Evaluate a 1-form on a vector field given as coefficient list.

        ``vectors`` maps basis direction labels (0 for d/dt, a for
        d/dz^a) to GradedPolynomial coefficients.
        """
        keys = list(self.parts)
        if any(len(k) != 1 for k in keys):
            raise ValueError("apply_vectors only implemented for 1-forms")
        total = GradedPolynomial(self.n)
        for (label,), p in self.parts.items():
            v = vectors.get(label)
            if v is not None:
                total = total + p * v
        return total

    def coefficient(self, key) -> GradedPolynomial:
        return self.parts.get(tuple(sorted(key)), GradedPolynomial(self.n))

    def __repr__(self):
        if not self.parts:
            return "0"
        return " + ".join(f"[{p!r}] e{list(k)}" for k, p in sorted(self.parts.items()))
