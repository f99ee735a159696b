"""Truncated multivariate Taylor arithmetic (forward-mode jets).

A jet stores the Taylor coefficients of a smooth function at a point,
up to a fixed total order, in ``nvars`` variables.  Arithmetic on jets
propagates derivatives exactly, which is how charts expose partial
derivatives of their defining fields: field closures are written
against ordinary arithmetic and evaluated on jet-valued coordinates.

Coefficient arrays may carry a trailing batch axis, so one jet pass
evaluates a field and its derivatives at many points simultaneously.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np


@lru_cache(maxsize=None)
def _monomials(nvars: int, order: int):
    """Exponent tuples of total degree <= order, sorted by degree blocks."""
    monos = []
    for deg in range(order + 1):
        block = set()
        for combo in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            block.add(tuple(e))
        monos.extend(sorted(block))
    return tuple(monos)


class JetSpace:
    """Shared tables for jets with a fixed variable count and order."""

    _cache = {}

    def __new__(cls, nvars: int, order: int):
        key = (nvars, order)
        if key in cls._cache:
            return cls._cache[key]
        self = super().__new__(cls)
        self.nvars = nvars
        self.order = order
        self.monomials = _monomials(nvars, order)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self.size = len(self.monomials)
        self.degrees = np.array([sum(m) for m in self.monomials])
        self._prod_table = None
        self._diff_maps = None
        cls._cache[key] = self
        return self

    @property
    def prod_table(self) -> np.ndarray:
        """prod_table[i, j] = index of monomial_i + monomial_j, or -1."""
        if self._prod_table is None:
            M = self.size
            table = np.full((M, M), -1, dtype=np.int32)
            for i, mi in enumerate(self.monomials):
                di = sum(mi)
                for j, mj in enumerate(self.monomials):
                    if di + sum(mj) > self.order:
                        continue
                    table[i, j] = self.index[tuple(a + b for a, b in zip(mi, mj))]
            self._prod_table = table
        return self._prod_table

    def diff_map(self, var: int):
        """Triples (dst, src, factor) mapping coefficients of d/dx_var."""
        if self._diff_maps is None:
            self._diff_maps = {}
        if var not in self._diff_maps:
            lower = JetSpace(self.nvars, self.order - 1)
            dst, src, fac = [], [], []
            for k, m in enumerate(lower.monomials):
                up = list(m)
                up[var] += 1
                src.append(self.index[tuple(up)])
                dst.append(k)
                fac.append(up[var])
            self._diff_maps[var] = (
                np.array(dst),
                np.array(src),
                np.array(fac, dtype=float),
            )
        return self._diff_maps[var]


class Jet:
    """Taylor coefficients in a JetSpace; supports batched trailing axis."""

    __slots__ = ("space", "c")

    def __init__(self, space: JetSpace, c: np.ndarray):
        self.space = space
        self.c = c

    # -- constructors --------------------------------------------------

    @staticmethod
    def constant(space: JetSpace, value, batch=None) -> "Jet":
        value = np.asarray(value)
        shape = (space.size,) + (value.shape if batch is None else (batch,))
        c = np.zeros(shape, dtype=np.result_type(value, float))
        c[0] = value
        return Jet(space, c)

    @staticmethod
    def variables(space: JetSpace, x0) -> list:
        """Jets for the coordinate functions around the point x0.

        ``x0`` has shape (nvars,) or (nvars, batch).
        """
        x0 = np.asarray(x0, dtype=float)
        out = []
        for v in range(space.nvars):
            c = np.zeros((space.size,) + x0.shape[1:], dtype=x0.dtype)
            c[0] = x0[v]
            e = [0] * space.nvars
            e[v] = 1
            c[space.index[tuple(e)]] = 1.0
            out.append(Jet(space, c))
        return out

    # -- helpers -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError("jets from different spaces")
            return other
        other = np.asarray(other)
        c = np.zeros(
            (self.space.size,) + np.broadcast_shapes(self.c.shape[1:], other.shape),
            dtype=np.result_type(self.c.dtype, other.dtype),
        )
        c[0] = other
        return Jet(self.space, c)

    @property
    def value(self):
        return self.c[0]

    def coefficient(self, exponents) -> np.ndarray:
        return self.c[self.space.index[tuple(exponents)]]

    def gradient(self):
        """First-order coefficients as an array of shape (nvars, ...)."""
        idx = []
        for v in range(self.space.nvars):
            e = [0] * self.space.nvars
            e[v] = 1
            idx.append(self.space.index[tuple(e)])
        return self.c[idx]

    # -- ring ops --------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        return Jet(self.space, self.c + other.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __sub__(self, other):
        other = self._coerce(other)
        return Jet(self.space, self.c - other.c)

    def __rsub__(self, other):
        other = self._coerce(other)
        return Jet(self.space, other.c - self.c)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.space, self.c * np.asarray(other))
        if other.space is not self.space:
            raise ValueError("jets from different spaces")
        table = self.space.prod_table
        a, b = self.c, other.c
        # iterate over the sparser operand
        nz_a = np.flatnonzero(np.any(a != 0, axis=tuple(range(1, a.ndim))))
        nz_b = np.flatnonzero(np.any(b != 0, axis=tuple(range(1, b.ndim))))
        if len(nz_b) < len(nz_a):
            a, b, nz_a = b, a, nz_b
        out = np.zeros(
            (self.space.size,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]),
            dtype=np.result_type(a.dtype, b.dtype),
        )
        for i in nz_a:
            row = table[i]
            mask = row >= 0
            out[row[mask]] += a[i] * b[mask]
        return Jet(self.space, out)

    __rmul__ = __mul__

    def _nilpotent_series(self, coeffs):
        """sum coeffs[k] * nu^k where nu = self with constant part removed."""
        nu = Jet(self.space, self.c.copy())
        nu.c[0] = 0
        out = self._coerce(coeffs[0])
        power = None
        for k in range(1, len(coeffs)):
            power = nu if power is None else power * nu
            out = out + power * coeffs[k]
        return out

    def inverse(self):
        a0 = self.value
        scaled = self * (1.0 / a0)
        coeffs = [(-1.0) ** k for k in range(self.space.order + 1)]
        return scaled._nilpotent_series(coeffs) * (1.0 / a0)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.space, self.c / np.asarray(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, p):
        if isinstance(p, int):
            if p < 0:
                return self.inverse() ** (-p)
            out = Jet.constant(self.space, np.ones_like(self.value))
            base = self
            k = p
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        return (self.log() * p).exp()

    # -- transcendental ops -----------------------------------------------

    def exp(self):
        a0 = self.value
        coeffs = [1.0 / math.factorial(k) for k in range(self.space.order + 1)]
        return self._nilpotent_series(coeffs) * np.exp(a0)

    def log(self):
        a0 = self.value
        scaled = self * (1.0 / a0)
        coeffs = [0.0] + [
            (-1.0) ** (k + 1) / k for k in range(1, self.space.order + 1)
        ]
        return scaled._nilpotent_series(coeffs) + np.log(a0)

    def sqrt(self):
        return (self.log() * 0.5).exp()

    def sin(self):
        a0 = self.value
        table = [np.sin(a0), np.cos(a0), -np.sin(a0), -np.cos(a0)]
        coeffs = [table[k % 4] / math.factorial(k) for k in range(self.space.order + 1)]
        return self._nilpotent_series_arrays(coeffs)

    def cos(self):
        a0 = self.value
        table = [np.cos(a0), -np.sin(a0), -np.cos(a0), np.sin(a0)]
        coeffs = [table[k % 4] / math.factorial(k) for k in range(self.space.order + 1)]
        return self._nilpotent_series_arrays(coeffs)

    def cosh(self):
        a0 = self.value
        table = [np.cosh(a0), np.sinh(a0)]
        coeffs = [table[k % 2] / math.factorial(k) for k in range(self.space.order + 1)]
        return self._nilpotent_series_arrays(coeffs)

    def sinh(self):
        a0 = self.value
        table = [np.sinh(a0), np.cosh(a0)]
        coeffs = [table[k % 2] / math.factorial(k) for k in range(self.space.order + 1)]
        return self._nilpotent_series_arrays(coeffs)

    def _nilpotent_series_arrays(self, coeffs):
        nu = Jet(self.space, self.c.copy())
        nu.c[0] = 0
        out = self._coerce(coeffs[0])
        power = None
        for k in range(1, len(coeffs)):
            power = nu if power is None else power * nu
            out = out + power * coeffs[k]
        return out

    # -- calculus ----------------------------------------------------------

    def diff(self, var: int) -> "Jet":
        """Partial derivative, landing in the order-(N-1) space."""
        lower = JetSpace(self.space.nvars, self.space.order - 1)
        dst, src, fac = self.space.diff_map(var)
        c = np.zeros((lower.size,) + self.c.shape[1:], dtype=self.c.dtype)
        c[dst] = self.c[src] * fac.reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(lower, c)

    def restrict(self, order: int) -> "Jet":
        lower = JetSpace(self.space.nvars, order)
        return Jet(lower, self.c[: lower.size].copy())


class TaylorPoly:
    """Polynomial data extracted from a jet, for fast repeated evaluation.

    Stores exponents (K, nvars) and coefficients (K,) + output shape,
    relative to the expansion center.
    """

    def __init__(self, center, exps, coeffs):
        self.center = np.asarray(center, dtype=float)
        self.exps = np.asarray(exps, dtype=np.int64)
        self.coeffs = np.asarray(coeffs)

    @staticmethod
    def from_jets(center, jets) -> "TaylorPoly":
        """Bundle jets (nested lists/arrays of Jet) into one polynomial."""
        flat = []

        def collect(obj):
            if isinstance(obj, Jet):
                flat.append(obj)
                return ("jet", len(flat) - 1)
            if isinstance(obj, (list, tuple)):
                return [collect(x) for x in obj]
            raise TypeError("expected nested lists of jets")

        collect(jets)
        space = flat[0].space
        exps = np.array(space.monomials)
        coeffs = np.stack([j.c for j in flat], axis=-1)
        keep = np.any(coeffs != 0, axis=-1)
        return TaylorPoly(center, exps[keep], coeffs[keep])

    def __call__(self, x):
        """Evaluate at points x of shape (nvars,) or (nvars, batch)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        if single:
            x = x[:, None]
        dx = x - self.center[:, None]
        K = self.exps.shape[0]
        vals = np.ones((K, x.shape[1]))
        for v in range(x.shape[0]):
            e = self.exps[:, v]
            m = e > 0
            if np.any(m):
                vals[m] *= dx[v][None, :] ** e[m][:, None]
        out = np.tensordot(vals, self.coeffs, axes=([0], [0]))
        return out[0] if single else out

    def eval_jet(self, xjets):
        """Evaluate at jet-valued coordinates (list of nvars jets)."""
        space = xjets[0].space
        dx = [xjets[v] - self.center[v] for v in range(len(xjets))]
        batch = dx[0].c.shape[1:]
        out_shape = self.coeffs.shape[1:]
        acc = [
            Jet.constant(space, np.zeros(batch)) for _ in range(int(np.prod(out_shape)))
        ]
        flat_coeffs = self.coeffs.reshape(self.coeffs.shape[0], -1)
        # monomial jets built incrementally by degree would be faster; the
        # direct product is fine at the orders used here
        cache = {}

        def mono(e):
            e = tuple(e)
            if e in cache:
                return cache[e]
            nz = [v for v, k in enumerate(e) if k]
            if not nz:
                j = Jet.constant(space, np.ones(batch))
            else:
                v = nz[0]
                e2 = list(e)
                e2[v] -= 1
                j = mono(tuple(e2)) * dx[v]
            cache[e] = j
            return j

        for k in range(self.exps.shape[0]):
            m = mono(self.exps[k])
            for c_idx in range(flat_coeffs.shape[1]):
                coef = flat_coeffs[k, c_idx]
                if np.any(coef != 0):
                    acc[c_idx] = acc[c_idx] + m * coef
        return np.array(acc, dtype=object).reshape(out_shape) if out_shape else acc[0]

    def diff(self, var: int) -> "TaylorPoly":
        e = self.exps[:, var]
        keep = e > 0
        exps = self.exps[keep].copy()
        coeffs = self.coeffs[keep] * e[keep].reshape(
            (-1,) + (1,) * (self.coeffs.ndim - 1)
        )
        exps[:, var] -= 1
        return TaylorPoly(self.center, exps, coeffs)
