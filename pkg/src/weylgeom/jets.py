"""Forward-mode Taylor jets: exact mixed partials of chart functions to order 3.

A :class:`Jet3` carries the value of a scalar function of the chart
coordinates together with *all* of its partial derivatives through third
order.  Arithmetic and elementary functions propagate that data exactly
(truncated Taylor arithmetic), which is what lets the curvature pipeline
consume third metric derivatives at machine precision.  No numerical
differentiation happens anywhere in the library; finite differences exist
only in the test suite, as an independent oracle.

Derivative layout: ``d1[i] = ∂_i f``, ``d2[i, j] = ∂_i ∂_j f``,
``d3[i, j, k] = ∂_i ∂_j ∂_k f`` (raw partials, not Taylor coefficients).
``d2`` and ``d3`` are exactly symmetric: every rule below is written as a
manifestly symmetric combination, so symmetry survives to the last bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Jet3", "variables", "constant", "exp", "log", "sin", "cos", "power"]


_SYM_INDEX_CACHE: dict[int, tuple[np.ndarray, ...]] = {}


def _sym_indices(n: int) -> tuple[np.ndarray, ...]:
    """Sorted index grids used to canonicalize d2/d3 storage per entry."""
    if n not in _SYM_INDEX_CACHE:
        i2 = np.sort(np.indices((n, n)), axis=0)
        i3 = np.sort(np.indices((n, n, n)), axis=0)
        _SYM_INDEX_CACHE[n] = (i2[0], i2[1], i3[0], i3[1], i3[2])
    return _SYM_INDEX_CACHE[n]


@dataclass(frozen=True, eq=False)
class Jet3:
    """Value and all partial derivatives through order 3 of a scalar function.

    Symmetry of d2 and d3 is exact: every entry is stored from its
    index-sorted representative on write, so reordering floating-point sums
    in the arithmetic rules can never break it.
    """

    value: float
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "d1", np.asarray(self.d1, dtype=float))
        d2 = np.asarray(self.d2, dtype=float)
        d3 = np.asarray(self.d3, dtype=float)
        n = self.d1.shape[0] if self.d1.ndim == 1 else -1
        if self.d1.shape != (n,) or d2.shape != (n, n) or d3.shape != (n, n, n):
            raise ValueError("jet derivative arrays must have shapes (n,), (n,n), (n,n,n)")
        a2, b2, a3, b3, c3 = _sym_indices(n)
        object.__setattr__(self, "d2", d2[a2, b2])
        object.__setattr__(self, "d3", d3[a3, b3, c3])

    @property
    def n(self) -> int:
        """Number of chart variables."""
        return self.d1.shape[0]

    # -- arithmetic --------------------------------------------------------

    def _lift(self, other) -> "Jet3":
        if isinstance(other, Jet3):
            if other.n != self.n:
                raise ValueError("jets have different numbers of variables")
            return other
        return constant(float(other), self.n)

    def __add__(self, other) -> "Jet3":
        o = self._lift(other)
        return Jet3(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)

    __radd__ = __add__

    def __neg__(self) -> "Jet3":
        return Jet3(-self.value, -self.d1, -self.d2, -self.d3)

    def __sub__(self, other) -> "Jet3":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Jet3":
        return (-self) + other

    def __mul__(self, other) -> "Jet3":
        if not isinstance(other, Jet3):
            c = float(other)
            return Jet3(c * self.value, c * self.d1, c * self.d2, c * self.d3)
        o = self._lift(other)
        cross = np.multiply.outer(self.d1, o.d1)
        d2 = self.d2 * o.value + o.d2 * self.value + cross + cross.T
        d3 = (
            self.d3 * o.value
            + o.d3 * self.value
            + _sym_2_1(self.d2, o.d1)
            + _sym_2_1(o.d2, self.d1)
        )
        return Jet3(self.value * o.value, self.d1 * o.value + o.d1 * self.value, d2, d3)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet3":
        o = self._lift(other)
        return self * _reciprocal(o)

    def __rtruediv__(self, other) -> "Jet3":
        return _reciprocal(self) * other

    def __pow__(self, exponent) -> "Jet3":
        return power(self, exponent)


def _sym_2_1(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Symmetric rank-3 combination m_ij v_k + m_ik v_j + m_jk v_i."""
    t = np.multiply.outer(m, v)
    return t + t.transpose(0, 2, 1) + t.transpose(2, 0, 1)


def _compose(u: Jet3, f0: float, f1: float, f2: float, f3: float) -> Jet3:
    """Chain rule through order 3 for F(u) given F, F', F'', F''' at u.value."""
    outer2 = np.multiply.outer(u.d1, u.d1)
    outer3 = np.multiply.outer(outer2, u.d1)
    return Jet3(
        f0,
        f1 * u.d1,
        f2 * outer2 + f1 * u.d2,
        f3 * outer3 + f2 * _sym_2_1(u.d2, u.d1) + f1 * u.d3,
    )


def _reciprocal(u: Jet3) -> Jet3:
    if u.value == 0.0:
        raise ValueError("jet division singularity")
    w = 1.0 / u.value
    return _compose(u, w, -w * w, 2.0 * w**3, -6.0 * w**4)


# -- constructors ----------------------------------------------------------


def constant(value: float, n: int) -> Jet3:
    """Jet of a constant: all derivatives vanish."""
    return Jet3(float(value), np.zeros(n), np.zeros((n, n)), np.zeros((n, n, n)))


def variables(coords) -> list[Jet3]:
    """Coordinate jets at a chart point: the i-th jet has d1 equal to e_i."""
    coords = np.asarray(coords, dtype=float)
    n = coords.shape[0]
    out = []
    for i in range(n):
        d1 = np.zeros(n)
        d1[i] = 1.0
        out.append(Jet3(coords[i], d1, np.zeros((n, n)), np.zeros((n, n, n))))
    return out


# -- elementary functions ---------------------------------------------------


def exp(u: Jet3) -> Jet3:
    e = np.exp(u.value)
    return _compose(u, e, e, e, e)


def log(u: Jet3) -> Jet3:
    if u.value <= 0.0:
        raise ValueError("log domain violation: jet value must be positive")
    w = 1.0 / u.value
    return _compose(u, np.log(u.value), w, -w * w, 2.0 * w**3)


def sin(u: Jet3) -> Jet3:
    s, c = np.sin(u.value), np.cos(u.value)
    return _compose(u, s, c, -s, -c)


def cos(u: Jet3) -> Jet3:
    s, c = np.sin(u.value), np.cos(u.value)
    return _compose(u, c, -s, -c, s)


def power(u: Jet3, exponent: float) -> Jet3:
    """u**p with the direct derivative formulas.

    Integer exponents are valid for any base (negative bases included, zero
    base for p >= 3); fractional exponents require a positive base.
    """
    p = float(exponent)
    x = u.value
    if p.is_integer():
        p_int = int(p)
        if x == 0.0 and p_int < 3:
            raise ValueError("power domain violation: zero base needs integer exponent >= 3")
        coeffs = [1.0, p, p * (p - 1.0), p * (p - 1.0) * (p - 2.0)]
        vals = [c * x ** (p_int - k) if c != 0.0 else 0.0 for k, c in enumerate(coeffs)]
        return _compose(u, *vals)
    if x <= 0.0:
        raise ValueError("power domain violation: fractional exponent needs positive base")
    return _compose(
        u,
        x**p,
        p * x ** (p - 1.0),
        p * (p - 1.0) * x ** (p - 2.0),
        p * (p - 1.0) * (p - 2.0) * x ** (p - 3.0),
    )
