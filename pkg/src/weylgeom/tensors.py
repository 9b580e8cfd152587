"""Dense multilinear algebra on component arrays with explicit index variance.

Components of every tensor-valued quantity (metric, velocity, curvature,
derivatives of curvature) live in a :class:`TensorValue`: a dense ``float64``
array of shape ``(n,)*rank`` plus one up/down flag per slot.  Contraction is
deliberately restricted to mixed-variance slot pairs — every metric
contraction in the identity suite must go through an explicit raise or lower,
which keeps the index bookkeeping auditable.

Values are immutable after construction and all operations are pure, so
evaluation is safe to fan out across chart points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "UP",
    "DOWN",
    "TensorValue",
    "contract",
    "raise_lower",
    "kulkarni_nomizu",
    "generalized_curvature_check",
    "norm_squared",
    "max_abs",
]

UP = "u"
DOWN = "d"

_COND_LIMIT = 1e14


def _normalize_variance(variance) -> tuple[str, ...]:
    flags = tuple(variance)
    if not all(f in (UP, DOWN) for f in flags):
        raise ValueError(f"variance flags must be {UP!r} or {DOWN!r}, got {flags!r}")
    return flags


@dataclass(frozen=True, eq=False)
class TensorValue:
    """Dense component array of rank <= 5 with per-slot variance.

    Parameters
    ----------
    n : int
        Chart dimension.
    variance : sequence of {"u", "d"}
        One flag per slot; the string ``"dd"`` is accepted for rank 2, etc.
    components : array_like
        Dense array of shape ``(n,)*rank``; must be finite everywhere.
    """

    n: int
    variance: tuple[str, ...]
    components: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "variance", _normalize_variance(self.variance))
        comp = np.array(self.components, dtype=float)
        if self.rank > 5:
            raise ValueError("rank > 5 is not supported")
        if comp.shape != (self.n,) * self.rank:
            raise ValueError(
                f"components shape {comp.shape} does not match (n,)*rank = {(self.n,) * self.rank}"
            )
        if not np.all(np.isfinite(comp)):
            raise ValueError("non-finite tensor components")
        comp.flags.writeable = False
        object.__setattr__(self, "components", comp)

    @property
    def rank(self) -> int:
        return len(self.variance)

    @classmethod
    def of(cls, components, variance, n: int | None = None) -> "TensorValue":
        """Build a TensorValue, inferring n from the array shape when possible."""
        comp = np.asarray(components, dtype=float)
        flags = _normalize_variance(variance)
        if n is None:
            if comp.ndim == 0:
                raise ValueError("scalar TensorValue needs an explicit n")
            n = comp.shape[0]
        return cls(n=int(n), variance=flags, components=comp)


def max_abs(t: TensorValue | np.ndarray) -> float:
    """Largest absolute component; 0 for an empty array."""
    comp = t.components if isinstance(t, TensorValue) else np.asarray(t)
    return float(np.max(np.abs(comp))) if comp.size else 0.0


def contract(t: TensorValue, slot_a: int, slot_b: int) -> TensorValue:
    """Sum over a paired (up, down) slot pair; rank drops by two.

    Only mixed-variance contraction is allowed: callers raise or lower first
    when they mean a metric contraction.
    """
    r = t.rank
    if slot_a == slot_b:
        raise ValueError("contraction slots must differ")
    for s in (slot_a, slot_b):
        if not 0 <= s < r:
            raise ValueError(f"slot {s} out of range for rank {r}")
    if t.variance[slot_a] == t.variance[slot_b]:
        raise ValueError("variance mismatch: contraction needs one up and one down slot")
    comp = np.trace(t.components, axis1=slot_a, axis2=slot_b)
    variance = tuple(f for i, f in enumerate(t.variance) if i not in (slot_a, slot_b))
    return TensorValue(n=t.n, variance=variance, components=comp)


def _check_metric_like(g: TensorValue, direction: str) -> None:
    want = (DOWN, DOWN) if direction == DOWN else (UP, UP)
    if g.variance != want:
        raise ValueError(
            f"metric argument must have variance {want} for direction {direction!r}"
        )
    cond = np.linalg.cond(g.components)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise ValueError("singular metric")


def raise_lower(t: TensorValue, slot: int, g: TensorValue, direction: str) -> TensorValue:
    """Flip one slot's variance with the metric.

    ``direction="u"`` raises a down slot and expects the inverse metric
    (up, up); ``direction="d"`` lowers an up slot and expects the metric
    (down, down).
    """
    if direction not in (UP, DOWN):
        raise ValueError(f"direction must be {UP!r} or {DOWN!r}")
    if not 0 <= slot < t.rank:
        raise ValueError(f"slot {slot} out of range for rank {t.rank}")
    if t.variance[slot] == direction:
        raise ValueError(f"slot {slot} already has variance {direction!r}")
    _check_metric_like(g, direction)
    moved = np.tensordot(g.components, t.components, axes=(1, slot))
    comp = np.moveaxis(moved, 0, slot)
    variance = tuple(direction if i == slot else f for i, f in enumerate(t.variance))
    return TensorValue(n=t.n, variance=variance, components=comp)


def kulkarni_nomizu(a: TensorValue, b: TensorValue) -> TensorValue:
    """Kulkarni-Nomizu product of two symmetric covariant rank-2 tensors.

    Sign pattern, with index pairs (i, k) and (l, m)::

        (a ^ b)_iklm = a_im b_kl - a_km b_il - a_il b_km + a_kl b_im

    The result carries all generalized-curvature-tensor symmetries.
    """
    for name, t in (("first", a), ("second", b)):
        if t.variance != (DOWN, DOWN):
            raise ValueError(f"{name} factor must be covariant rank 2")
        if max_abs(t.components - t.components.T) > 1e-10:
            raise ValueError("asymmetric factor")
    am, bm = a.components, b.components
    comp = (
        np.einsum("im,kl->iklm", am, bm)
        - np.einsum("km,il->iklm", am, bm)
        - np.einsum("il,km->iklm", am, bm)
        + np.einsum("kl,im->iklm", am, bm)
    )
    return TensorValue(n=a.n, variance=(DOWN,) * 4, components=comp)


def generalized_curvature_check(t: TensorValue) -> dict[str, float]:
    """Max-abs residuals of the algebraic curvature symmetries of a (0,4) tensor.

    Diagnostic only: asymmetric inputs yield large residuals, not errors.
    """
    if t.variance != (DOWN,) * 4:
        raise ValueError("generalized curvature check needs a covariant rank-4 tensor")
    c = t.components
    return {
        "antisym_first_pair": max_abs(c + np.einsum("iklm->kilm", c)),
        "antisym_second_pair": max_abs(c + np.einsum("iklm->ikml", c)),
        "pair_exchange": max_abs(c - np.einsum("iklm->lmik", c)),
        "first_bianchi": max_abs(c + np.einsum("iklm->klim", c) + np.einsum("iklm->likm", c)),
    }


def norm_squared(t: TensorValue, g: TensorValue) -> float:
    """Full self-contraction, raising every down slot (and lowering every up
    slot) with the metric.  May take either sign for a Lorentzian metric."""
    _check_metric_like(g, DOWN)
    if t.rank == 0:
        return float(t.components) ** 2
    try:
        g_inv = np.linalg.inv(g.components)
    except np.linalg.LinAlgError:
        raise ValueError("singular metric") from None
    dual = t.components
    for slot, flag in enumerate(t.variance):
        metric = g_inv if flag == DOWN else g.components
        dual = np.moveaxis(np.tensordot(metric, dual, axes=(1, slot)), 0, slot)
    axes = list(range(t.rank))
    return float(np.tensordot(t.components, dual, axes=(axes, axes)))
