"""Identity suite: every verified statement as a numerical residual.

Each registry entry pins one identity: a stable ``identity_id``, the formula
it checks (``paper_ref``, printed next to the result for auditability), a
relative tolerance, and an evaluator.  Pointwise evaluators return a
``(residual, scale)`` pair per curvature bundle, where ``scale`` is the
magnitude of the dominant contributing term; a report passes iff
``max_residual <= tolerance * max(1, scale)`` at the worst point in that
relative sense.  Collection evaluators (the if-and-only-if checks and the
divergence-free consequences) look at all sampled points of a model at once,
because their hypotheses are measured, not assumed: checks whose hypotheses
fail on a model are reported ``not-applicable`` with the measured magnitudes
attached, never asserted.

The negative-control model declares which identities it is expected to fail;
the runner treats an expected failure as a success of the suite's
discriminating power.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .curvature import CurvatureBundle, TensorField, covariant_derivative
from .models import TORSE_CLASSES, MetricModel
from .tensors import DOWN, TensorValue, generalized_curvature_check, kulkarni_nomizu, max_abs, norm_squared

__all__ = [
    "IdentityReport",
    "IdentityCheck",
    "REGISTRY",
    "registry_ids",
    "default_tolerances",
    "evaluate_check",
    "run_model_suite",
    "expected_verdict",
    "report_ok",
    "POINT_EVALUATORS",
    "torse_forming_residual",
    "weyl_compatibility_residual",
    "contraction_identity_residual",
    "ricci_decomposition_residual",
    "four_dim_identities",
    "remainder_suite",
    "bianchi_contraction_residual",
    "divergence_formula_residual",
    "master_recurrence_residual",
    "divergence_free_suite",
]

# Relative threshold below which a measured tensor counts as zero when
# deciding whether a conditional identity's hypothesis holds.
HYPOTHESIS_RTOL = 1e-8

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"


@dataclass(eq=True)
class IdentityReport:
    """Per-identity verification record."""

    identity_id: str
    paper_ref: str
    points_tested: int
    max_residual: float
    scale: float
    tolerance: float
    verdict: str
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "paper_ref": self.paper_ref,
            "points_tested": self.points_tested,
            "max_residual": self.max_residual,
            "scale": self.scale,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "extras": dict(self.extras),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IdentityReport":
        return cls(
            identity_id=data["identity_id"],
            paper_ref=data["paper_ref"],
            points_tested=int(data["points_tested"]),
            max_residual=float(data["max_residual"]),
            scale=float(data["scale"]),
            tolerance=float(data["tolerance"]),
            verdict=data["verdict"],
            extras=dict(data.get("extras", {})),
        )


# ---------------------------------------------------------------------------
# Shared per-bundle pieces
# ---------------------------------------------------------------------------


def _pair(lhs: np.ndarray, rhs: np.ndarray) -> tuple[float, float]:
    return max_abs(np.asarray(lhs) - np.asarray(rhs)), max(max_abs(lhs), max_abs(rhs))


def _weyl_u(b: CurvatureBundle) -> np.ndarray:
    """C_jklm u^m."""
    return np.einsum("jklm,m->jkl", b.weyl.components, b.u_up.components)


def _acceleration(b: CurvatureBundle) -> np.ndarray:
    """u^p ∇_p u_a (zero exactly when u is torse-forming)."""
    return np.einsum("p,pa->a", b.u_up.components, b.nabla_u_down.components)


def _d_electric_along_u(b: CurvatureBundle) -> np.ndarray:
    """u^p ∇_p E_kl."""
    return np.einsum("p,pkl->kl", b.u_up.components, b.nabla_electric.components)


def _uu_tensor(b: CurvatureBundle) -> TensorValue:
    u = b.u_down.components
    return TensorValue.of(np.multiply.outer(u, u), (DOWN, DOWN))


def _remainder_transport(b: CurvatureBundle) -> np.ndarray:
    """u^p ∇_p of the Weyl remainder, assembled by the product rule from
    ∇(Weyl), ∇E and ∇u through the two Kulkarni-Nomizu blocks."""
    n = b.n
    u = b.u_down.components
    acc = _acceleration(b)
    de = TensorValue.of(_d_electric_along_u(b), (DOWN, DOWN))
    duu = TensorValue.of(np.multiply.outer(acc, u) + np.multiply.outer(u, acc), (DOWN, DOWN))
    d_nabla_c = np.einsum("p,pjklm->jklm", b.u_up.components, b.nabla_weyl.components)
    k_uu = (n - 2.0) / (n - 3.0)
    k_g = 1.0 / (n - 3.0)
    return (
        d_nabla_c
        - k_uu * (kulkarni_nomizu(duu, b.electric).components + kulkarni_nomizu(_uu_tensor(b), de).components)
        - k_g * kulkarni_nomizu(b.g, de).components
    )


def _master_recurrence_sides(b: CurvatureBundle) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the master recurrence, grouped as stated."""
    n = b.n
    phi = b.hubble_rate
    u = b.u_down.components
    acc = _acceleration(b)
    e = b.electric
    de = TensorValue.of(_d_electric_along_u(b), (DOWN, DOWN))
    uu = _uu_tensor(b)
    duu = TensorValue.of(np.multiply.outer(acc, u) + np.multiply.outer(u, acc), (DOWN, DOWN))

    kn_uu = kulkarni_nomizu(uu, e).components
    kn_g = kulkarni_nomizu(b.g, e).components
    d_kn_uu = kulkarni_nomizu(duu, e).components + kulkarni_nomizu(uu, de).components
    d_kn_g = kulkarni_nomizu(b.g, de).components

    d_weyl_along_u = np.einsum("p,pjklm->jklm", b.u_up.components, b.nabla_weyl.components)
    lhs = (n - 3.0) * (d_weyl_along_u + 2.0 * phi * b.weyl.components)
    rhs = (n - 2.0) * (d_kn_uu + 2.0 * phi * kn_uu) + (d_kn_g + 2.0 * phi * kn_g)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Pointwise evaluators: bundle -> (residual, scale)
# ---------------------------------------------------------------------------


def _torse_forming(b: CurvatureBundle) -> tuple[float, float]:
    u = b.u_down.components
    lhs = b.nabla_u_down.components
    rhs = b.hubble_rate * (b.g.components + np.multiply.outer(u, u))
    residual, scale = _pair(lhs, rhs)
    u_norm = abs(float(u @ b.u_up.components) + 1.0)
    return max(residual, u_norm), scale


def _weyl_compatibility(b: CurvatureBundle) -> tuple[float, float]:
    u = b.u_down.components
    cu = _weyl_u(b)
    cyc = (
        np.einsum("i,jkl->ijkl", u, cu)
        + np.einsum("j,kil->ijkl", u, cu)
        + np.einsum("k,ijl->ijkl", u, cu)
    )
    return max_abs(cyc), max_abs(b.weyl)


def _electric_contraction(b: CurvatureBundle) -> tuple[float, float]:
    u = b.u_down.components
    e = b.electric.components
    rhs = np.einsum("k,jl->jkl", u, e) - np.einsum("j,kl->jkl", u, e)
    return _pair(_weyl_u(b), rhs)


def _ricci_form(b: CurvatureBundle) -> tuple[float, float]:
    n = b.n
    u = b.u_down.components
    xi = b.raychaudhuri_scalar
    r = b.scalar_curvature
    v_down = b.g.components @ b.hubble_gradient_up.components
    rhs = (
        (r - n * xi) / (n - 1) * np.multiply.outer(u, u)
        + (r - xi) / (n - 1) * b.g.components
        + (n - 2)
        * (np.multiply.outer(u, v_down) + np.multiply.outer(v_down, u) - b.electric.components)
    )
    return _pair(b.ricci.components, rhs)


def _hubble_gradient_spacelike(b: CurvatureBundle) -> tuple[float, float]:
    v = b.hubble_gradient_up.components
    return abs(float(v @ b.u_down.components)), max_abs(v)


def _lovelock_n4(b: CurvatureBundle) -> tuple[float, float]:
    g = b.g.components
    c = b.weyl.components
    total = (
        np.einsum("ar,bcst->abcrst", g, c)
        + np.einsum("br,cast->abcrst", g, c)
        + np.einsum("cr,abst->abcrst", g, c)
        + np.einsum("at,bcrs->abcrst", g, c)
        + np.einsum("bt,cars->abcrst", g, c)
        + np.einsum("ct,abrs->abcrst", g, c)
        + np.einsum("as,bctr->abcrst", g, c)
        + np.einsum("bs,catr->abcrst", g, c)
        + np.einsum("cs,abtr->abcrst", g, c)
    )
    return max_abs(total), max_abs(g) * max_abs(c)


def _weyl_all_up(b: CurvatureBundle) -> np.ndarray:
    gi = b.g_inv.components
    return np.einsum("aA,bB,cC,dD,ABCD->abcd", gi, gi, gi, gi, b.weyl.components)


def _quarter_trace_n4(b: CurvatureBundle) -> tuple[float, float]:
    c = b.weyl.components
    c_up = _weyl_all_up(b)
    c2 = float(np.einsum("abcd,abcd->", c, c_up))
    t = np.einsum("abcr,abcs->rs", c, c_up)
    return _pair(t, 0.25 * c2 * np.eye(b.n))


def _reconstruction_n4(b: CurvatureBundle) -> tuple[float, float]:
    u_up = b.u_up.components
    u = b.u_down.components
    g = b.g.components
    c = b.weyl.components
    e = b.electric.components
    q0 = np.einsum("m,mbcd->bcd", u_up, c)
    q1 = np.einsum("m,amcd->acd", u_up, c)
    q2 = np.einsum("m,abmd->abd", u_up, c)
    q3 = np.einsum("m,abcm->abc", u_up, c)
    recon = -(
        np.einsum("a,bcd->abcd", u, q0)
        + np.einsum("b,acd->abcd", u, q1)
        + np.einsum("c,abd->abcd", u, q2)
        + np.einsum("d,abc->abcd", u, q3)
    ) + (
        np.einsum("ad,bc->abcd", g, e)
        - np.einsum("bd,ac->abcd", g, e)
        - np.einsum("ac,bd->abcd", g, e)
        + np.einsum("bc,ad->abcd", g, e)
    )
    return _pair(c, recon)


def _electric_rep_n4(b: CurvatureBundle) -> tuple[float, float]:
    u = b.u_down.components
    g = b.g.components
    e = b.electric.components
    rep = 2.0 * (
        np.einsum("a,d,bc->abcd", u, u, e)
        - np.einsum("a,c,bd->abcd", u, u, e)
        + np.einsum("b,c,ad->abcd", u, u, e)
        - np.einsum("b,d,ac->abcd", u, u, e)
    ) + (
        np.einsum("ad,bc->abcd", g, e)
        - np.einsum("ac,bd->abcd", g, e)
        + np.einsum("bc,ad->abcd", g, e)
        - np.einsum("bd,ac->abcd", g, e)
    )
    return _pair(b.weyl.components, rep)


def _weyl_sq_8_electric_sq(b: CurvatureBundle) -> tuple[float, float]:
    c2 = norm_squared(b.weyl, b.g)
    e2 = norm_squared(b.electric, b.g)
    return abs(c2 - 8.0 * e2), abs(c2)


def _remainder_curvature_symmetries(b: CurvatureBundle) -> tuple[float, float]:
    residuals = generalized_curvature_check(b.weyl_remainder)
    scale = max(max_abs(b.weyl), max_abs(b.weyl_remainder))
    return max(residuals.values()), scale


def _remainder_traceless(b: CurvatureBundle) -> tuple[float, float]:
    gi = b.g_inv.components
    t = b.weyl_remainder.components
    letters = "iklm"
    worst = 0.0
    for a in range(4):
        for bb in range(a + 1, 4):
            spec = f"{letters[a]}{letters[bb]},{letters}->" + "".join(
                letters[s] for s in range(4) if s not in (a, bb)
            )
            worst = max(worst, max_abs(np.einsum(spec, gi, t)))
    return worst, max(max_abs(b.weyl), max_abs(t))


def _remainder_u_annihilation(b: CurvatureBundle) -> tuple[float, float]:
    u = b.u_up.components
    t = b.weyl_remainder.components
    letters = "iklm"
    worst = 0.0
    for slot in range(4):
        spec = f"{letters[slot]},{letters}->" + letters.replace(letters[slot], "")
        worst = max(worst, max_abs(np.einsum(spec, u, t)))
    return worst, max(max_abs(b.weyl), max_abs(t))


def _remainder_recurrence(b: CurvatureBundle) -> tuple[float, float]:
    transport = _remainder_transport(b)
    decay = 2.0 * b.hubble_rate * b.weyl_remainder.components
    return max_abs(transport + decay), max(max_abs(transport), max_abs(decay))


def _remainder_vanishes_n4(b: CurvatureBundle) -> tuple[float, float]:
    return max_abs(b.weyl_remainder), max_abs(b.weyl)


def _remainder_scalar_relation(b: CurvatureBundle) -> tuple[float, float]:
    n = b.n
    c2 = norm_squared(b.weyl, b.g)
    e2 = norm_squared(b.electric, b.g)
    t2 = norm_squared(b.weyl_remainder, b.g)
    coeff = 4.0 * (n - 2.0) / (n - 3.0)
    return abs(t2 - c2 + coeff * e2), max(abs(c2), abs(t2), coeff * abs(e2))


def _weyl_scalar_positivity(b: CurvatureBundle) -> tuple[float, float]:
    c2 = norm_squared(b.weyl, b.g)
    e2 = norm_squared(b.electric, b.g)
    t2 = norm_squared(b.weyl_remainder, b.g)
    residual = max(0.0, -c2, -e2, -t2)
    return residual, max(abs(c2), abs(e2), abs(t2))


def _bianchi_contraction(b: CurvatureBundle) -> tuple[float, float]:
    n = b.n
    nc = b.nabla_weyl.components
    lhs = nc + np.einsum("jkilm->ijklm", nc) + np.einsum("kijlm->ijklm", nc)
    g = b.g.components
    dv = b.div_weyl.components
    rhs = (
        np.einsum("jm,kil->ijklm", g, dv)
        + np.einsum("km,ijl->ijklm", g, dv)
        + np.einsum("im,jkl->ijklm", g, dv)
        + np.einsum("kl,jim->ijklm", g, dv)
        + np.einsum("il,kjm->ijklm", g, dv)
        + np.einsum("jl,ikm->ijklm", g, dv)
    ) / (n - 3.0)
    return max_abs(lhs - rhs), max_abs(nc)


def _divergence_formula(b: CurvatureBundle) -> tuple[float, float]:
    n = b.n
    phi = b.hubble_rate
    u = b.u_down.components
    e = b.electric.components
    ne = b.nabla_electric.components
    de = _d_electric_along_u(b)
    acc = _acceleration(b)
    div_e = b.div_electric.components
    g = b.g.components

    antisym = np.einsum("i,km->ikm", u, e) - np.einsum("k,im->ikm", u, e)
    d_antisym = (
        np.einsum("i,km->ikm", acc, e)
        + np.einsum("i,km->ikm", u, de)
        - np.einsum("k,im->ikm", acc, e)
        - np.einsum("k,im->ikm", u, de)
    )
    grad_term = (n - 3.0) * (ne - np.einsum("kim->ikm", ne))
    transport_term = (n - 2.0) * (d_antisym + 2.0 * phi * antisym)
    proj_term = np.einsum("k,m,i->ikm", u, u, div_e) * 2.0 + np.einsum(
        "km,i->ikm", g, div_e
    ) - np.einsum("i,m,k->ikm", u, u, div_e) * 2.0 - np.einsum("im,k->ikm", g, div_e)
    rhs = grad_term + transport_term + proj_term
    lhs = b.div_weyl.components
    residual = max_abs(lhs - rhs)
    scale = max(max_abs(lhs), max_abs(grad_term), max_abs(transport_term), max_abs(proj_term))
    return residual, scale


def _master_recurrence(b: CurvatureBundle) -> tuple[float, float]:
    lhs, rhs = _master_recurrence_sides(b)
    return max_abs(lhs - rhs), max(max_abs(lhs), max_abs(rhs))


def _master_recurrence_consistency(b: CurvatureBundle) -> tuple[float, float]:
    lhs, rhs = _master_recurrence_sides(b)
    master_residual = lhs - rhs
    recurrence_residual = _remainder_transport(b) + 2.0 * b.hubble_rate * b.weyl_remainder.components
    regrouped = (b.n - 3.0) * recurrence_residual
    return max_abs(master_residual - regrouped), max(max_abs(master_residual), max_abs(regrouped))


def _divfree_corollary_point(b: CurvatureBundle) -> tuple[float, float]:
    n = b.n
    phi = b.hubble_rate
    de = _d_electric_along_u(b)
    decay = phi * (n - 1.0) * b.electric.components
    residual = max(max_abs(b.div_electric), max_abs(de + decay))
    scale = max(max_abs(b.nabla_electric), max_abs(decay))
    return residual, scale


def _electric_gradient_recurrence_point(b: CurvatureBundle) -> tuple[float, float]:
    n = b.n
    phi = b.hubble_rate
    u = b.u_down.components
    e = b.electric.components
    ne = b.nabla_electric.components
    lhs = ne - np.einsum("kim->ikm", ne)
    rhs = (n - 2.0) * phi * (np.einsum("i,km->ikm", u, e) - np.einsum("k,im->ikm", u, e))
    return _pair(lhs, rhs)


def _weyl_u_recurrence_point(b: CurvatureBundle) -> tuple[float, float]:
    n = b.n
    phi = b.hubble_rate
    u_up = b.u_up.components
    cu = _weyl_u(b)
    d_cu = np.einsum("pjklm,m->pjkl", b.d_weyl, u_up)
    nabla_cu = covariant_derivative(TensorField((DOWN,) * 3, cu, d_cu), b.christoffel)
    transport = np.einsum("p,pjkl->jkl", u_up, nabla_cu.components)
    decay = phi * (n - 1.0) * cu
    return max_abs(transport + decay), max(max_abs(transport), max_abs(decay))


# ---------------------------------------------------------------------------
# Collection evaluators: (model, bundles) -> EvalResult
# ---------------------------------------------------------------------------


@dataclass
class EvalResult:
    applicable: bool
    residual: float = 0.0
    scale: float = 0.0
    points: int = 0
    extras: dict = field(default_factory=dict)


def _worst_point(pairs: Iterable[tuple[float, float]]) -> tuple[float, float]:
    best = (0.0, 0.0)
    best_ratio = -1.0
    for residual, scale in pairs:
        ratio = residual / max(1.0, scale)
        if ratio > best_ratio:
            best_ratio, best = ratio, (residual, scale)
    return best


def _pointwise_result(fn, bundles: Sequence[CurvatureBundle]) -> EvalResult:
    residual, scale = _worst_point(fn(b) for b in bundles)
    return EvalResult(True, residual, scale, len(bundles))


def _electric_contraction_iff(model, bundles) -> EvalResult:
    max_cu = max(max_abs(_weyl_u(b)) for b in bundles)
    max_e = max(max_abs(b.electric) for b in bundles)
    max_c = max(max_abs(b.weyl) for b in bundles)
    threshold = HYPOTHESIS_RTOL * max(1.0, max_c)
    ok = (max_cu < threshold) == (max_e < threshold)
    residual = 0.0 if ok else max(max_cu, max_e)
    return EvalResult(
        True,
        residual,
        max_c,
        len(bundles),
        extras={"max_weyl_u": max_cu, "max_electric": max_e},
    )


def _electric_iff_n4(model, bundles) -> EvalResult:
    max_c = max(max_abs(b.weyl) for b in bundles)
    max_e = max(max_abs(b.electric) for b in bundles)
    threshold = HYPOTHESIS_RTOL * max(1.0, max_c, max_e)
    ok = (max_c < threshold) == (max_e < threshold)
    residual = 0.0 if ok else max(max_c, max_e)
    return EvalResult(
        True,
        residual,
        max(max_c, max_e),
        len(bundles),
        extras={"max_weyl": max_c, "max_electric": max_e},
    )


def _electric_hypothesis_holds(bundles) -> tuple[bool, dict]:
    max_e = max(max_abs(b.electric) for b in bundles)
    max_c = max(max_abs(b.weyl) for b in bundles)
    holds = max_e < HYPOTHESIS_RTOL * max(1.0, max_c)
    return holds, {"max_electric": max_e, "max_weyl": max_c}


def _divfree_hypothesis_holds(bundles) -> tuple[bool, dict]:
    max_div = max(max_abs(b.div_weyl) for b in bundles)
    max_nc = max(max_abs(b.nabla_weyl) for b in bundles)
    holds = max_div < HYPOTHESIS_RTOL * max(1.0, max_nc)
    return holds, {"max_div_weyl": max_div, "max_nabla_weyl": max_nc}


def _electric_zero_implies_divfree(model, bundles) -> EvalResult:
    holds, extras = _electric_hypothesis_holds(bundles)
    if not holds:
        ev = EvalResult(False, extras=extras)
        ev.extras["max_div_weyl"] = max(max_abs(b.div_weyl) for b in bundles)
        return ev
    residual, scale = _worst_point(
        (max_abs(b.div_weyl), max_abs(b.nabla_weyl)) for b in bundles
    )
    return EvalResult(True, residual, scale, len(bundles), extras=extras)


def _conditional_on_divfree(point_fn):
    def run(model, bundles) -> EvalResult:
        holds, extras = _divfree_hypothesis_holds(bundles)
        if not holds:
            return EvalResult(False, extras=extras)
        result = _pointwise_result(point_fn, bundles)
        result.extras.update(extras)
        return result

    return run


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


def _always(model: MetricModel) -> bool:
    return True


def _torse_class(model: MetricModel) -> bool:
    return model.expected_class in TORSE_CLASSES


def _n4(model: MetricModel) -> bool:
    return model.n == 4


def _torse_class_n4(model: MetricModel) -> bool:
    return _torse_class(model) and model.n == 4


@dataclass(frozen=True)
class IdentityCheck:
    identity_id: str
    paper_ref: str
    group: str
    tolerance: float
    applies: Callable[[MetricModel], bool]
    point_fn: Callable[[CurvatureBundle], tuple[float, float]] | None = None
    collection_fn: Callable[[MetricModel, Sequence[CurvatureBundle]], EvalResult] | None = None


REGISTRY: tuple[IdentityCheck, ...] = (
    IdentityCheck(
        "torse_forming",
        "∇_i u_j = φ (g_ij + u_i u_j), u_k u^k = -1",
        "kinematics",
        1e-9,
        _always,
        point_fn=_torse_forming,
    ),
    IdentityCheck(
        "weyl_compatibility",
        "(u_i C_jklm + u_j C_kilm + u_k C_ijlm) u^m = 0",
        "weyl-electric structure",
        1e-9,
        _always,
        point_fn=_weyl_compatibility,
    ),
    IdentityCheck(
        "electric_contraction",
        "C_jklm u^m = u_k E_jl - u_j E_kl",
        "weyl-electric structure",
        1e-9,
        _torse_class,
        point_fn=_electric_contraction,
    ),
    IdentityCheck(
        "electric_contraction_iff",
        "C_jklm u^m = 0  ⇔  E_jk = 0",
        "weyl-electric structure",
        1e-9,
        _torse_class,
        collection_fn=_electric_contraction_iff,
    ),
    IdentityCheck(
        "ricci_form",
        "R_jk = (R - nξ)/(n-1) u_j u_k + (R - ξ)/(n-1) g_jk + (n-2)(u_j v_k + u_k v_j - E_jk)",
        "ricci structure",
        1e-9,
        _torse_class,
        point_fn=_ricci_form,
    ),
    IdentityCheck(
        "hubble_gradient_spacelike",
        "v^k = (g^km + u^k u^m) ∇_m φ satisfies v_k u^k = 0",
        "ricci structure",
        1e-11,
        _torse_class,
        point_fn=_hubble_gradient_spacelike,
    ),
    IdentityCheck(
        "lovelock_n4",
        "0 = g_ar C_bcst + g_br C_cast + g_cr C_abst + g_at C_bcrs + g_bt C_cars "
        "+ g_ct C_abrs + g_as C_bctr + g_bs C_catr + g_cs C_abtr   (n = 4)",
        "four-dimensional algebra",
        1e-10,
        _n4,
        point_fn=_lovelock_n4,
    ),
    IdentityCheck(
        "quarter_trace_n4",
        "C_abcr C^abcs = (1/4) δ_r^s C²   (n = 4)",
        "four-dimensional algebra",
        1e-10,
        _n4,
        point_fn=_quarter_trace_n4,
    ),
    IdentityCheck(
        "reconstruction_n4",
        "C_abcd = -u^m (u_a C_mbcd + u_b C_amcd + u_c C_abmd + u_d C_abcm) "
        "+ g_ad E_bc - g_bd E_ac - g_ac E_bd + g_bc E_ad   (n = 4, unit timelike u)",
        "four-dimensional algebra",
        1e-9,
        _n4,
        point_fn=_reconstruction_n4,
    ),
    IdentityCheck(
        "electric_rep_n4",
        "C_abcd = 2(u_a u_d E_bc - u_a u_c E_bd + u_b u_c E_ad - u_b u_d E_ac) "
        "+ g_ad E_bc - g_ac E_bd + g_bc E_ad - g_bd E_ac   (n = 4, torse-forming u)",
        "four-dimensional algebra",
        1e-9,
        _n4,
        point_fn=_electric_rep_n4,
    ),
    IdentityCheck(
        "weyl_sq_8_electric_sq_n4",
        "C² = 8 E²   (n = 4, torse-forming u)",
        "four-dimensional algebra",
        1e-9,
        _torse_class_n4,
        point_fn=_weyl_sq_8_electric_sq,
    ),
    IdentityCheck(
        "electric_iff_n4",
        "C_abcd = 0  ⇔  E_ab = 0   (n = 4, torse-forming u)",
        "four-dimensional algebra",
        1e-9,
        _torse_class_n4,
        collection_fn=_electric_iff_n4,
    ),
    IdentityCheck(
        "remainder_curvature_symmetries",
        "the Weyl remainder has the algebraic symmetries of a curvature tensor "
        "(pair antisymmetry, pair exchange, first Bianchi)",
        "weyl remainder",
        1e-10,
        _torse_class,
        point_fn=_remainder_curvature_symmetries,
    ),
    IdentityCheck(
        "remainder_traceless",
        "every single trace of the Weyl remainder vanishes",
        "weyl remainder",
        1e-10,
        _torse_class,
        point_fn=_remainder_traceless,
    ),
    IdentityCheck(
        "remainder_u_annihilation",
        "the Weyl remainder contracted with u^m on any slot vanishes",
        "weyl remainder",
        1e-10,
        _torse_class,
        point_fn=_remainder_u_annihilation,
    ),
    IdentityCheck(
        "remainder_recurrence",
        "u^p ∇_p (Weyl remainder) = -2φ (Weyl remainder)",
        "weyl remainder",
        1e-8,
        _torse_class,
        point_fn=_remainder_recurrence,
    ),
    IdentityCheck(
        "remainder_vanishes_n4",
        "the Weyl remainder is identically zero in n = 4",
        "weyl remainder",
        1e-9,
        _torse_class_n4,
        point_fn=_remainder_vanishes_n4,
    ),
    IdentityCheck(
        "remainder_scalar_relation",
        "(remainder)² = C² - 4 (n-2)/(n-3) E²",
        "weyl remainder",
        1e-9,
        _torse_class,
        point_fn=_remainder_scalar_relation,
    ),
    IdentityCheck(
        "weyl_scalar_positivity",
        "C² = 4 (n-2)/(n-3) E² + (remainder)² ≥ 0, E² ≥ 0, (remainder)² ≥ 0",
        "weyl remainder",
        1e-10,
        _torse_class,
        point_fn=_weyl_scalar_positivity,
    ),
    IdentityCheck(
        "weyl_bianchi_contraction",
        "∇_i C_jklm + ∇_j C_kilm + ∇_k C_ijlm = (g_jm D_kil + g_km D_ijl + g_im D_jkl "
        "+ g_kl D_jim + g_il D_kjm + g_jl D_ikm)/(n-3)  with  D_abc = ∇_p C_abc^p",
        "derivative identities",
        1e-8,
        _always,
        point_fn=_bianchi_contraction,
    ),
    IdentityCheck(
        "weyl_divergence_formula",
        "∇_p C_ikm^p = (n-3)(∇_i E_km - ∇_k E_im) + (n-2)[u^p ∇_p (u_i E_km - u_k E_im) "
        "+ 2φ (u_i E_km - u_k E_im)] + (2u_k u_m + g_km) ∇_p E_i^p - (2u_i u_m + g_im) ∇_p E_k^p",
        "derivative identities",
        1e-8,
        _always,
        point_fn=_divergence_formula,
    ),
    IdentityCheck(
        "master_recurrence",
        "(n-3)(u^p ∇_p C_iklm + 2φ C_iklm) = (n-2)[u^p ∇_p + 2φ](u⊗u ∧ E)_iklm "
        "+ [u^p ∇_p + 2φ](g ∧ E)_iklm",
        "derivative identities",
        1e-8,
        _torse_class,
        point_fn=_master_recurrence,
    ),
    IdentityCheck(
        "master_recurrence_consistency",
        "the master recurrence equals (n-3) times the Weyl-remainder recurrence "
        "after regrouping",
        "derivative identities",
        1e-9,
        _torse_class,
        point_fn=_master_recurrence_consistency,
    ),
    IdentityCheck(
        "electric_zero_implies_divfree",
        "u_m C_jkl^m = 0  ⟹  ∇_m C_jkl^m = 0",
        "divergence-free consequences",
        1e-8,
        _torse_class,
        collection_fn=_electric_zero_implies_divfree,
    ),
    IdentityCheck(
        "divfree_corollary",
        "∇_p C_jkl^p = 0  ⟹  ∇_p E^pk = 0  and  u^p ∇_p E_km = -φ (n-1) E_km",
        "divergence-free consequences",
        1e-8,
        _torse_class,
        collection_fn=_conditional_on_divfree(_divfree_corollary_point),
    ),
    IdentityCheck(
        "electric_gradient_recurrence",
        "∇_i E_km - ∇_k E_im = (n-2) φ (u_i E_km - u_k E_im)  when  ∇_p C_jkl^p = 0",
        "divergence-free consequences",
        1e-8,
        _torse_class,
        collection_fn=_conditional_on_divfree(_electric_gradient_recurrence_point),
    ),
    IdentityCheck(
        "weyl_u_recurrence",
        "∇_m C_jkl^m = 0  ⟹  u^p ∇_p (u_m C_jkl^m) = -φ (n-1) u_m C_jkl^m",
        "divergence-free consequences",
        1e-8,
        _torse_class,
        collection_fn=_conditional_on_divfree(_weyl_u_recurrence_point),
    ),
)

GROUPS = (
    "kinematics",
    "weyl-electric structure",
    "ricci structure",
    "four-dimensional algebra",
    "weyl remainder",
    "derivative identities",
    "divergence-free consequences",
)

_BY_ID = {check.identity_id: check for check in REGISTRY}

# Pointwise evaluators exposed for tests that need per-point residuals.
POINT_EVALUATORS: dict[str, Callable[[CurvatureBundle], tuple[float, float]]] = {
    check.identity_id: check.point_fn for check in REGISTRY if check.point_fn is not None
}


def registry_ids() -> tuple[str, ...]:
    return tuple(check.identity_id for check in REGISTRY)


def default_tolerances() -> dict[str, float]:
    return {check.identity_id: check.tolerance for check in REGISTRY}


def evaluate_check(
    check: IdentityCheck,
    model: MetricModel,
    bundles: Sequence[CurvatureBundle],
    tolerance: float | None = None,
) -> IdentityReport:
    """Evaluate one identity over a model's bundles and build its report."""
    if not bundles:
        raise ValueError("at least one curvature bundle is required")
    tol = check.tolerance if tolerance is None else float(tolerance)
    if not check.applies(model):
        return IdentityReport(check.identity_id, check.paper_ref, 0, 0.0, 0.0, tol, NOT_APPLICABLE)
    if check.collection_fn is not None:
        result = check.collection_fn(model, bundles)
    else:
        result = _pointwise_result(check.point_fn, bundles)
    if not result.applicable:
        return IdentityReport(
            check.identity_id,
            check.paper_ref,
            0,
            0.0,
            0.0,
            tol,
            NOT_APPLICABLE,
            extras=result.extras,
        )
    verdict = PASS if result.residual <= tol * max(1.0, result.scale) else FAIL
    return IdentityReport(
        check.identity_id,
        check.paper_ref,
        result.points,
        result.residual,
        result.scale,
        tol,
        verdict,
        extras=result.extras,
    )


def run_model_suite(
    model: MetricModel,
    bundles: Sequence[CurvatureBundle],
    tolerances: dict[str, float] | None = None,
) -> list[IdentityReport]:
    """All registry identities for one model, sorted by identity_id."""
    overrides = tolerances or {}
    unknown = set(overrides) - set(_BY_ID)
    if unknown:
        raise ValueError(f"unknown identity ids in tolerance overrides: {sorted(unknown)}")
    reports = [
        evaluate_check(check, model, bundles, overrides.get(check.identity_id))
        for check in REGISTRY
    ]
    return sorted(reports, key=lambda r: r.identity_id)


def expected_verdict(model: MetricModel, report: IdentityReport) -> str:
    """What the catalog expects this report's verdict to be."""
    if report.verdict == NOT_APPLICABLE:
        return NOT_APPLICABLE
    return FAIL if report.identity_id in model.expected_failures else PASS


def report_ok(model: MetricModel, report: IdentityReport) -> bool:
    """True when the verdict matches the catalog's expectation."""
    return report.verdict == expected_verdict(model, report)


# ---------------------------------------------------------------------------
# Grouped entry points mirroring the suite's operation-level surface
# ---------------------------------------------------------------------------


def _as_bundles(bundles) -> list[CurvatureBundle]:
    if isinstance(bundles, CurvatureBundle):
        return [bundles]
    return list(bundles)


def _single(identity_id: str, bundles, tolerance: float | None = None) -> IdentityReport:
    check = _BY_ID[identity_id]
    bl = _as_bundles(bundles)
    result = (
        check.collection_fn(None, bl)
        if check.collection_fn is not None
        else _pointwise_result(check.point_fn, bl)
    )
    tol = check.tolerance if tolerance is None else float(tolerance)
    if not result.applicable:
        return IdentityReport(
            check.identity_id, check.paper_ref, 0, 0.0, 0.0, tol, NOT_APPLICABLE, result.extras
        )
    verdict = PASS if result.residual <= tol * max(1.0, result.scale) else FAIL
    return IdentityReport(
        check.identity_id,
        check.paper_ref,
        result.points,
        result.residual,
        result.scale,
        tol,
        verdict,
        result.extras,
    )


def torse_forming_residual(bundles) -> IdentityReport:
    return _single("torse_forming", bundles)


def weyl_compatibility_residual(bundles) -> IdentityReport:
    return _single("weyl_compatibility", bundles)


def contraction_identity_residual(bundles) -> list[IdentityReport]:
    return [_single("electric_contraction", bundles), _single("electric_contraction_iff", bundles)]


def ricci_decomposition_residual(bundles) -> list[IdentityReport]:
    return [_single("ricci_form", bundles), _single("hubble_gradient_spacelike", bundles)]


def four_dim_identities(bundles) -> list[IdentityReport]:
    bl = _as_bundles(bundles)
    ids = (
        "lovelock_n4",
        "quarter_trace_n4",
        "reconstruction_n4",
        "electric_rep_n4",
        "weyl_sq_8_electric_sq_n4",
        "electric_iff_n4",
    )
    if bl[0].n != 4:
        return [
            IdentityReport(i, _BY_ID[i].paper_ref, 0, 0.0, 0.0, _BY_ID[i].tolerance, NOT_APPLICABLE)
            for i in ids
        ]
    return [_single(i, bl) for i in ids]


def remainder_suite(bundles) -> list[IdentityReport]:
    bl = _as_bundles(bundles)
    ids = [
        "remainder_curvature_symmetries",
        "remainder_traceless",
        "remainder_u_annihilation",
        "remainder_recurrence",
        "remainder_scalar_relation",
        "weyl_scalar_positivity",
    ]
    reports = [_single(i, bl) for i in ids]
    if bl[0].n == 4:
        reports.insert(4, _single("remainder_vanishes_n4", bl))
    return reports


def bianchi_contraction_residual(bundles) -> IdentityReport:
    return _single("weyl_bianchi_contraction", bundles)


def divergence_formula_residual(bundles) -> IdentityReport:
    return _single("weyl_divergence_formula", bundles)


def master_recurrence_residual(bundles) -> list[IdentityReport]:
    return [_single("master_recurrence", bundles), _single("master_recurrence_consistency", bundles)]


def divergence_free_suite(bundles) -> list[IdentityReport]:
    ids = (
        "electric_zero_implies_divfree",
        "divfree_corollary",
        "electric_gradient_recurrence",
        "weyl_u_recurrence",
    )
    return [_single(i, bundles) for i in ids]
