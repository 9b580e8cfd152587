"""Pointwise curvature pipeline: metric jets -> connection -> curvature -> Weyl.

Everything is assembled analytically from the metric's third-order Taylor
data, so first derivatives of the Weyl tensor (and hence its covariant
derivative and divergence) come out at machine precision.

Conventions (validated by the identity suite during bring-up):

* signature (-, +, ..., +), chart time coordinate first;
* ``Γ^a_bc = (1/2) g^ad (∂_b g_dc + ∂_c g_db - ∂_d g_bc)``;
* ``R^a_bcd = ∂_c Γ^a_db - ∂_d Γ^a_cb + Γ^a_ce Γ^e_db - Γ^a_de Γ^e_cb``;
* ``R_bd = R^a_bad``, ``R = g^bd R_bd`` (unit two-sphere blocks come out with
  ``R_θφθφ = sin²θ > 0``);
* Weyl: ``C_jklm = R_jklm - (g_jl R_km - g_jm R_kl + g_km R_jl - g_kl R_jm)/(n-2)
  + R (g_jl g_km - g_jm g_kl)/((n-1)(n-2))`` for n >= 4.

The comoving velocity, its covariant derivative, the expansion-type scalar
``hubble_rate = (∇_k u^k)/(n-1)``, the electric part of the Weyl tensor and
the traceless "Weyl remainder" tensor (Weyl minus its electric-part
reconstruction) are bundled alongside, since the identity suite consumes all
of them at every sampled point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import ChartPoint, MetricJets, MetricModel
from .tensors import DOWN, UP, TensorValue, kulkarni_nomizu

__all__ = [
    "Connection",
    "Curvature",
    "WeylData",
    "TensorField",
    "CurvatureBundle",
    "christoffel_from_jets",
    "christoffel",
    "riemann_ricci_scalar",
    "weyl",
    "covariant_derivative",
    "weyl_remainder_tensor",
    "build_bundle",
]

_LETTERS = "abcde"


@dataclass(frozen=True, eq=False)
class Connection:
    """Inverse metric and Christoffel symbols with coordinate derivatives.

    ``gamma[a, b, c] = Γ^a_bc`` (exactly symmetric in b, c),
    ``d_gamma[p, ...] = ∂_p Γ``, ``d2_gamma[p, q, ...] = ∂_p ∂_q Γ``.
    """

    g_inv: np.ndarray
    d_g_inv: np.ndarray
    d2_g_inv: np.ndarray
    gamma: np.ndarray
    d_gamma: np.ndarray
    d2_gamma: np.ndarray


@dataclass(frozen=True, eq=False)
class Curvature:
    """Covariant Riemann tensor, Ricci tensor and scalar, with ∂ data."""

    riemann: np.ndarray
    d_riemann: np.ndarray
    ricci: np.ndarray
    d_ricci: np.ndarray
    scalar: float
    d_scalar: np.ndarray


@dataclass(frozen=True, eq=False)
class WeylData:
    """Covariant Weyl tensor and its coordinate derivatives."""

    weyl: np.ndarray
    d_weyl: np.ndarray


@dataclass(frozen=True, eq=False)
class TensorField:
    """Tensor components plus first coordinate derivatives at one point.

    ``d1`` has the derivative index first: ``d1[p, ...] = ∂_p T[...]``.
    This is exactly the data a single covariant derivative needs.
    """

    variance: tuple[str, ...]
    components: np.ndarray
    d1: np.ndarray


def christoffel_from_jets(mj: MetricJets) -> Connection:
    """Christoffel symbols with first and second coordinate derivatives."""
    try:
        g_inv = np.linalg.inv(mj.value)
    except np.linalg.LinAlgError:
        raise ValueError("singular metric") from None
    dg, d2g, d3g = mj.d1, mj.d2, mj.d3

    d_g_inv = -np.einsum("ac,pcd,db->pab", g_inv, dg, g_inv)
    d2_g_inv = -(
        np.einsum("qac,pcd,db->pqab", d_g_inv, dg, g_inv)
        + np.einsum("ac,pqcd,db->pqab", g_inv, d2g, g_inv)
        + np.einsum("ac,pcd,qdb->pqab", g_inv, dg, d_g_inv)
    )

    k = np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
    dk = np.einsum("pbdc->pdbc", d2g) + np.einsum("pcdb->pdbc", d2g) - d2g
    d2k = np.einsum("pqbdc->pqdbc", d3g) + np.einsum("pqcdb->pqdbc", d3g) - d3g

    gamma = 0.5 * np.einsum("ad,dbc->abc", g_inv, k)
    d_gamma = 0.5 * (
        np.einsum("pad,dbc->pabc", d_g_inv, k) + np.einsum("ad,pdbc->pabc", g_inv, dk)
    )
    d2_gamma = 0.5 * (
        np.einsum("pqad,dbc->pqabc", d2_g_inv, k)
        + np.einsum("pad,qdbc->pqabc", d_g_inv, dk)
        + np.einsum("qad,pdbc->pqabc", d_g_inv, dk)
        + np.einsum("ad,pqdbc->pqabc", g_inv, d2k)
    )
    return Connection(g_inv, d_g_inv, d2_g_inv, gamma, d_gamma, d2_gamma)


def christoffel(model: MetricModel, point: ChartPoint) -> Connection:
    """Connection data of a catalog model at one chart point."""
    return christoffel_from_jets(model.metric_jets(point))


def riemann_ricci_scalar(mj: MetricJets, conn: Connection) -> Curvature:
    """Covariant Riemann tensor, Ricci tensor, curvature scalar and their ∂'s."""
    gamma, d_gamma, d2_gamma = conn.gamma, conn.d_gamma, conn.d2_gamma
    r_up = (
        np.einsum("cadb->abcd", d_gamma)
        - np.einsum("dacb->abcd", d_gamma)
        + np.einsum("ace,edb->abcd", gamma, gamma)
        - np.einsum("ade,ecb->abcd", gamma, gamma)
    )
    d_r_up = (
        np.einsum("pcadb->pabcd", d2_gamma)
        - np.einsum("pdacb->pabcd", d2_gamma)
        + np.einsum("pace,edb->pabcd", d_gamma, gamma)
        + np.einsum("ace,pedb->pabcd", gamma, d_gamma)
        - np.einsum("pade,ecb->pabcd", d_gamma, gamma)
        - np.einsum("ade,pecb->pabcd", gamma, d_gamma)
    )
    riemann = np.einsum("ae,ebcd->abcd", mj.value, r_up)
    d_riemann = np.einsum("pae,ebcd->pabcd", mj.d1, r_up) + np.einsum(
        "ae,pebcd->pabcd", mj.value, d_r_up
    )
    ricci = np.einsum("abad->bd", r_up)
    d_ricci = np.einsum("pabad->pbd", d_r_up)
    scalar = float(np.einsum("bd,bd->", conn.g_inv, ricci))
    d_scalar = np.einsum("pbd,bd->p", conn.d_g_inv, ricci) + np.einsum(
        "bd,pbd->p", conn.g_inv, d_ricci
    )
    return Curvature(riemann, d_riemann, ricci, d_ricci, scalar, d_scalar)


def weyl(mj: MetricJets, curv: Curvature) -> WeylData:
    """Totally traceless part of the Riemann tensor, with coordinate ∂'s."""
    n = mj.n
    if n < 4:
        raise ValueError("Weyl undefined for n < 4")
    g, dg = mj.value, mj.d1
    ric, d_ric = curv.ricci, curv.d_ricci

    s = (
        np.einsum("jl,km->jklm", g, ric)
        - np.einsum("jm,kl->jklm", g, ric)
        + np.einsum("km,jl->jklm", g, ric)
        - np.einsum("kl,jm->jklm", g, ric)
    )
    d_s = (
        np.einsum("pjl,km->pjklm", dg, ric)
        + np.einsum("jl,pkm->pjklm", g, d_ric)
        - np.einsum("pjm,kl->pjklm", dg, ric)
        - np.einsum("jm,pkl->pjklm", g, d_ric)
        + np.einsum("pkm,jl->pjklm", dg, ric)
        + np.einsum("km,pjl->pjklm", g, d_ric)
        - np.einsum("pkl,jm->pjklm", dg, ric)
        - np.einsum("kl,pjm->pjklm", g, d_ric)
    )
    w2 = np.einsum("jl,km->jklm", g, g) - np.einsum("jm,kl->jklm", g, g)
    d_w2 = (
        np.einsum("pjl,km->pjklm", dg, g)
        + np.einsum("jl,pkm->pjklm", g, dg)
        - np.einsum("pjm,kl->pjklm", dg, g)
        - np.einsum("jm,pkl->pjklm", g, dg)
    )
    c1 = 1.0 / (n - 2)
    c2 = 1.0 / ((n - 1) * (n - 2))
    weyl_c = curv.riemann - c1 * s + c2 * curv.scalar * w2
    d_weyl_c = (
        curv.d_riemann
        - c1 * d_s
        + c2 * (np.einsum("p,jklm->pjklm", curv.d_scalar, w2) + curv.scalar * d_w2)
    )
    return WeylData(weyl_c, d_weyl_c)


def covariant_derivative(field: TensorField, gamma: np.ndarray) -> TensorValue:
    """One covariant derivative; the new (first) slot is covariant.

    Signs follow variance: ``+Γ`` corrections for up slots, ``-Γ`` for down
    slots.  Requires the field's coordinate derivatives ``d1``.
    """
    rank = len(field.variance)
    if field.d1 is None:
        raise ValueError("missing coordinate-derivative data for covariant derivative")
    if rank > len(_LETTERS):
        raise ValueError("rank too large for covariant derivative")
    comp = np.asarray(field.components, dtype=float)
    nabla = np.array(field.d1, dtype=float)
    idx = _LETTERS[:rank]
    for slot, flag in enumerate(field.variance):
        src = idx[:slot] + "z" + idx[slot + 1 :]
        if flag == DOWN:
            nabla -= np.einsum(f"zp{idx[slot]},{src}->p{idx}", gamma, comp)
        else:
            nabla += np.einsum(f"{idx[slot]}pz,{src}->p{idx}", gamma, comp)
    n = gamma.shape[0]
    return TensorValue(n=n, variance=(DOWN,) + tuple(field.variance), components=nabla)


def weyl_remainder_tensor(
    g: TensorValue, u_down: np.ndarray, weyl_c: np.ndarray, electric: np.ndarray, n: int
) -> TensorValue:
    """Weyl tensor minus its electric-part reconstruction.

    Subtracts the Kulkarni-Nomizu products of the electric tensor with
    ``u⊗u`` (weight (n-2)/(n-3)) and with the metric (weight 1/(n-3)) from
    the Weyl tensor.  The result is a totally traceless generalized curvature
    tensor annihilated by u; it vanishes identically in n = 4.
    """
    uu = TensorValue.of(np.multiply.outer(u_down, u_down), (DOWN, DOWN))
    e = TensorValue.of(electric, (DOWN, DOWN))
    comp = (
        weyl_c
        - ((n - 2.0) / (n - 3.0)) * kulkarni_nomizu(uu, e).components
        - (1.0 / (n - 3.0)) * kulkarni_nomizu(g, e).components
    )
    return TensorValue(n=n, variance=(DOWN,) * 4, components=comp)


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    """Every curvature quantity the identity suite needs at one chart point."""

    point: np.ndarray
    n: int
    g: TensorValue
    g_inv: TensorValue
    christoffel: np.ndarray
    d_christoffel: np.ndarray
    d2_christoffel: np.ndarray
    riemann: TensorValue
    d_riemann: np.ndarray
    ricci: TensorValue
    scalar_curvature: float
    weyl: TensorValue
    d_weyl: np.ndarray
    nabla_weyl: TensorValue
    div_weyl: TensorValue
    u_down: TensorValue
    u_up: TensorValue
    nabla_u_down: TensorValue
    nabla_u_up: TensorValue
    hubble_rate: float
    d_hubble_rate: np.ndarray
    electric: TensorValue
    nabla_electric: TensorValue
    div_electric: TensorValue
    weyl_remainder: TensorValue
    raychaudhuri_scalar: float
    hubble_gradient_up: TensorValue


def build_bundle(model: MetricModel, point: ChartPoint) -> CurvatureBundle:
    """Assemble the full curvature bundle of a model at one chart point."""
    coords = np.asarray(point, dtype=float)
    n = model.n
    mj = model.metric_jets(coords)
    conn = christoffel_from_jets(mj)
    curv = riemann_ricci_scalar(mj, conn)
    wd = weyl(mj, curv)
    gamma = conn.gamma

    g = TensorValue.of(mj.value, (DOWN, DOWN))
    g_inv = TensorValue.of(conn.g_inv, (UP, UP))

    u_up_c = model.u_up
    u_down_c = mj.value @ u_up_c
    d_u_down = np.einsum("pab,b->pa", mj.d1, u_up_c)
    nabla_u_down = covariant_derivative(
        TensorField((DOWN,), u_down_c, d_u_down), gamma
    )
    nabla_u_up = covariant_derivative(
        TensorField((UP,), u_up_c, np.zeros((n, n))), gamma
    )

    hubble = float(np.trace(nabla_u_up.components)) / (n - 1)
    d_hubble = np.einsum("pkke,e->p", conn.d_gamma, u_up_c) / (n - 1)

    electric_c = np.einsum("j,m,jklm->kl", u_up_c, u_up_c, wd.weyl)
    d_electric = np.einsum("j,m,pjklm->pkl", u_up_c, u_up_c, wd.d_weyl)
    nabla_electric = covariant_derivative(
        TensorField((DOWN, DOWN), electric_c, d_electric), gamma
    )
    div_electric = TensorValue.of(
        np.einsum("ps,pis->i", conn.g_inv, nabla_electric.components), (DOWN,)
    )

    nabla_weyl = covariant_derivative(
        TensorField((DOWN,) * 4, wd.weyl, wd.d_weyl), gamma
    )
    div_weyl = TensorValue.of(
        np.einsum("ps,pikms->ikm", conn.g_inv, nabla_weyl.components), (DOWN,) * 3
    )

    remainder = weyl_remainder_tensor(g, u_down_c, wd.weyl, electric_c, n)

    raychaudhuri = (n - 1) * (float(u_up_c @ d_hubble) + hubble * hubble)
    proj = conn.g_inv + np.multiply.outer(u_up_c, u_up_c)
    hubble_grad_up = TensorValue.of(proj @ d_hubble, (UP,))

    return CurvatureBundle(
        point=coords,
        n=n,
        g=g,
        g_inv=g_inv,
        christoffel=gamma,
        d_christoffel=conn.d_gamma,
        d2_christoffel=conn.d2_gamma,
        riemann=TensorValue.of(curv.riemann, (DOWN,) * 4),
        d_riemann=curv.d_riemann,
        ricci=TensorValue.of(curv.ricci, (DOWN, DOWN)),
        scalar_curvature=curv.scalar,
        weyl=TensorValue.of(wd.weyl, (DOWN,) * 4),
        d_weyl=wd.d_weyl,
        nabla_weyl=nabla_weyl,
        div_weyl=div_weyl,
        u_down=TensorValue.of(u_down_c, (DOWN,)),
        u_up=TensorValue.of(u_up_c, (UP,)),
        nabla_u_down=nabla_u_down,
        nabla_u_up=nabla_u_up,
        hubble_rate=hubble,
        d_hubble_rate=d_hubble,
        electric=TensorValue.of(electric_c, (DOWN, DOWN)),
        nabla_electric=nabla_electric,
        div_electric=div_electric,
        weyl_remainder=remainder,
        raychaudhuri_scalar=raychaudhuri,
        hubble_gradient_up=hubble_grad_up,
    )
