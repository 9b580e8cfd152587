"""Catalog of explicit chart-level metrics and deterministic point sampling.

Every model is a named, parameterized recipe that produces third-order Taylor
data (:class:`~weylgeom.jets.Jet3`) for each metric component at a chart
point, together with a declared comoving velocity field ``u^a = (1, 0, ..., 0)``
and an ``expected_class`` tag that the identity suite uses to decide which
checks are assertions, which are expected failures, and which do not apply.

The chart convention is ``x^0 = t`` first, signature (-, +, ..., +).  Block
models take the form ``ds^2 = -dt^2 + f(t, x)^2 g*_{mu nu}(x) dx^mu dx^nu``;
the negative control breaks that block structure with an off-diagonal term.

User-defined diagonal metrics can be declared in a run config through the
``custom_diagonal`` catalog entry: each diagonal component is an expression
over ``t, x1, ..., x{n-1}`` using ``+ - * / **``, ``exp``, ``log``, ``sin``,
``cos`` and ``pow``, compiled through a whitelisted AST walk (no code
execution).
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jets
from .jets import Jet3

__all__ = [
    "ChartPoint",
    "MetricJets",
    "MetricModel",
    "builtin_model",
    "sample_points",
    "evaluate_metric_jets",
    "compile_expression",
    "CATALOG_NAMES",
    "MODEL_CLASSES",
    "default_model_specs",
]

# A chart point is a plain 1-D float array, x^0 = t first.
ChartPoint = np.ndarray

MODEL_CLASSES = ("minkowski", "rw", "grw", "twisted", "non_twisted")

# Classes on which the comoving velocity is torse-forming by construction.
TORSE_CLASSES = frozenset({"minkowski", "rw", "grw", "twisted"})

# Identities the built-in negative control is expected to fail.  Only the
# torse-forming failure is definitional for the non_twisted class; the other
# three are measured properties of that specific perturbation (a custom
# control may, e.g., still have a purely electric Weyl tensor).
NEGATIVE_CONTROL_EXPECTED_FAILURES = frozenset(
    {
        "torse_forming",
        "weyl_compatibility",
        "weyl_divergence_formula",
        "electric_rep_n4",
    }
)

EntryFn = Callable[[Sequence[Jet3]], Jet3]


@dataclass(frozen=True, eq=False)
class MetricJets:
    """Metric components and their coordinate derivatives at one point.

    ``value[a, b] = g_ab``, ``d1[p, a, b] = ∂_p g_ab``,
    ``d2[p, q, a, b] = ∂_p ∂_q g_ab``, ``d3[p, q, r, a, b] = ∂_p ∂_q ∂_r g_ab``.
    All arrays are exactly symmetric in (a, b) and in the derivative slots.
    """

    n: int
    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray


@dataclass(frozen=True, eq=False)
class MetricModel:
    """Named, parameterized chart-level metric producing jet data per point."""

    name: str
    n: int
    parameters: dict
    expected_class: str
    entries: dict[tuple[int, int], EntryFn]
    bounds: tuple[tuple[float, float], ...]
    description: str
    expected_failures: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.expected_class not in MODEL_CLASSES:
            raise ValueError(f"unknown expected_class {self.expected_class!r}")
        if len(self.bounds) != self.n:
            raise ValueError("one sampling interval per coordinate is required")

    @property
    def label(self) -> str:
        suffix = f"_n{self.n}"
        return self.name if self.name.endswith(suffix) else self.name + suffix

    @property
    def u_up(self) -> np.ndarray:
        """Declared comoving velocity components (chart-constant)."""
        u = np.zeros(self.n)
        u[0] = 1.0
        return u

    def metric_jets(self, point: ChartPoint) -> MetricJets:
        """Evaluate all g_ab jets at a point and validate the signature."""
        mj = evaluate_metric_jets(self.entries, self.n, point)
        eigvals = np.linalg.eigvalsh(mj.value)
        if np.sum(eigvals < 0.0) != 1 or np.any(eigvals == 0.0):
            raise ValueError(
                f"metric signature is not Lorentzian at point {np.asarray(point).tolist()}"
            )
        return mj


def evaluate_metric_jets(
    entries: dict[tuple[int, int], EntryFn], n: int, point: ChartPoint
) -> MetricJets:
    """Evaluate entry jets at a point, mirroring (a, b) -> (b, a) exactly."""
    coords = np.asarray(point, dtype=float)
    if coords.shape != (n,):
        raise ValueError(f"point must have {n} coordinates, got shape {coords.shape}")
    xj = jets.variables(coords)
    value = np.zeros((n, n))
    d1 = np.zeros((n, n, n))
    d2 = np.zeros((n, n, n, n))
    d3 = np.zeros((n, n, n, n, n))
    for (a, b), fn in entries.items():
        j = fn(xj)
        for aa, bb in {(a, b), (b, a)}:
            value[aa, bb] = j.value
            d1[:, aa, bb] = j.d1
            d2[:, :, aa, bb] = j.d2
            d3[:, :, :, aa, bb] = j.d3
    return MetricJets(n=n, value=value, d1=d1, d2=d2, d3=d3)


def sample_points(model: MetricModel, count: int, seed: int) -> list[ChartPoint]:
    """Deterministic pseudo-random chart points inside the model's domain."""
    if count < 1:
        raise ValueError("empty sample")
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in model.bounds])
    hi = np.array([b[1] for b in model.bounds])
    return [lo + (hi - lo) * rng.random(model.n) for _ in range(count)]


# ---------------------------------------------------------------------------
# Expression grammar for user-defined diagonal metrics
# ---------------------------------------------------------------------------

_ALLOWED_CALLS = {"exp": jets.exp, "log": jets.log, "sin": jets.sin, "cos": jets.cos}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


def compile_expression(source: str, n: int) -> EntryFn:
    """Compile one metric-entry expression into a jet-valued closure.

    The grammar admits numeric literals, the names ``t`` and ``x1 .. x{n-1}``,
    the operators ``+ - * / **`` (exponents must be numeric literals), unary
    minus, and calls to ``exp``, ``log``, ``sin``, ``cos``, ``pow``.
    Anything else is rejected.
    """
    names = {"t": 0}
    for i in range(1, n):
        names[f"x{i}"] = i
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as err:
        raise ValueError(f"invalid metric expression {source!r}: {err}") from None

    def build(node: ast.AST) -> Callable[[Sequence[Jet3]], Jet3 | float]:
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)):
                raise ValueError(f"non-numeric literal in metric expression {source!r}")
            c = float(node.value)
            return lambda xj: c
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ValueError(f"unknown name {node.id!r} in metric expression {source!r}")
            idx = names[node.id]
            return lambda xj: xj[idx]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            sign = -1.0 if isinstance(node.op, ast.USub) else 1.0
            return lambda xj: sign * _as_jet(inner(xj), len(xj))
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            left, right = build(node.left), build(node.right)
            op = _BINOPS[type(node.op)]
            return lambda xj: op(_as_jet(left(xj), len(xj)), right(xj))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            base = build(node.left)
            expo = _literal_number(node.right, source)
            return lambda xj: jets.power(_as_jet(base(xj), len(xj)), expo)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            fname = node.func.id
            if fname == "pow":
                if len(node.args) != 2 or node.keywords:
                    raise ValueError(f"pow() takes exactly two arguments in {source!r}")
                base = build(node.args[0])
                expo = _literal_number(node.args[1], source)
                return lambda xj: jets.power(_as_jet(base(xj), len(xj)), expo)
            if fname in _ALLOWED_CALLS and len(node.args) == 1 and not node.keywords:
                fn = _ALLOWED_CALLS[fname]
                arg = build(node.args[0])
                return lambda xj: fn(_as_jet(arg(xj), len(xj)))
            raise ValueError(f"unsupported call {fname!r} in metric expression {source!r}")
        raise ValueError(
            f"unsupported syntax {type(node).__name__} in metric expression {source!r}"
        )

    inner = build(tree)
    return lambda xj: _as_jet(inner(xj), len(xj))


def _as_jet(value, n: int) -> Jet3:
    return value if isinstance(value, Jet3) else jets.constant(float(value), n)


def _literal_number(node: ast.AST, source: str) -> float:
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_literal_number(node.operand, source)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    raise ValueError(f"exponent must be a numeric literal in metric expression {source!r}")


# ---------------------------------------------------------------------------
# Built-in catalog
# ---------------------------------------------------------------------------

_T_BOUNDS = (0.1, 2.0)
_SPATIAL_BOUNDS = (-1.2, 1.2)
_ANGLE_BOUNDS = (0.3, math.pi - 0.3)


def _check_n(n: int) -> int:
    n = int(n)
    if not 4 <= n <= 7:
        raise ValueError(f"dimension n must be in 4..7, got {n}")
    return n


def _scale_factor_squared(alpha: float, beta: float) -> EntryFn:
    """Jet for f(t, x)^2 with f = exp(alpha*t + beta*t*sin(x1))."""

    def fn(xj: Sequence[Jet3]) -> Jet3:
        t, x1 = xj[0], xj[1]
        return jets.exp(2.0 * (alpha * t + beta * t * jets.sin(x1)))

    return fn


def _minkowski(n: int | None, params: dict) -> MetricModel:
    n = _check_n(4 if n is None else n)
    entries: dict[tuple[int, int], EntryFn] = {(0, 0): lambda xj: jets.constant(-1.0, len(xj))}
    for mu in range(1, n):
        entries[(mu, mu)] = lambda xj: jets.constant(1.0, len(xj))
    return MetricModel(
        name="minkowski",
        n=n,
        parameters={},
        expected_class="minkowski",
        entries=entries,
        bounds=(_T_BOUNDS,) + (_SPATIAL_BOUNDS,) * (n - 1),
        description="flat metric diag(-1, 1, ..., 1)",
    )


_RW_SCALE_CHOICES = ("exp", "power", "one_plus_t2")


def _rw_flat(n: int | None, params: dict) -> MetricModel:
    n = _check_n(4 if n is None else n)
    choice = params.get("f", "exp")
    if choice not in _RW_SCALE_CHOICES:
        raise ValueError(f"rw_flat scale choice must be one of {_RW_SCALE_CHOICES}")
    used: dict = {"f": choice}
    if choice == "exp":
        h = float(params.get("H", 0.3))
        used["H"] = h
        scale_sq: EntryFn = lambda xj: jets.exp((2.0 * h) * xj[0])
    elif choice == "power":
        k = float(params.get("k", 2.0))
        used["k"] = k
        scale_sq = lambda xj: jets.power(xj[0], 2.0 * k)
    else:
        scale_sq = lambda xj: jets.power(1.0 + xj[0] * xj[0], 2)
    entries: dict[tuple[int, int], EntryFn] = {(0, 0): lambda xj: jets.constant(-1.0, len(xj))}
    for mu in range(1, n):
        entries[(mu, mu)] = scale_sq
    return MetricModel(
        name="rw_flat",
        n=n,
        parameters=used,
        expected_class="rw",
        entries=entries,
        bounds=(_T_BOUNDS,) + (_SPATIAL_BOUNDS,) * (n - 1),
        description="spatially flat expanding metric -dt^2 + f(t)^2 dx^2 (zero Weyl tensor)",
    )


def _grw_product_spheres(n: int | None, params: dict) -> MetricModel:
    n = 5 if n is None else int(n)
    if n != 5:
        raise ValueError("grw_product_spheres is a five-dimensional model (n=5)")
    r1 = float(params.get("r1", 1.0))
    r2 = float(params.get("r2", 1.0))
    h = float(params.get("H", 0.3))
    if r1 <= 0 or r2 <= 0:
        raise ValueError("sphere radii must be positive")

    def scale_sq(xj: Sequence[Jet3]) -> Jet3:
        return jets.exp((2.0 * h) * xj[0])

    entries: dict[tuple[int, int], EntryFn] = {
        (0, 0): lambda xj: jets.constant(-1.0, len(xj)),
        (1, 1): lambda xj: (r1 * r1) * scale_sq(xj),
        (2, 2): lambda xj: (r1 * r1) * scale_sq(xj) * jets.power(jets.sin(xj[1]), 2),
        (3, 3): lambda xj: (r2 * r2) * scale_sq(xj),
        (4, 4): lambda xj: (r2 * r2) * scale_sq(xj) * jets.power(jets.sin(xj[3]), 2),
    }
    return MetricModel(
        name="grw_product_spheres",
        n=5,
        parameters={"r1": r1, "r2": r2, "H": h},
        expected_class="grw",
        entries=entries,
        bounds=(_T_BOUNDS,) + (_ANGLE_BOUNDS,) * 4,
        description=(
            "time-only scale factor exp(H t) over a product-of-two-spheres fiber; "
            "with r1 = r2 the fiber is Einstein, so the electric Weyl part vanishes "
            "while the Weyl tensor does not"
        ),
    )


def _twisted_entries(n: int, alpha: float, beta: float, eps: float) -> dict:
    # Fiber entry mu depends on the *next* spatial coordinate (cyclically).
    # A diagonal metric whose entries each depend on their own coordinate is
    # flat (a coordinate stretch of Euclidean space), which would make the
    # fiber conformally flat and the Weyl-remainder checks vacuous; the
    # shifted dependence keeps the fiber genuinely curved.
    f_sq = _scale_factor_squared(alpha, beta)
    entries: dict[tuple[int, int], EntryFn] = {(0, 0): lambda xj: jets.constant(-1.0, len(xj))}

    def diag_entry(dep: int) -> EntryFn:
        return lambda xj: f_sq(xj) * (1.0 + eps * jets.cos(xj[dep]))

    for mu in range(1, n):
        entries[(mu, mu)] = diag_entry(1 + (mu % (n - 1)))
    return entries


def _twisted_generic(n: int | None, params: dict) -> MetricModel:
    n = _check_n(5 if n is None else n)
    alpha = float(params.get("alpha", 0.2))
    beta = float(params.get("beta", 0.1))
    eps = float(params.get("eps", 0.05))
    if not -0.9 < eps < 0.9:
        raise ValueError("fiber perturbation eps must keep the metric Riemannian (|eps| < 0.9)")
    return MetricModel(
        name="twisted_generic",
        n=n,
        parameters={"alpha": alpha, "beta": beta, "eps": eps},
        expected_class="twisted",
        entries=_twisted_entries(n, alpha, beta, eps),
        bounds=(_T_BOUNDS,) + (_SPATIAL_BOUNDS,) * (n - 1),
        description=(
            "genuinely twisted metric: non-separable scale factor "
            "f = exp(alpha t + beta t sin(x1)) over a curved diagonal fiber "
            "g*_mm = 1 + eps cos(x_{m+1}) (cyclic coordinate dependence)"
        ),
    )


def _twisted_n4(n: int | None, params: dict) -> MetricModel:
    if n not in (None, 4):
        raise ValueError("twisted_n4 is the four-dimensional member of the twisted family")
    model = _twisted_generic(4, params)
    return MetricModel(
        name="twisted_n4",
        n=4,
        parameters=model.parameters,
        expected_class="twisted",
        entries=model.entries,
        bounds=model.bounds,
        description="four-dimensional member of the twisted family",
    )


def _non_twisted_perturbed(n: int | None, params: dict) -> MetricModel:
    n = _check_n(4 if n is None else n)
    delta = float(params.get("delta", 0.1))
    alpha = float(params.get("alpha", 0.2))
    beta = float(params.get("beta", 0.1))
    eps = float(params.get("eps", 0.05))
    entries = _twisted_entries(n, alpha, beta, eps)
    # The off-block perturbation must depend on a coordinate other than x1:
    # delta*sin(x1) dt dx1 is an exact form, absorbable into a time
    # redefinition, and would violate the torse-forming condition only at
    # order delta^2.  delta*sin(x2) dt dx1 is non-integrable and gives the
    # declared velocity O(delta) vorticity at almost every point.
    entries[(0, 1)] = lambda xj: delta * jets.sin(xj[2])
    return MetricModel(
        name="non_twisted_perturbed",
        n=n,
        parameters={"delta": delta, "alpha": alpha, "beta": beta, "eps": eps},
        expected_class="non_twisted",
        entries=entries,
        bounds=(_T_BOUNDS,) + (_SPATIAL_BOUNDS,) * (n - 1),
        description=(
            "negative control: twisted metric plus an off-block term g_01 = delta sin(x2), "
            "so the comoving velocity acquires vorticity and is no longer torse-forming"
        ),
        expected_failures=NEGATIVE_CONTROL_EXPECTED_FAILURES,
    )


def _custom_diagonal(n: int | None, params: dict) -> MetricModel:
    if n is None:
        raise ValueError("custom_diagonal requires an explicit dimension n")
    n = _check_n(n)
    exprs = params.get("g_diag")
    if not isinstance(exprs, (list, tuple)) or len(exprs) != n:
        raise ValueError("custom_diagonal needs a list 'g_diag' of n expression strings")
    expected_class = params.get("expected_class", "twisted")
    entries = {
        (i, i): compile_expression(str(src), n) for i, src in enumerate(exprs)
    }
    declared = params.get("expected_failures")
    if declared is None:
        # Failing the torse-forming check is what "non_twisted" means; any
        # further expected failures are model knowledge the user declares.
        expected_failures = (
            frozenset({"torse_forming"}) if expected_class == "non_twisted" else frozenset()
        )
    else:
        expected_failures = frozenset(map(str, declared))
    used = {"g_diag": list(map(str, exprs)), "expected_class": expected_class}
    if declared is not None:
        used["expected_failures"] = sorted(expected_failures)
    return MetricModel(
        name="custom_diagonal",
        n=n,
        parameters=used,
        expected_class=expected_class,
        entries=entries,
        bounds=(_T_BOUNDS,) + (_SPATIAL_BOUNDS,) * (n - 1),
        description="user-defined diagonal metric from the expression grammar",
        expected_failures=expected_failures,
    )


_BUILDERS: dict[str, Callable[[int | None, dict], MetricModel]] = {
    "minkowski": _minkowski,
    "rw_flat": _rw_flat,
    "grw_product_spheres": _grw_product_spheres,
    "twisted_generic": _twisted_generic,
    "twisted_n4": _twisted_n4,
    "non_twisted_perturbed": _non_twisted_perturbed,
    "custom_diagonal": _custom_diagonal,
}

CATALOG_NAMES = tuple(_BUILDERS)


def builtin_model(name: str, n: int | None = None, parameters: dict | None = None) -> MetricModel:
    """Instantiate a catalog model by name.

    Raises ``ValueError`` for unknown names or invalid parameters.
    """
    if name not in _BUILDERS:
        raise ValueError(f"unknown model {name!r}; catalog: {', '.join(CATALOG_NAMES)}")
    return _BUILDERS[name](n, dict(parameters or {}))


def default_model_specs() -> list[tuple[str, int, dict]]:
    """Model instances exercised by the default verification run."""
    return [
        ("minkowski", 4, {}),
        ("rw_flat", 4, {"f": "exp", "H": 0.3}),
        ("rw_flat", 5, {"f": "one_plus_t2"}),
        ("rw_flat", 6, {"f": "power", "k": 2.0}),
        ("grw_product_spheres", 5, {"r1": 1.0, "r2": 1.0, "H": 0.3}),
        ("twisted_n4", 4, {"alpha": 0.2, "beta": 0.1}),
        ("twisted_generic", 5, {"alpha": 0.2, "beta": 0.1, "eps": 0.05}),
        ("twisted_generic", 6, {"alpha": 0.2, "beta": 0.1, "eps": 0.05}),
        ("non_twisted_perturbed", 4, {"delta": 0.1}),
    ]
