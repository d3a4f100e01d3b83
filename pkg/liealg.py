"""
Lie Algebra of the Heat Equation

Vector fields X = xi d/dx + tau d/dt + phi d/dT on (x, t, T), their first and
second prolongations, commutators, and the exact invariance check of the
heat equation T_t = alpha T_xx.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from errors import JetOverflow, UncoveredJetCoordinate
from exprcore import (
    JET_COORDINATES,
    ONE,
    ZERO,
    Expr,
    Scalar,
    coefficients,
    const,
    depends_on,
    differentiate,
    free_symbols,
    is_unit,
    is_zero,
    linear_form,
    parse_expr,
    substitute,
    symbol,
    to_text,
    total_derivative,
    unit_inverse,
)

logger = logging.getLogger(__name__)

K_NAMES: tuple[str, ...] = ("k1", "k2", "k3", "k4", "k5", "k6")
GENERATOR_IDS: tuple[str, ...] = ("X1", "X2", "X3", "X4", "X5", "X6")

HEAT_EQUATION = parse_expr("T_t - alpha*T_xx")

_x, _t, _T = symbol("x"), symbol("t"), symbol("T")
_T_x, _T_t, _T_xx, _T_xt = symbol("T_x"), symbol("T_t"), symbol("T_xx"), symbol("T_xt")


@dataclass(frozen=True)
class VectorField:
    """Infinitesimal generator with coefficients depending on x, t, T only."""

    xi: Expr
    tau: Expr
    phi: Expr

    def __post_init__(self):
        for name in ("xi", "tau", "phi"):
            if depends_on(getattr(self, name), JET_COORDINATES):
                raise ValueError(f"{name} = {getattr(self, name)} depends on derivative coordinates")

    def act(self, f: Expr) -> Expr:
        """Apply X as a derivation to a function of (x, t, T)."""
        return (
            self.xi * differentiate(f, "x")
            + self.tau * differentiate(f, "t")
            + self.phi * differentiate(f, "T")
        )

    def scaled(self, c: Union[Expr, Scalar]) -> "VectorField":
        return VectorField(self.xi * c, self.tau * c, self.phi * c)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.xi + other.xi, self.tau + other.tau, self.phi + other.phi)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.xi - other.xi, self.tau - other.tau, self.phi - other.phi)

    def is_zero(self) -> bool:
        return is_zero(self.xi) and is_zero(self.tau) and is_zero(self.phi)

    def __str__(self) -> str:
        parts = []
        for comp, axis in ((self.xi, "x"), (self.tau, "t"), (self.phi, "T")):
            if is_zero(comp):
                continue
            text = to_text(comp)
            if len(comp.terms) > 1:
                text = f"({text})"
            parts.append(f"{text}*d/d{axis}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class ProlongedField:
    """Prolongation of a VectorField; phi_xx is None at order 1."""

    base: VectorField
    order: int
    phi_x: Expr
    phi_t: Expr
    phi_xx: Optional[Expr] = None


def _generators() -> dict[str, VectorField]:
    a = symbol("alpha_inv")
    alpha = symbol("alpha")
    return {
        "X1": VectorField(ZERO, ONE, ZERO),
        "X2": VectorField(ONE, ZERO, ZERO),
        "X3": VectorField(_x, 2 * _t, ZERO),
        "X4": VectorField(2 * _t, ZERO, -a * _x * _T),
        "X5": VectorField(4 * _x * _t, 4 * _t ** 2, -a * (_x ** 2 + 2 * alpha * _t) * _T),
        "X6": VectorField(ZERO, ZERO, _T),
    }


_GENERATORS = _generators()


def named_generator(gen_id: str) -> VectorField:
    """One of the six finite generators X1..X6 of the heat-equation algebra."""
    try:
        return _GENERATORS[gen_id]
    except KeyError:
        raise ValueError(f"unknown generator {gen_id!r}; expected one of {', '.join(GENERATOR_IDS)}") from None


def inf_generator(f: Expr) -> VectorField:
    """The infinite-dimensional part f(x, t) d/dT."""
    if depends_on(f, {"T"} | JET_COORDINATES):
        raise ValueError(f"f = {f} must depend on x and t only")
    return VectorField(ZERO, ZERO, f)


def linear_combination(coeffs: Optional[Sequence[Union[Expr, Scalar, str]]] = None) -> VectorField:
    """k1 X1 + ... + k6 X6; symbolic k1..k6 when coeffs is omitted."""
    if coeffs is None:
        coeffs = K_NAMES
    if len(coeffs) != 6:
        raise ValueError(f"expected 6 coefficients, got {len(coeffs)}")
    total = VectorField(ZERO, ZERO, ZERO)
    for gen_id, c in zip(GENERATOR_IDS, coeffs):
        weight = symbol(c) if isinstance(c, str) else c
        total = total + _GENERATORS[gen_id].scaled(weight)
    return total


def prolong(X: VectorField, order: int = 2) -> ProlongedField:
    """First or second prolongation using the total-derivative formulas."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    Dx_xi, Dx_tau = total_derivative(X.xi, "x"), total_derivative(X.tau, "x")
    phi_x = total_derivative(X.phi, "x") - _T_x * Dx_xi - _T_t * Dx_tau
    phi_t = (
        total_derivative(X.phi, "t")
        - _T_x * total_derivative(X.xi, "t")
        - _T_t * total_derivative(X.tau, "t")
    )
    phi_xx = None
    if order == 2:
        phi_xx = total_derivative(phi_x, "x") - _T_xx * Dx_xi - _T_xt * Dx_tau
    return ProlongedField(X, order, phi_x, phi_t, phi_xx)


def apply_to(P: ProlongedField, F: Expr) -> Expr:
    """Action of the prolonged field on a differential function F."""
    covered = {"T_x", "T_t"} | ({"T_xx"} if P.order == 2 else set())
    extra = free_symbols(F) & (JET_COORDINATES - covered)
    if extra:
        raise UncoveredJetCoordinate(
            f"{F} depends on {', '.join(sorted(extra))}, not covered at order {P.order}"
        )
    result = P.base.act(F)
    result = result + P.phi_x * differentiate(F, "T_x") + P.phi_t * differentiate(F, "T_t")
    if P.phi_xx is not None:
        result = result + P.phi_xx * differentiate(F, "T_xx")
    return result


def on_manifold(e: Expr) -> Expr:
    """Restrict to T_t = alpha T_xx together with its consequence T_xt = alpha T_xxx."""
    alpha = symbol("alpha")
    return substitute(e, [("T_t", alpha * _T_xx), ("T_xt", alpha * symbol("T_xxx"))])


def symmetry_residual(X: VectorField) -> Expr:
    """On-manifold image of the heat equation under the second prolongation."""
    return on_manifold(apply_to(prolong(X, 2), HEAT_EQUATION))


def is_symmetry(X: VectorField) -> bool:
    """Exact invariance test of the heat equation under X."""
    try:
        return is_zero(symmetry_residual(X))
    except JetOverflow as exc:
        logger.warning("symmetry check of %s failed: %s", X, exc)
        return False


def commutator(X: VectorField, Y: VectorField) -> VectorField:
    """Lie bracket [X, Y]."""
    return VectorField(
        X.act(Y.xi) - Y.act(X.xi),
        X.act(Y.tau) - Y.act(X.tau),
        X.act(Y.phi) - Y.act(X.phi),
    )


@dataclass(frozen=True)
class AlgebraExpansion:
    """Y = sum c_i X_i + f d/dT + residual."""

    coefficients: tuple[Expr, ...]
    f: Expr
    residual: VectorField

    @property
    def in_algebra(self) -> bool:
        return self.residual.is_zero() and is_symmetry(inf_generator(self.f))


def _solve_unit_pivot(rows: list[list[Expr]], n: int) -> list[Expr]:
    """Gauss-Jordan over Q[alpha, 1/alpha] with unit pivots; rows read a.k + b = 0."""
    rows = [list(r) for r in rows]
    pivot_row: dict[int, int] = {}
    r = 0
    for col in range(n):
        candidates = [i for i in range(r, len(rows)) if not is_zero(rows[i][col])]
        if not candidates:
            continue
        pick = next((i for i in candidates if is_unit(rows[i][col])), None)
        if pick is None:
            raise ValueError(f"no invertible pivot for unknown {K_NAMES[col]}")
        rows[r], rows[pick] = rows[pick], rows[r]
        inv = unit_inverse(rows[r][col])
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and not is_zero(rows[i][col]):
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivot_row[col] = r
        r += 1
    return [-rows[pivot_row[c]][n] if c in pivot_row else ZERO for c in range(n)]


def expand_in_algebra(Y: VectorField) -> AlgebraExpansion:
    """Decompose Y over X1..X6 plus an X_inf part, exactly."""
    R = Y - linear_combination()
    equations = []
    for comp in (R.xi, R.tau):
        equations.extend(coefficients(comp, ("x", "t", "T")).values())
    for key, cofactor in coefficients(R.phi, ("x", "t", "T")).items():
        if key[2] > 0:
            equations.append(cofactor)
    rows = []
    for eq in equations:
        coeffs, constant = linear_form(eq, K_NAMES)
        rows.append(coeffs + [constant])
    solution = _solve_unit_pivot(rows, len(K_NAMES))

    remainder = Y - linear_combination(solution)
    f = coefficients(remainder.phi, ("T",)).get((0,), ZERO)
    residual = VectorField(remainder.xi, remainder.tau, remainder.phi - f)
    return AlgebraExpansion(tuple(solution), f, residual)


def optimal_system(c: Scalar = 1) -> dict[str, VectorField]:
    """Representatives of the one-dimensional subalgebras (documentation aid)."""
    g = _GENERATORS
    c = const(c)
    return {
        "X2": g["X2"],
        "X6": g["X6"],
        "X1+cX6": g["X1"] + g["X6"].scaled(c),
        "X1+X4": g["X1"] + g["X4"],
        "X1-X4": g["X1"] - g["X4"],
        "X1+X5+cX6": g["X1"] + g["X5"] + g["X6"].scaled(c),
        "X3+cX6": g["X3"] + g["X6"].scaled(c),
    }


def describe_combination(coeffs: Sequence[Scalar]) -> str:
    """Readable name such as 'X3 + X6' for a rational coefficient vector."""
    parts = []
    for gen_id, c in zip(GENERATOR_IDS, coeffs):
        if c == 0:
            continue
        magnitude = abs(c)
        label = gen_id if magnitude == 1 else f"{magnitude}*{gen_id}"
        if not parts:
            parts.append(f"-{label}" if c < 0 else label)
        else:
            parts.append(f" - {label}" if c < 0 else f" + {label}")
    return "".join(parts) if parts else "0"
