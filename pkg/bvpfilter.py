"""
Boundary and Boundary-Condition Filter

Restricts the general symmetry operator k1 X1 + ... + k6 X6 of the heat
equation to the operators that leave the boundaries and boundary conditions
of an initial-boundary-value problem invariant. Every invariance requirement
is turned into exact linear relations over k1..k6; the admitted operators
are the rational null space of the stacked relations.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional, Sequence

from errors import UnsupportedCondition
from exprcore import (
    COORDINATES,
    SYMBOLS,
    ZERO,
    Expr,
    as_rational,
    coefficients,
    const,
    depends_on,
    is_zero,
    linear_form,
    substitute,
    symbol,
)
from liealg import (
    K_NAMES,
    VectorField,
    apply_to,
    describe_combination,
    linear_combination,
    prolong,
)

logger = logging.getLogger(__name__)

BoundaryKind = Literal["x_equals_0", "t_equals_0", "x_to_infinity"]
BCKind = Literal["dirichlet", "neumann_flux"]

_BOUNDARY_KINDS = ("x_equals_0", "t_equals_0", "x_to_infinity")
_BC_KINDS = ("dirichlet", "neumann_flux")
_SURFACE = {"x_equals_0": "x", "t_equals_0": "t"}
_FREE_SYMBOLS = tuple(name for name in SYMBOLS if name not in K_NAMES)

Row = tuple[Fraction, ...]

FAR_FIELD_NOTE = (
    "x -> infinity imposes no constraint on the operator; "
    "the far-field value is enforced when fitting integration constants"
)


@dataclass(frozen=True)
class BoundarySpec:
    kind: BoundaryKind

    def __post_init__(self):
        if self.kind not in _BOUNDARY_KINDS:
            raise UnsupportedCondition(f"unknown boundary {self.kind!r}")


@dataclass(frozen=True)
class BCSpec:
    """Boundary condition T = value (dirichlet) or -kcond T_x = value (neumann_flux)."""

    kind: BCKind
    location: BoundarySpec
    value: Expr

    def __post_init__(self):
        if self.kind not in _BC_KINDS:
            raise UnsupportedCondition(f"unknown boundary-condition kind {self.kind!r}")
        if self.kind == "neumann_flux" and self.location.kind != "x_equals_0":
            raise UnsupportedCondition("neumann_flux is only supported at x_equals_0")
        if depends_on(self.value, COORDINATES):
            raise UnsupportedCondition(f"boundary value {self.value} must be constant")


X_EQUALS_0 = BoundarySpec("x_equals_0")
T_EQUALS_0 = BoundarySpec("t_equals_0")
X_TO_INFINITY = BoundarySpec("x_to_infinity")


# ---------------------------------------------------------------------------
# Exact linear algebra over k1..k6
# ---------------------------------------------------------------------------

def _rref(rows: Sequence[Sequence[Fraction]], width: int = 6) -> tuple[Row, ...]:
    """Reduced row-echelon form with pivots taken in the order k1 < ... < k6."""
    m = [[Fraction(v) for v in row] for row in rows]
    pivot = 0
    for col in range(width):
        source = next((i for i in range(pivot, len(m)) if m[i][col] != 0), None)
        if source is None:
            continue
        m[pivot], m[source] = m[source], m[pivot]
        lead = m[pivot][col]
        m[pivot] = [v / lead for v in m[pivot]]
        for i in range(len(m)):
            if i != pivot and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [a - factor * b for a, b in zip(m[i], m[pivot])]
        pivot += 1
    return tuple(tuple(row) for row in m[:pivot])


@dataclass(frozen=True)
class LinearConstraints:
    """Linear relations sum_j row[j] * k_j = 0, stored in reduced row-echelon form."""

    rows: tuple[Row, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", _rref(self.rows))

    @property
    def rank(self) -> int:
        return len(self.rows)

    def merged(self, *others: "LinearConstraints") -> "LinearConstraints":
        stacked = list(self.rows)
        for other in others:
            stacked.extend(other.rows)
        return LinearConstraints(tuple(stacked))

    def pivots(self) -> list[int]:
        return [next(j for j, v in enumerate(row) if v != 0) for row in self.rows]

    def lines(self, grouped: bool = False) -> list[str]:
        """Printable relations; single-variable rows collapse to 'k1=k2=k4=0' when grouped."""
        if not self.rows:
            return []
        if grouped and len(self.rows) > 1 and all(sum(1 for v in r if v) == 1 for r in self.rows):
            names = [K_NAMES[p] for p in self.pivots()]
            return ["=".join(names) + "=0"]
        return [format_row(row) for row in self.rows]


def format_row(row: Row) -> str:
    """'k5=0', 'k3=k6' or a general 'k1 + 2*k3 = 0'."""
    nonzero = [(K_NAMES[j], v) for j, v in enumerate(row) if v]
    if len(nonzero) == 1:
        return f"{nonzero[0][0]}=0"
    if len(nonzero) == 2 and nonzero[0][1] == 1 and nonzero[1][1] == -1:
        return f"{nonzero[0][0]}={nonzero[1][0]}"
    text = ""
    for name, v in nonzero:
        magnitude = abs(v)
        term = name if magnitude == 1 else f"{magnitude}*{name}"
        if not text:
            text = f"-{term}" if v < 0 else term
        else:
            text += f" - {term}" if v < 0 else f" + {term}"
    return f"{text} = 0"


@dataclass(frozen=True)
class CoeffSubspace:
    """Admitted coefficient vectors over (k1..k6)."""

    basis: tuple[Row, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def operators(self) -> list[VectorField]:
        return [linear_combination(list(v)) for v in self.basis]

    def describe(self) -> list[str]:
        return [describe_combination(v) for v in self.basis]


def solve_constraints(cs: Sequence[LinearConstraints]) -> CoeffSubspace:
    """Null space of the stacked relations, each vector scaled to a leading 1."""
    stacked = LinearConstraints().merged(*cs)
    pivots = stacked.pivots()
    free = [j for j in range(len(K_NAMES)) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * len(K_NAMES)
        v[f] = Fraction(1)
        for row, p in zip(stacked.rows, pivots):
            v[p] = -row[f]
        lead = next(c for c in v if c != 0)
        basis.append(tuple(c / lead for c in v))
    return CoeffSubspace(tuple(basis))


def restrict_operator(prior: Optional[LinearConstraints] = None) -> VectorField:
    """General operator with each pivot k eliminated through the prior relations."""
    X = linear_combination()
    if prior is None or not prior.rows:
        return X
    bindings = []
    for row, p in zip(prior.rows, prior.pivots()):
        value = ZERO
        for j, v in enumerate(row):
            if j != p and v:
                value = value - v * symbol(K_NAMES[j])
        bindings.append((K_NAMES[p], value))
    return VectorField(*(substitute(c, bindings) for c in (X.xi, X.tau, X.phi)))


def _constraints_from(residual: Expr) -> LinearConstraints:
    """Require the residual to vanish identically in every symbol except k1..k6."""
    rows = []
    for cofactor in coefficients(residual, _FREE_SYMBOLS).values():
        coeffs, constant = linear_form(cofactor, K_NAMES)
        if not is_zero(constant):
            raise ValueError(f"residual term {constant} does not depend on k1..k6")
        rows.append(tuple(as_rational(c) for c in coeffs))
    return LinearConstraints(tuple(rows))


# ---------------------------------------------------------------------------
# Invariance residuals
# ---------------------------------------------------------------------------

def boundary_residual(X: VectorField, b: BoundarySpec) -> Expr:
    """[X(x - 0)] at x = 0 or [X(t - 0)] at t = 0."""
    if b.kind == "x_to_infinity":
        logger.info(FAR_FIELD_NOTE)
        return ZERO
    surface = _SURFACE[b.kind]
    return substitute(X.act(symbol(surface)), [(surface, 0)])


def bc_residual(X: VectorField, bc: BCSpec) -> Expr:
    """Invariance residual of a boundary condition on its boundary and manifold."""
    if bc.location.kind == "x_to_infinity":
        logger.info(FAR_FIELD_NOTE)
        return ZERO
    surface = _SURFACE[bc.location.kind]
    if bc.kind == "dirichlet":
        return substitute(X.act(symbol("T") - bc.value), [(surface, 0), ("T", bc.value)])
    kcond = symbol("kcond")
    condition = kcond * symbol("T_x") + bc.value
    image = apply_to(prolong(X, 1), condition)
    return substitute(image, [("x", 0), ("T_x", -bc.value * symbol("kcond_inv"))])


def boundary_constraints(b: BoundarySpec) -> LinearConstraints:
    """Relations on k1..k6 for invariance of a boundary."""
    return _constraints_from(boundary_residual(linear_combination(), b))


def _default_prior() -> LinearConstraints:
    return boundary_constraints(X_EQUALS_0).merged(boundary_constraints(T_EQUALS_0))


def bc_constraints(bc: BCSpec, prior: Optional[LinearConstraints] = None) -> LinearConstraints:
    """Relations on k1..k6 for invariance of a boundary condition.

    The condition is imposed on the operator restricted by `prior`. A flux
    condition always needs the boundary restriction first, so it defaults to
    the x = 0 and t = 0 boundary relations.
    """
    if bc.kind == "neumann_flux" and prior is None:
        prior = _default_prior()
    return _constraints_from(bc_residual(restrict_operator(prior), bc))


def flux_condition(prior: Optional[LinearConstraints] = None) -> Expr:
    """Prolonged flux condition at x = 0 before the manifold substitution, per unit conductivity."""
    if prior is None:
        prior = _default_prior()
    X = restrict_operator(prior)
    condition = symbol("kcond") * symbol("T_x") + symbol("q0pp")
    image = apply_to(prolong(X, 1), condition) * symbol("kcond_inv")
    return substitute(image, [("x", 0)])


# ---------------------------------------------------------------------------
# Problem catalogue
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    name: str
    title: str
    boundaries: tuple[BoundarySpec, ...]
    conditions: tuple[BCSpec, ...]


PROBLEMS: dict[str, ProblemSpec] = {
    "ibvp1": ProblemSpec(
        name="ibvp1",
        title="semi-infinite solid, constant surface temperature",
        boundaries=(X_EQUALS_0, T_EQUALS_0, X_TO_INFINITY),
        conditions=(
            BCSpec("dirichlet", T_EQUALS_0, symbol("T_i")),
            BCSpec("dirichlet", X_EQUALS_0, symbol("T_s")),
            BCSpec("dirichlet", X_TO_INFINITY, symbol("T_i")),
        ),
    ),
    "ibvp2": ProblemSpec(
        name="ibvp2",
        title="semi-infinite solid, constant surface heat flux",
        boundaries=(X_EQUALS_0, T_EQUALS_0, X_TO_INFINITY),
        conditions=(
            BCSpec("dirichlet", T_EQUALS_0, const(0)),
            BCSpec("neumann_flux", X_EQUALS_0, symbol("q0pp")),
            BCSpec("dirichlet", X_TO_INFINITY, const(0)),
        ),
    ),
}


def get_problem(name: str) -> ProblemSpec:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; expected one of {', '.join(PROBLEMS)}") from None


@dataclass(frozen=True)
class FilterResult:
    problem: ProblemSpec
    boundary: LinearConstraints
    conditions: LinearConstraints
    subspace: CoeffSubspace
    notes: tuple[str, ...] = field(default=())

    @property
    def combined(self) -> LinearConstraints:
        return self.boundary.merged(self.conditions)


def filter_problem(name: str) -> FilterResult:
    """Boundaries first, then boundary conditions on the restricted operator."""
    spec = get_problem(name)
    notes = []
    boundary = LinearConstraints()
    for b in spec.boundaries:
        if b.kind == "x_to_infinity":
            notes.append(FAR_FIELD_NOTE)
        boundary = boundary.merged(boundary_constraints(b))
    conditions = LinearConstraints()
    for bc in spec.conditions:
        found = bc_constraints(bc, prior=boundary)
        if not found.rows and bc.location.kind != "x_to_infinity":
            notes.append(f"{bc.kind} T={bc.value} on {bc.location.kind} imposes no restriction")
        conditions = conditions.merged(found)
    subspace = solve_constraints([boundary, conditions])
    logger.debug("%s admitted operators: %s", name, subspace.describe())
    return FilterResult(spec, boundary, conditions, subspace, tuple(dict.fromkeys(notes)))


def residual_expressions(X: VectorField, spec: ProblemSpec) -> list[Expr]:
    """Invariance residuals of a concrete operator; all vanish for admitted operators."""
    residuals = [boundary_residual(X, b) for b in spec.boundaries]
    residuals.extend(bc_residual(X, bc) for bc in spec.conditions)
    return residuals
