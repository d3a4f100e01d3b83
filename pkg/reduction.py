"""
Similarity Reduction

Turns an admitted scaling operator a(x d/dx + 2t d/dt) + m T d/dT into the
similarity chart T = x^n V(xi), xi = x^2/t, reduces the heat equation to a
linear ODE in xi, integrates that ODE in closed form for n in {0, 1} and
fits the two integration constants to the problem's conditions.

Fractional powers of xi never enter the polynomial engine; the reduction
works on Laurent terms x^a t^b V^(d) and the quadrature on half-integer
kernels xi^p exp(-lambda xi / alpha).
"""

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Literal, Mapping, Optional, Sequence, Union

import numpy as np

from analytic import ThermalConfig, erf
from bvpfilter import PROBLEMS, filter_problem
from errors import FitFailure, NonphysicalParams, NotScaling, ReductionFailure, UnsupportedExponent
from exprcore import evaluate, is_zero, symbol
from liealg import K_NAMES, describe_combination, linear_combination

logger = logging.getLogger(__name__)

Shape = Literal["unit", "erf", "gauss"]

# (x power, t power, derivative order of V, alpha power) -> coefficient
LaurentTerms = dict[tuple[int, int, int, int], Fraction]


# ---------------------------------------------------------------------------
# Similarity chart
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimilarityChart:
    """T = x^n V(xi) with xi = x^2 / t, invariant under the source operator."""

    n: int
    source: tuple[Fraction, ...]
    xi_def: str = "x^2/t"

    @property
    def v_def(self) -> str:
        if self.n == 0:
            return "T"
        return "T/x" if self.n == 1 else f"T/x^{self.n}"

    def __str__(self) -> str:
        return f"xi = {self.xi_def}, V(xi) = {self.v_def}  [{describe_combination(self.source)}]"


def similarity_chart(v: Sequence[Union[int, Fraction]]) -> SimilarityChart:
    """Chart for a scaling operator given by its coefficients over X1..X6."""
    if len(v) != len(K_NAMES):
        raise ValueError(f"expected {len(K_NAMES)} coefficients, got {len(v)}")
    v = tuple(Fraction(c) for c in v)
    for j in (0, 1, 3, 4):
        if v[j] != 0:
            raise NotScaling(f"{K_NAMES[j]} = {v[j]} must vanish for a scaling operator")
    k3, k6 = v[2], v[5]
    if k3 == 0:
        raise NotScaling("k3 = 0: the operator does not scale x and t")
    ratio = k6 / k3
    if ratio.denominator != 1 or ratio < 0:
        raise NotScaling(f"k6/k3 = {ratio} is not a nonnegative integer")
    n = int(ratio)

    # xi and V must be invariants: X(x^2) t - x^2 X(t) = 0 and X(T) x^n - T X(x^n) = 0.
    X = linear_combination(list(v))
    x, t, T = symbol("x"), symbol("t"), symbol("T")
    xn = x ** n
    if not is_zero(X.act(x ** 2) * t - x ** 2 * X.act(t)):
        raise ReductionFailure(f"x^2/t is not invariant under {describe_combination(v)}")
    if not is_zero(X.act(T) * xn - T * X.act(xn)):
        raise ReductionFailure(f"T/x^{n} is not invariant under {describe_combination(v)}")
    return SimilarityChart(n=n, source=v)


# ---------------------------------------------------------------------------
# Reduced ODE
# ---------------------------------------------------------------------------

def _format_factor(coeff: Fraction, factors: list[str]) -> str:
    magnitude = abs(coeff)
    if not factors:
        return str(magnitude)
    if magnitude == 1:
        return "*".join(factors)
    return "*".join([str(magnitude)] + factors)


@dataclass(frozen=True)
class XiPolynomial:
    """Sum of c * xi^i * alpha^j; negative alpha powers print as alpha_inv."""

    terms: tuple[tuple[int, int, Fraction], ...] = ()

    @classmethod
    def from_dict(cls, coeffs: Mapping[tuple[int, int], Fraction]) -> "XiPolynomial":
        items = sorted((i, j, Fraction(c)) for (i, j), c in coeffs.items() if c)
        return cls(tuple(items))

    def coefficient(self, xi_power: int, alpha_power: int = 0) -> Fraction:
        for i, j, c in self.terms:
            if (i, j) == (xi_power, alpha_power):
                return c
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, xi: float, alpha: float) -> float:
        return sum(float(c) * xi ** i * alpha ** j for i, j, c in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        text = ""
        for i, j, c in self.terms:
            factors = []
            if j:
                name = "alpha" if j > 0 else "alpha_inv"
                factors.append(name if abs(j) == 1 else f"{name}^{abs(j)}")
            if i:
                factors.append("xi" if i == 1 else f"xi^{i}")
            body = _format_factor(c, factors)
            if not text:
                text = f"-{body}" if c < 0 else body
            else:
                text += f" - {body}" if c < 0 else f" + {body}"
        return text


@dataclass(frozen=True)
class ReducedODE:
    """A(xi) V'' + B(xi) V' + C(xi) V = 0 with integer coefficients."""

    A: XiPolynomial
    B: XiPolynomial
    C: XiPolynomial = XiPolynomial()

    def residual(self, xi: float, alpha: float, v: float, dv: float, d2v: float) -> float:
        return self.A(xi, alpha) * d2v + self.B(xi, alpha) * dv + self.C(xi, alpha) * v

    def __str__(self) -> str:
        parts = []
        for poly, deriv in ((self.A, "V''"), (self.B, "V'"), (self.C, "V")):
            if poly.is_zero():
                continue
            if len(poly.terms) == 1:
                i, j, c = poly.terms[0]
                if (i, j, abs(c)) == (0, 0, 1):
                    body = deriv
                else:
                    body = f"{str(XiPolynomial(((i, j, abs(c)),)))}*{deriv}"
                negative = c < 0
            else:
                body = f"({poly})*{deriv}"
                negative = False
            if not parts:
                parts.append(f"-{body}" if negative else body)
            else:
                parts.append(f" - {body}" if negative else f" + {body}")
        return "".join(parts) + " = 0"


def _add(terms: LaurentTerms, key: tuple[int, int, int, int], value: Fraction) -> None:
    if value:
        terms[key] = terms.get(key, Fraction(0)) + value
        if not terms[key]:
            del terms[key]


def _d_dx(terms: LaurentTerms) -> LaurentTerms:
    """d/dx of x^a t^b V^(d)(x^2/t) = a x^(a-1) t^b V^(d) + 2 x^(a+1) t^(b-1) V^(d+1)."""
    out: LaurentTerms = {}
    for (a, b, d, p), c in terms.items():
        _add(out, (a - 1, b, d, p), a * c)
        _add(out, (a + 1, b - 1, d + 1, p), 2 * c)
    return out


def _d_dt(terms: LaurentTerms) -> LaurentTerms:
    """d/dt of x^a t^b V^(d)(x^2/t) = b x^a t^(b-1) V^(d) - x^(a+2) t^(b-2) V^(d+1)."""
    out: LaurentTerms = {}
    for (a, b, d, p), c in terms.items():
        _add(out, (a, b - 1, d, p), b * c)
        _add(out, (a + 2, b - 2, d + 1, p), -c)
    return out


def reduce_pde(chart: SimilarityChart) -> ReducedODE:
    """Substitute T = x^n V(x^2/t) into T_t - alpha T_xx and read off the ODE in xi."""
    n = chart.n
    T: LaurentTerms = {(n, 0, 0, 0): Fraction(1)}
    residual = _d_dt(T)
    for (a, b, d, p), c in _d_dx(_d_dx(T)).items():
        _add(residual, (a, b, d, p + 1), -c)
    if not residual:
        raise ReductionFailure("heat-equation residual vanished identically")

    # x^a t^b = x^(n-2) xi^(-b) exactly when a + 2b = n - 2.
    collected: dict[tuple[int, int, int], Fraction] = {}
    for (a, b, d, p), c in residual.items():
        if a + 2 * b != n - 2:
            raise ReductionFailure(f"term x^{a} t^{b} V^({d}) does not factor through xi = x^2/t")
        collected[(d, -b, p)] = collected.get((d, -b, p), Fraction(0)) + c
    collected = {key: c for key, c in collected.items() if c}

    top = max(d for d, _, _ in collected)
    if top != 2:
        raise ReductionFailure("reduced equation is not of second order")
    alpha_powers = {p for d, _, p in collected if d == 2}
    if len(alpha_powers) != 1:
        raise ReductionFailure("leading coefficient mixes powers of alpha")
    shift_alpha = alpha_powers.pop()
    shift_xi = min(i for _, i, _ in collected)

    normalized = {(d, i - shift_xi, p - shift_alpha): c for (d, i, p), c in collected.items()}
    scale = math.lcm(*(c.denominator for c in normalized.values()))
    integers = {key: c * scale for key, c in normalized.items()}
    divisor = math.gcd(*(int(c) for c in integers.values()))
    leading = max((i, c) for (d, i, _), c in integers.items() if d == 2)[1]
    if leading < 0:
        divisor = -divisor
    integers = {key: c / divisor for key, c in integers.items()}

    polys = {
        d: XiPolynomial.from_dict({(i, p): c for (dd, i, p), c in integers.items() if dd == d})
        for d in (2, 1, 0)
    }
    ode = ReducedODE(polys[2], polys[1], polys[0])
    logger.debug("n=%d reduced ODE: %s", n, ode)
    return ode


# ---------------------------------------------------------------------------
# Closed form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedFormTerm:
    """constant * factor * alpha^(alpha_half/2) * pi^(pi_half/2) * xi^(xi_half/2) * shape.

    shape is 1, erf(s x / sqrt(alpha t)) or exp(-s^2 x^2 / (alpha t)), with s
    the owning ClosedForm's sqrt_rate.
    """

    constant: Literal["c1", "c2"]
    factor: Fraction
    alpha_half: int = 0
    pi_half: int = 0
    xi_half: int = 0
    shape: Shape = "unit"


def _half_power(name: str, halves: int) -> Optional[str]:
    if halves == 0:
        return None
    if halves == 1:
        return f"sqrt({name})"
    if halves % 2 == 0:
        power = halves // 2
        return name if power == 1 else f"{name}^{power}" if power > 0 else f"{name}^({power})"
    return f"{name}^({halves}/2)"


@dataclass(frozen=True)
class ClosedForm:
    """T(x, t) = x^n (c1 * I(xi) + c2) with I the resolved quadrature of V'."""

    n: int
    sqrt_rate: Fraction
    terms: tuple[ClosedFormTerm, ...]
    formula_id: str
    c1: Optional[float] = None
    c2: Optional[float] = None

    @property
    def fitted(self) -> bool:
        return self.c1 is not None and self.c2 is not None

    def powers(self, term: ClosedFormTerm) -> tuple[int, Fraction]:
        """Exponents of x and t carried by a term once multiplied by x^n."""
        return self.n + term.xi_half, Fraction(-term.xi_half, 2)

    def magnitude(self, term: ClosedFormTerm, alpha: float) -> float:
        """factor * alpha^(alpha_half/2) * pi^(pi_half/2)."""
        return float(term.factor) * alpha ** (term.alpha_half / 2) * math.pi ** (term.pi_half / 2)

    def evaluate(self, x: float, t: float, alpha: float,
                 c1: Optional[float] = None, c2: Optional[float] = None) -> float:
        """Numerical value; c1 and c2 default to the fitted constants."""
        constants = {"c1": self.c1 if c1 is None else c1, "c2": self.c2 if c2 is None else c2}
        if constants["c1"] is None or constants["c2"] is None:
            raise FitFailure("integration constants have not been fitted")
        s = float(self.sqrt_rate)
        z = s * x / math.sqrt(alpha * t)
        shapes = {"unit": 1.0, "erf": erf(z), "gauss": math.exp(-z * z)}
        total = 0.0
        for term in self.terms:
            x_power, t_power = self.powers(term)
            value = constants[term.constant] * self.magnitude(term, alpha) * shapes[term.shape]
            total += value * (x ** x_power if x_power else 1.0) * t ** float(t_power)
        return total

    def _shape_text(self, shape: Shape) -> Optional[str]:
        s = self.sqrt_rate
        if shape == "unit":
            return None
        if shape == "erf":
            if s.numerator == 1:
                inner = f"x/({s.denominator}*sqrt(alpha*t))" if s.denominator != 1 else "x/sqrt(alpha*t)"
            else:
                inner = f"{s}*x/sqrt(alpha*t)"
            return f"erf({inner})"
        rate = s * s
        if rate.numerator == 1:
            return f"exp(-x^2/({rate.denominator}*alpha*t))"
        return f"exp(-{rate}*x^2/(alpha*t))"

    def __str__(self) -> str:
        text = ""
        for term in self.terms:
            x_power, t_power = self.powers(term)
            value = getattr(self, term.constant)
            if value is None:
                coeff, factors = term.factor, [term.constant]
            else:
                product = float(term.factor) * value
                coeff, factors = Fraction(1 if product >= 0 else -1), [f"{abs(product):.12g}"]
            factors += [f for f in (
                _half_power("pi", term.pi_half),
                _half_power("alpha", term.alpha_half),
                None if x_power == 0 else ("x" if x_power == 1 else f"x^{x_power}"),
                _half_power("t", int(2 * t_power)),
                self._shape_text(term.shape),
            ) if f]
            body = _format_factor(coeff, factors)
            if not text:
                text = f"-{body}" if coeff < 0 else body
            else:
                text += f" - {body}" if coeff < 0 else f" + {body}"
        return f"T = {text}"


def _rational_sqrt(value: Fraction) -> Fraction:
    num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if num * num != value.numerator or den * den != value.denominator:
        raise UnsupportedExponent(f"decay rate {value} is not the square of a rational")
    return Fraction(num, den)


def _kernel_integral(p: Fraction, rate: Fraction, s: Fraction) -> list[tuple[Fraction, int, int, int, Shape]]:
    """Antiderivative of xi^p exp(-rate xi / alpha) for p in {-1/2, -3/2, -5/2, ...}.

    Entries are (factor, alpha_half, pi_half, xi_half, shape).
    """
    if p == Fraction(-1, 2):
        # sqrt(pi alpha / rate) erf(sqrt(rate xi / alpha))
        return [(1 / s, 1, 1, 0, "erf")]
    if p < Fraction(-1, 2) and (p + Fraction(1, 2)).denominator == 1:
        # Integration by parts: I(p) = xi^(p+1) E / (p+1) + rate / (alpha (p+1)) I(p+1)
        q = p + 1
        head = (1 / q, 0, 0, int(2 * q), "gauss")
        tail = [
            (f * rate / q, ah - 2, ph, xh, shape)
            for f, ah, ph, xh, shape in _kernel_integral(q, rate, s)
        ]
        return [head] + tail
    raise UnsupportedExponent(f"no closed-form kernel for xi^({p}) exp(-xi/alpha)")


_FORMULA_IDS = {0: "ibvp1_erf", 1: "ibvp2_flux"}


def integrate_reduced(ode: ReducedODE, n: int) -> ClosedForm:
    """Integrate a xi V'' + (b0 + b1 xi / alpha) V' = 0 twice.

    V' = xi^(-b0/a) exp(-(b1/a) xi / alpha) is resolved against the erf
    kernel; the result carries symbolic constants c1, c2.
    """
    if n not in _FORMULA_IDS:
        raise UnsupportedExponent(f"closed forms exist for n in {{0, 1}}, got n = {n}")
    if not ode.C.is_zero():
        raise ReductionFailure(f"ODE {ode} has a V term")
    a = ode.A.coefficient(1)
    if a == 0 or len(ode.A.terms) != 1:
        raise ReductionFailure(f"leading coefficient {ode.A} is not a multiple of xi")
    b0, b1 = ode.B.coefficient(0), ode.B.coefficient(1, -1)
    if len(ode.B.terms) != (b0 != 0) + (b1 != 0) or b1 == 0:
        raise ReductionFailure(f"first-order coefficient {ode.B} is not of the form b0 + b1 xi/alpha")

    p, rate = -b0 / a, b1 / a
    if rate <= 0:
        raise UnsupportedExponent(f"kernel grows like exp({-rate} xi/alpha)")
    s = _rational_sqrt(rate)
    terms = [
        ClosedFormTerm("c1", f, ah, ph, xh, shape)
        for f, ah, ph, xh, shape in _kernel_integral(p, rate, s)
    ]
    terms.append(ClosedFormTerm("c2", Fraction(1)))
    return ClosedForm(n=n, sqrt_rate=s, terms=tuple(terms), formula_id=_FORMULA_IDS[n])


# ---------------------------------------------------------------------------
# Constant fitting
# ---------------------------------------------------------------------------

_PARAM_KEYS = ("alpha", "kcond", "T_i", "T_s", "q0pp")


def _param_values(params: Union[ThermalConfig, Mapping[str, float]]) -> dict[str, float]:
    if isinstance(params, ThermalConfig):
        values = {key: getattr(params, key) for key in _PARAM_KEYS}
    else:
        values = {key: float(params[key]) for key in _PARAM_KEYS if key in params}
    for key in ("alpha", "kcond"):
        if key in values and not values[key] > 0:
            raise NonphysicalParams(f"{key} = {values[key]} must be positive")
    return values


class _Equations:
    """Rows r . (c1, c2) = rhs, one per power of t that must balance."""

    def __init__(self):
        self.rows: list[tuple[float, float]] = []
        self.rhs: list[float] = []

    def add(self, groups: dict, targets: Mapping) -> None:
        for key in set(groups) | set(targets):
            c1, c2 = groups.get(key, (0.0, 0.0))
            self.rows.append((c1, c2))
            self.rhs.append(float(targets.get(key, 0.0)))


def _accumulate(groups: dict, key, term: ClosedFormTerm, value: float) -> None:
    c1, c2 = groups.get(key, (0.0, 0.0))
    groups[key] = (c1 + value, c2) if term.constant == "c1" else (c1, c2 + value)


def _surface_value(cf: ClosedForm, alpha: float) -> dict:
    """Coefficients of T(0, t), grouped by the power of t."""
    groups: dict = {}
    for term in cf.terms:
        x_power, t_power = cf.powers(term)
        if x_power < 0:
            raise FitFailure("closed form is singular at x = 0")
        if x_power == 0 and term.shape != "erf":
            _accumulate(groups, t_power, term, cf.magnitude(term, alpha))
    return groups


def _surface_gradient(cf: ClosedForm, alpha: float) -> dict:
    """Coefficients of dT/dx at x = 0, grouped by the power of t."""
    groups: dict = {}
    s = float(cf.sqrt_rate)
    for term in cf.terms:
        x_power, t_power = cf.powers(term)
        m = cf.magnitude(term, alpha)
        if x_power == 1 and term.shape != "erf":
            _accumulate(groups, t_power, term, m)
        elif x_power == 0 and term.shape == "erf":
            # d/dx erf(s x / sqrt(alpha t)) = 2 s / sqrt(pi alpha t) at x = 0
            _accumulate(groups, t_power - Fraction(1, 2), term, m * 2 * s / math.sqrt(math.pi * alpha))
    return groups


def _far_field(cf: ClosedForm, alpha: float) -> dict:
    """Coefficients of the non-decaying part as x -> infinity, grouped by (x power, t power)."""
    groups: dict = {}
    for term in cf.terms:
        if term.shape == "gauss":
            continue
        _accumulate(groups, cf.powers(term), term, cf.magnitude(term, alpha))
    return groups


def fit_constants(cf: ClosedForm, problem: str,
                  params: Union[ThermalConfig, Mapping[str, float]]) -> ClosedForm:
    """Determine c1, c2 from the surface and far-field conditions of a problem.

    For similarity solutions the initial condition at t = 0 coincides with the
    far-field limit, so it contributes the same equations.
    """
    values = _param_values(params)
    if "alpha" not in values:
        raise NonphysicalParams("alpha is required to fit integration constants")
    alpha = values["alpha"]
    try:
        spec = PROBLEMS[problem]
    except KeyError:
        raise ValueError(f"unknown problem {problem!r}") from None

    equations = _Equations()
    for bc in spec.conditions:
        target = evaluate(bc.value, values)
        if bc.location.kind == "x_equals_0" and bc.kind == "dirichlet":
            equations.add(_surface_value(cf, alpha), {Fraction(0): target})
        elif bc.location.kind == "x_equals_0":
            if "kcond" not in values:
                raise NonphysicalParams("kcond is required for a flux condition")
            equations.add(_surface_gradient(cf, alpha), {Fraction(0): -target / values["kcond"]})
        else:
            equations.add(_far_field(cf, alpha), {(0, Fraction(0)): target})

    A = np.array(equations.rows, dtype=float)
    b = np.array(equations.rhs, dtype=float)
    if np.linalg.matrix_rank(A) < 2:
        raise FitFailure(f"conditions of {problem} do not determine both constants")
    solution, *_ = np.linalg.lstsq(A, b, rcond=None)
    mismatch = np.max(np.abs(A @ solution - b))
    scale = max(1.0, float(np.max(np.abs(b))))
    if mismatch > 1e-9 * scale:
        raise FitFailure(f"conditions of {problem} are inconsistent (mismatch {mismatch:.3g})")
    c1, c2 = (float(v) for v in solution)
    logger.debug("%s constants: c1=%.12g c2=%.12g", problem, c1, c2)
    return replace(cf, c1=c1, c2=c2)


# ---------------------------------------------------------------------------
# End-to-end
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionResult:
    problem: str
    chart: SimilarityChart
    ode: ReducedODE
    closed_form: ClosedForm


def reduce_problem(problem: str, params: Union[ThermalConfig, Mapping[str, float], None] = None) -> ReductionResult:
    """Filter, chart, reduce, integrate and (when params are given) fit one problem."""
    result = filter_problem(problem)
    if result.subspace.dimension != 1:
        raise ReductionFailure(
            f"{problem} admits {result.subspace.dimension} operators; expected exactly one"
        )
    chart = similarity_chart(result.subspace.basis[0])
    ode = reduce_pde(chart)
    closed = integrate_reduced(ode, chart.n)
    if params is not None:
        closed = fit_constants(closed, problem, params)
    return ReductionResult(problem, chart, ode, closed)
