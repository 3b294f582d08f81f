"""Expression trees for pointwise-evaluable plurisubharmonic weights.

Node kinds: log-modulus of a complex polynomial, max of subtrees,
positive scaling, powers of |log|z_k|| with a minus sign, and plain
log|z_k|.  Evaluation works in logarithmic coordinates (t, theta) with
t_k = log|z_k| and theta_k = arg z_k, which keeps polynomial moduli
stable at arbitrarily deep radii and makes a value of -inf an ordinary
outcome rather than an overflow.

`torus_values` accepts broadcastable numpy arrays for both t and theta,
so a single call evaluates a whole quadrature grid.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .exactgeom import frac
from .poly_geom import ExponentSet

__all__ = [
    "PolyLog",
    "CoordLog",
    "NegPowLog",
    "MaxOf",
    "Scale",
    "WeightExpr",
    "eval_expr",
    "torus_values",
    "depends_on_theta",
    "dimension_of",
    "scaling_transform",
    "indicator_support",
    "is_multicircled",
    "is_psh_star",
]


@dataclass(frozen=True)
class PolyLog:
    """log-modulus of a complex polynomial, given as (coefficient, exponent) terms."""

    terms: tuple[tuple[complex, tuple[int, ...]], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a polynomial needs at least one term")
        seen = set()
        dims = set()
        for c, J in self.terms:
            if c == 0:
                raise ValueError("zero coefficient; combine like terms first")
            if any(j < 0 or not isinstance(j, int) for j in J):
                raise ValueError(f"exponent vector must be nonnegative integers: {J}")
            if J in seen:
                raise ValueError(f"duplicate exponent vector {J}")
            seen.add(J)
            dims.add(len(J))
        if len(dims) != 1:
            raise ValueError("inconsistent exponent dimensions")

    @classmethod
    def of(cls, terms) -> "PolyLog":
        return cls(tuple((complex(c), tuple(int(j) for j in J)) for c, J in terms))


@dataclass(frozen=True)
class CoordLog:
    axis: int  # 1-based

    def __post_init__(self):
        if self.axis < 1:
            raise ValueError("axis is 1-based")


@dataclass(frozen=True)
class NegPowLog:
    """-|log|z_k||^p on the unit polydisk, p in (0, 1]."""

    axis: int
    power: Fraction

    def __post_init__(self):
        p = frac(self.power)
        if not 0 < p <= 1:
            raise ValueError(f"power must lie in (0, 1], got {p}")
        object.__setattr__(self, "power", p)
        if self.axis < 1:
            raise ValueError("axis is 1-based")


@dataclass(frozen=True)
class MaxOf:
    children: tuple["WeightExpr", ...]

    def __post_init__(self):
        if not self.children:
            raise ValueError("max needs at least one child")

    @classmethod
    def of(cls, *children) -> "MaxOf":
        return cls(tuple(children))


@dataclass(frozen=True)
class Scale:
    factor: Union[Fraction, float]
    child: "WeightExpr"

    def __post_init__(self):
        if not float(self.factor) > 0:
            raise ValueError("scale factor must be positive")


WeightExpr = Union[PolyLog, CoordLog, NegPowLog, MaxOf, Scale]

_NEG_INF = float("-inf")


def torus_values(w, t: Sequence, theta: Sequence) -> np.ndarray:
    """Evaluate w on points with log-moduli t and arguments theta.

    t and theta entries may be scalars or broadcastable numpy arrays;
    entries of t equal to -inf restrict to a coordinate hyperplane.
    Objects outside the node algebra may participate by providing their
    own ``torus_values(t, theta)`` method.
    """
    if hasattr(w, "torus_values"):
        return np.asarray(w.torus_values(t, theta), dtype=float)
    if isinstance(w, CoordLog):
        return np.asarray(t[w.axis - 1], dtype=float)
    if isinstance(w, NegPowLog):
        tk = np.asarray(t[w.axis - 1], dtype=float)
        with np.errstate(invalid="ignore"):
            return -np.abs(tk) ** float(w.power)
    if isinstance(w, Scale):
        return float(w.factor) * torus_values(w.child, t, theta)
    if isinstance(w, MaxOf):
        vals = [torus_values(c, t, theta) for c in w.children]
        out = vals[0]
        for v in vals[1:]:
            out = np.maximum(out, v)
        return out
    if isinstance(w, PolyLog):
        return _polylog_values(w, t, theta)
    raise TypeError(f"not a weight expression: {type(w).__name__}")


def _polylog_values(w: PolyLog, t, theta) -> np.ndarray:
    logamps = []
    phases = []
    for c, J in w.terms:
        la = math.log(abs(c))
        ph = cmath.phase(c)
        amp = None
        phase = None
        for k, Jk in enumerate(J):
            if not Jk:
                continue  # skip so that 0 * (-inf) never appears
            term_a = Jk * np.asarray(t[k], dtype=float)
            amp = term_a if amp is None else amp + term_a
            term_p = Jk * np.asarray(theta[k], dtype=float)
            phase = term_p if phase is None else phase + term_p
        logamps.append(la if amp is None else la + amp)
        phases.append(ph if phase is None else ph + phase)
    peak = logamps[0]
    for la in logamps[1:]:
        peak = np.maximum(peak, la)
    peak = np.asarray(peak, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        acc = None
        for la, ph in zip(logamps, phases):
            contrib = np.exp(np.where(peak == _NEG_INF, _NEG_INF, la - peak)) * np.exp(
                1j * np.asarray(ph, dtype=float)
            )
            acc = contrib if acc is None else acc + contrib
        out = np.where(peak == _NEG_INF, _NEG_INF, peak + np.log(np.abs(acc)))
    return out


def eval_expr(w, z: Sequence[complex]):
    """Pointwise value of w at a complex vector; may return -inf."""
    t = []
    theta = []
    for zk in z:
        zk = complex(zk)
        m = abs(zk)
        t.append(math.log(m) if m > 0 else _NEG_INF)
        theta.append(cmath.phase(zk) if m > 0 else 0.0)
    val = torus_values(w, t, theta)
    return float(val)


def depends_on_theta(w) -> bool:
    """True when the value can vary along the torus directions."""
    if hasattr(w, "torus_values"):
        return bool(getattr(w, "theta_dependent", True))
    if isinstance(w, PolyLog):
        return len(w.terms) > 1
    if isinstance(w, Scale):
        return depends_on_theta(w.child)
    if isinstance(w, MaxOf):
        return any(depends_on_theta(c) for c in w.children)
    return False


def dimension_of(w) -> int:
    """Smallest ambient dimension the expression references."""
    if hasattr(w, "dimension"):
        return int(w.dimension)
    if isinstance(w, (CoordLog, NegPowLog)):
        return w.axis
    if isinstance(w, Scale):
        return dimension_of(w.child)
    if isinstance(w, MaxOf):
        return max(dimension_of(c) for c in w.children)
    if isinstance(w, PolyLog):
        return len(w.terms[0][1])
    raise TypeError(f"not a weight expression: {type(w).__name__}")


def _scale(factor, child):
    f = factor
    if isinstance(child, Scale):
        # collapse nested scalings; exact when both factors are rational
        if isinstance(f, Fraction) and isinstance(child.factor, Fraction):
            f = f * child.factor
        else:
            f = float(f) * float(child.factor)
        child = child.child
    if isinstance(f, Fraction) and f == 1:
        return child
    if isinstance(f, float) and f == 1.0:
        return child
    return Scale(f, child)


def _substitute_power(w, m: int):
    """Expression for y -> w(y_1^m, ..., y_n^m)."""
    if isinstance(w, PolyLog):
        return PolyLog(tuple((c, tuple(m * j for j in J)) for c, J in w.terms))
    if isinstance(w, CoordLog):
        return _scale(Fraction(m), w)
    if isinstance(w, NegPowLog):
        # |log|y_k^m||^p = m^p |log|y_k||^p
        p = w.power
        f: Union[Fraction, float]
        if p.denominator == 1:
            f = Fraction(m) ** p.numerator
        else:
            f = float(m) ** float(p)
        return _scale(f, w)
    if isinstance(w, MaxOf):
        return MaxOf(tuple(_substitute_power(c, m) for c in w.children))
    if isinstance(w, Scale):
        return _scale(w.factor, _substitute_power(w.child, m))
    raise TypeError(f"not a weight expression: {type(w).__name__}")


def scaling_transform(w, m: int):
    """The rescaled weight y -> (1/m) w(y_1^m, ..., y_n^m), exact on the tree."""
    if m < 1 or not isinstance(m, int):
        raise ValueError("m must be a positive integer")
    return _scale(Fraction(1, m), _substitute_power(w, m))


def indicator_support(w, dimension: int | None = None) -> ExponentSet:
    """Exponent set generating the piecewise-linear indicator of w.

    Defined for the polynomial-log / coordinate-log / max / rational-scale
    fragment; raises for weights whose indicator is not piecewise linear.
    """
    n = dimension if dimension is not None else dimension_of(w)

    def gens(node):
        if isinstance(node, PolyLog):
            return [tuple(Fraction(j) for j in J) + (Fraction(0),) * (n - len(J)) for _, J in node.terms]
        if isinstance(node, CoordLog):
            return [tuple(Fraction(1 if i == node.axis - 1 else 0) for i in range(n))]
        if isinstance(node, MaxOf):
            out = []
            for c in node.children:
                out.extend(gens(c))
            return out
        if isinstance(node, Scale):
            f = node.factor
            if not isinstance(f, Fraction):
                raise ValueError("indicator support needs a rational scale factor")
            return [tuple(f * x for x in g) for g in gens(node.child)]
        if isinstance(node, NegPowLog):
            raise ValueError("sub-logarithmic node has no piecewise-linear indicator")
        raise TypeError(f"not a weight expression: {type(node).__name__}")

    return ExponentSet.of(gens(w), n)


def is_multicircled(w) -> bool:
    """True when the value depends only on the coordinate moduli."""
    return not depends_on_theta(w)


def is_psh_star(w, axis: int, dimension: int | None = None, probe_moduli=(0.3, 0.5, 0.7), probe_angles: int = 8) -> bool:
    """Probe whether the restriction to {z_axis = 0} is somewhere finite."""
    n = dimension if dimension is not None else dimension_of(w)
    if not 1 <= axis <= n:
        raise ValueError(f"axis {axis} out of range 1..{n}")
    angles = 2 * math.pi * (np.arange(probe_angles) + 0.5) / probe_angles
    for rho in probe_moduli:
        t = [math.log(rho)] * n
        t[axis - 1] = _NEG_INF
        theta = []
        for k in range(n):
            if k == axis - 1:
                theta.append(0.0)
            else:
                shape = [1] * n
                shape[k] = probe_angles
                theta.append(angles.reshape(shape))
        vals = torus_values(w, t, theta)
        if np.any(np.isfinite(vals)):
            return True
    return False
