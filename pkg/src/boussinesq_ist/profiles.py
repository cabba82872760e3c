"""Initial data (u0, v0) built from closed-form rapidly decaying families.

Every family provides its value, derivative and antiderivative from -inf in
closed form, so the scattering integrator never has to interpolate.

A profile spec is a JSON-like mapping::

    {"u0": [{"family": "gaussian", "amplitude": 0.1, "width": 1.0, "center": 0.0}],
     "v0": [...] | {"from_u1": [...]}}
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.special import erfc, expit

from .errors import ValidationError, ZeroMeanViolation

FAMILIES = ("zero", "gaussian", "sech_squared", "gaussian_derivative")
SUPER_EXPONENTIAL = frozenset({"zero", "gaussian", "gaussian_derivative"})

DEFAULT_EPS = 1e-14
LADDER_START = 1.0
LADDER_RATIO = 2.0 ** (1 / 16)
LADDER_MAX = 1000.0
ZERO_MEAN_TOL = 1e-10


def _sech2(z):
    e = np.exp(-2 * np.abs(z))
    return 4 * e / (1 + e) ** 2


@dataclass(frozen=True)
class Member:
    family: str
    amplitude: float = 0.0
    width: float = 1.0
    center: float = 0.0

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.center) / self.width

    def value(self, x):
        z = self._z(x)
        a, w = self.amplitude, self.width
        if self.family == "zero":
            return np.zeros_like(z)
        if self.family == "gaussian":
            return a * np.exp(-z * z)
        if self.family == "sech_squared":
            return a * _sech2(z)
        return -2 * a * z / w * np.exp(-z * z)

    def derivative(self, x):
        z = self._z(x)
        a, w = self.amplitude, self.width
        if self.family == "zero":
            return np.zeros_like(z)
        if self.family == "gaussian":
            return -2 * a * z / w * np.exp(-z * z)
        if self.family == "sech_squared":
            return -2 * a / w * _sech2(z) * np.tanh(z)
        return -2 * a / w**2 * (1 - 2 * z * z) * np.exp(-z * z)

    def antiderivative(self, x):
        """Integral of the member from -inf to x."""
        z = self._z(x)
        a, w = self.amplitude, self.width
        if self.family == "zero":
            return np.zeros_like(z)
        if self.family == "gaussian":
            return 0.5 * a * w * math.sqrt(math.pi) * erfc(-z)
        if self.family == "sech_squared":
            return 2 * a * w * expit(2 * z)
        return a * np.exp(-z * z)

    def total(self) -> float:
        if self.family == "gaussian":
            return self.amplitude * self.width * math.sqrt(math.pi)
        if self.family == "sech_squared":
            return 2 * self.amplitude * self.width
        return 0.0


@dataclass(frozen=True)
class Component:
    """One of u0 / v0: a sum of members, or the running integral of such a sum."""

    members: tuple[Member, ...] = ()
    integrated: bool = False

    def __call__(self, x):
        return self.value(x)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for m in self.members:
            out = out + (m.antiderivative(x) if self.integrated else m.value(x))
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for m in self.members:
            out = out + (m.value(x) if self.integrated else m.derivative(x))
        return out

    @property
    def is_zero(self) -> bool:
        return all(m.family == "zero" or m.amplitude == 0 for m in self.members)


@dataclass(frozen=True)
class Profile:
    u0: Component
    v0: Component
    spec: Mapping[str, Any]

    @property
    def members(self) -> tuple[Member, ...]:
        return self.u0.members + self.v0.members

    @property
    def decay_class(self) -> str:
        if all(m.family in SUPER_EXPONENTIAL for m in self.members):
            return "super_exponential"
        return "exponential"

    @property
    def decay_rate(self) -> float:
        """Exponential decay rate of the slowest member (inf for super-exponential)."""
        rates = [2 / m.width for m in self.members if m.family == "sech_squared"]
        return min(rates) if rates else math.inf

    @property
    def is_zero(self) -> bool:
        return self.u0.is_zero and self.v0.is_zero

    @property
    def max_width(self) -> float:
        widths = [m.width for m in self.members if m.family != "zero"]
        return max(widths) if widths else 0.0

    def lax_coefficients(self, x):
        """(a, b) with a = -v0 - u0', b = -2 u0: the nonzero row of the Lax potential."""
        return -self.v0.value(x) - self.u0.derivative(x), -2 * self.u0.value(x)


def _finite(value: Any, field: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"expected a number, got {value!r}", field=field) from None
    if not math.isfinite(out):
        raise ValidationError(f"non-finite value {value!r}", field=field)
    return out


def make_member(spec: Mapping[str, Any], where: str = "member") -> Member:
    family = spec.get("family")
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}; expected one of {FAMILIES}", field=f"{where}.family")
    if family == "zero":
        return Member("zero")
    amplitude = _finite(spec.get("amplitude", 0.0), f"{where}.amplitude")
    width = _finite(spec.get("width", 1.0), f"{where}.width")
    center = _finite(spec.get("center", 0.0), f"{where}.center")
    if width <= 0:
        raise ValidationError(f"width must be positive, got {width}", field=f"{where}.width")
    return Member(family, amplitude, width, center)


def _members(specs: Sequence[Mapping[str, Any]] | Mapping[str, Any] | None, where: str) -> tuple[Member, ...]:
    if specs is None:
        return ()
    if isinstance(specs, Mapping):
        specs = [specs]
    return tuple(make_member(s, f"{where}[{i}]") for i, s in enumerate(specs))


def v0_from_u1(u1_spec) -> Component:
    """v0(x) = integral of u1 from -inf to x; u1 must have zero mean."""
    members = _members(u1_spec, "from_u1")
    integral = sum(m.total() for m in members)
    if abs(integral) > ZERO_MEAN_TOL:
        raise ZeroMeanViolation(integral)
    return Component(members, integrated=True)


def make_profile(spec: Mapping[str, Any] | str) -> Profile:
    if spec == "zero" or spec is None:
        spec = {"u0": [{"family": "zero"}], "v0": [{"family": "zero"}]}
    if not isinstance(spec, Mapping):
        raise ValidationError(f"profile spec must be a mapping, got {type(spec).__name__}", field="profile")
    unknown = set(spec) - {"u0", "v0"}
    if unknown:
        raise ValidationError(f"unexpected keys {sorted(unknown)}", field="profile")
    u0 = Component(_members(spec.get("u0"), "u0"))
    v0_spec = spec.get("v0")
    if isinstance(v0_spec, Mapping) and "from_u1" in v0_spec:
        v0 = v0_from_u1(v0_spec["from_u1"])
    else:
        v0 = Component(_members(v0_spec, "v0"))
    return Profile(u0, v0, dict(spec))


def gaussian_profile(amplitude: float = 0.1, width: float = 1.0, center: float = 0.0) -> Profile:
    return make_profile({"u0": [{"family": "gaussian", "amplitude": amplitude, "width": width, "center": center}]})


def radius_ladder() -> np.ndarray:
    n = int(math.floor(math.log(LADDER_MAX / LADDER_START) / math.log(LADDER_RATIO) + 1e-9))
    return LADDER_START * LADDER_RATIO ** np.arange(n + 1)


def effective_support(p: Profile, eps: float = DEFAULT_EPS) -> float:
    """Smallest ladder radius X with |u0| + |u0'| + |v0| < eps for all |x| >= X."""
    if not 0 < eps < 1:
        raise ValidationError(f"eps must lie in (0, 1), got {eps}", field="eps")
    ladder = radius_ladder()
    if p.is_zero:
        return float(ladder[0])
    x = np.linspace(0.0, LADDER_MAX, 400_001)
    tail = np.zeros_like(x)
    for sign in (1.0, -1.0):
        xs = sign * x
        h = np.abs(p.u0.value(xs)) + np.abs(p.u0.derivative(xs)) + np.abs(p.v0.value(xs))
        # running max from the far end inwards
        tail = np.maximum(tail, np.maximum.accumulate(h[::-1])[::-1])
    for radius in ladder:
        i = np.searchsorted(x, radius)
        if tail[i] < eps:
            return float(radius)
    raise ValidationError(f"profile does not fall below eps={eps:g} within |x| <= {LADDER_MAX:g}", field="eps")
