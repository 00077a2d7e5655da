"""Exact scalar arithmetic: rationals and rational-function fields over Q.

Every computation in the package runs over one of two kinds of field:

* plain rationals, represented by ``fractions.Fraction``;
* a field Q(p1, ..., pk) of rational functions in named parameters,
  represented by :class:`RatFunc` (a normalized quotient of two
  :class:`MultiPoly`).

Polynomial storage and gcd are delegated to sympy's low-level sparse
polynomial rings (grlex order, rational ground domain); normalization
invariants (coprime numerator/denominator, monic denominator under grlex)
are maintained here so that equal values always compare equal.
"""

from __future__ import annotations

from fractions import Fraction

from sympy.polys.domains import QQ as _SQQ
from sympy.polys.rings import ring as _sring

# The spec's Rational is exactly what fractions.Fraction guarantees:
# coprime numerator/denominator, positive denominator.
Rational = Fraction


class PoleError(ZeroDivisionError):
    """Specialization hit a zero of the denominator."""


def _to_ground(value):
    """Convert an int/Fraction into the sympy QQ ground domain."""
    if isinstance(value, Fraction):
        return _SQQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return _SQQ(value)
    raise TypeError(f"cannot convert {value!r} to a rational coefficient")


def _from_ground(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class MultiPoly:
    """Multivariate polynomial over Q in the named parameters of a field.

    Thin immutable wrapper over a sympy sparse ``PolyElement``; the sparse
    map never stores zero coefficients and exponent vectors always match
    the parameter list of the owning :class:`FunctionField`.
    """

    __slots__ = ("field", "p")

    def __init__(self, field: "FunctionField", p):
        self.field = field
        self.p = p

    # -- constructors -------------------------------------------------

    @classmethod
    def from_dict(cls, field: "FunctionField", coeffs: dict) -> "MultiPoly":
        d = {tuple(m): _to_ground(c) for m, c in coeffs.items()
             if c != 0}
        return cls(field, field.ring.from_dict(d))

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.p

    def is_constant(self) -> bool:
        return not self.p or (len(self.p) == 1 and not any(self.p.LM))

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return _from_ground(self.p.LC)

    def total_degree(self) -> int:
        if self.is_zero():
            return 0
        return max(sum(m) for m in self.p.monoms())

    def terms(self):
        """Sorted list of (exponent tuple, Fraction coefficient)."""
        return [(m, _from_ground(c)) for m, c in self.p.terms()]

    def leading_coeff(self) -> Fraction:
        return _from_ground(self.p.LC)

    def __len__(self):
        return len(self.p)

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly(self.field, self.field.ring.ground_new(_to_ground(other)))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return MultiPoly(self.field, self.p + other.p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return MultiPoly(self.field, self.p - other.p)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return MultiPoly(self.field, other.p - self.p)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return MultiPoly(self.field, self.p * other.p)

    __rmul__ = __mul__

    def __neg__(self):
        return MultiPoly(self.field, -self.p)

    def __pow__(self, n: int):
        return MultiPoly(self.field, self.p ** n)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if isinstance(other, MultiPoly):
            return self.p == other.p
        return NotImplemented

    def __bool__(self):
        return bool(self.p)

    def exquo(self, other: "MultiPoly") -> "MultiPoly":
        """Exact division; raises if the quotient is not polynomial."""
        return MultiPoly(self.field, self.p.exquo(other.p))

    def diff(self, name: str) -> "MultiPoly":
        return MultiPoly(self.field, self.p.diff(self.field.gens[name].p))

    def monic(self) -> "MultiPoly":
        if self.is_zero():
            return self
        return MultiPoly(self.field, self.p.quo_ground(self.p.LC))

    def evaluate(self, assignment: dict) -> Fraction:
        """Full evaluation at rational parameter values."""
        total = Fraction(0)
        for monom, coeff in self.terms():
            v = coeff
            for name, e in zip(self.field.params, monom):
                if e:
                    v *= Fraction(assignment[name]) ** e
            total += v
        return total

    def __repr__(self):
        return str(self.p)


def poly_gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Monic (grlex) greatest common divisor; errors when both are zero."""
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    return MultiPoly(p.field, p.p.gcd(q.p)).monic()


class RatFunc:
    """Normalized fraction of two MultiPoly: gcd 1, monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly, _normalized=False):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _normalized:
            if num.is_zero():
                den = num.field.ring_one
            else:
                g = num.p.gcd(den.p)
                if not (len(g) == 1 and not any(g.LM) and g.LC == 1):
                    num = MultiPoly(num.field, num.p.exquo(g))
                    den = MultiPoly(den.field, den.p.exquo(g))
                lc = den.p.LC
                if lc != 1:
                    num = MultiPoly(num.field, num.p.quo_ground(lc))
                    den = MultiPoly(den.field, den.p.quo_ground(lc))
        self.num = num
        self.den = den

    @property
    def field(self):
        return self.num.field

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, MultiPoly):
            return RatFunc(other, other.field.ring_one)
        if isinstance(other, (int, Fraction)):
            f = self.field
            return RatFunc(f.poly_const(other), f.ring_one, _normalized=True)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        num = self.num * other.den + other.num * self.den
        return RatFunc(num, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.field.zero
        # cross-cancel before multiplying to keep degrees down
        a, b = self.num.p, self.den.p
        c, d = other.num.p, other.den.p
        g1 = a.gcd(d)
        if not g1.is_one:
            a, d = a.exquo(g1), d.exquo(g1)
        g2 = c.gcd(b)
        if not g2.is_one:
            c, b = c.exquo(g2), b.exquo(g2)
        f = self.field
        return RatFunc(MultiPoly(f, a * c), MultiPoly(f, b * d))

    __rmul__ = __mul__

    def inv(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        f = self.field
        return RatFunc(self.num ** n, self.den ** n, _normalized=True) if n else f.one

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = self._coerce(other)
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __bool__(self):
        return not self.is_zero()

    def specialize(self, assignment: dict) -> Fraction:
        den = self.den.evaluate(assignment)
        if den == 0:
            raise PoleError(f"pole at specialization {assignment}")
        return self.num.evaluate(assignment) / den

    def complexity(self) -> int:
        return len(self.num) + len(self.den) + self.num.total_degree() + self.den.total_degree()

    def __repr__(self):
        if self.den.is_constant():
            return str(self.num) if self.den.constant_value() == 1 else f"({self.num})/{self.den}"
        return f"({self.num})/({self.den})"


class RationalField:
    """The field Q, with Fraction scalars."""

    params: tuple = ()

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def coerce(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, RatFunc) and value.is_constant():
            return value.constant_value()
        raise TypeError(f"cannot coerce {value!r} into Q")

    def is_zero(self, a) -> bool:
        return a == 0

    def scalar_to_json(self, a) -> str:
        return str(Fraction(a))

    def scalar_from_json(self, s) -> Fraction:
        return Fraction(s)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


QQ = RationalField()


class FunctionField:
    """Q(p1, ..., pk): rational functions in named parameters."""

    def __init__(self, params):
        params = tuple(params)
        if not params:
            raise ValueError("FunctionField needs at least one parameter")
        self.params = params
        self.ring, *gens = _sring(",".join(params), _SQQ, order="grlex")
        self.ring_one = MultiPoly(self, self.ring.one)
        self.ring_zero = MultiPoly(self, self.ring.zero)
        self.gens = {name: MultiPoly(self, g) for name, g in zip(params, gens)}
        self.zero = RatFunc(self.ring_zero, self.ring_one, _normalized=True)
        self.one = RatFunc(self.ring_one, self.ring_one, _normalized=True)

    def gen(self, name: str) -> RatFunc:
        g = self.gens[name]
        return RatFunc(g, self.ring_one, _normalized=True)

    def poly_const(self, value) -> MultiPoly:
        return MultiPoly(self, self.ring.ground_new(_to_ground(value)))

    def poly(self, coeffs: dict) -> MultiPoly:
        """Polynomial from {exponent tuple: coefficient}."""
        return MultiPoly.from_dict(self, coeffs)

    def coerce(self, value) -> RatFunc:
        if isinstance(value, RatFunc):
            if value.field is not self:
                raise TypeError("RatFunc from a different field")
            return value
        if isinstance(value, MultiPoly):
            return RatFunc(value, self.ring_one)
        if isinstance(value, (int, Fraction)):
            return RatFunc(self.poly_const(value), self.ring_one, _normalized=True)
        raise TypeError(f"cannot coerce {value!r} into {self!r}")

    def is_zero(self, a) -> bool:
        if isinstance(a, RatFunc):
            return a.is_zero()
        return a == 0

    def scalar_to_json(self, a):
        a = self.coerce(a)
        return {
            "num": [[list(m), str(c)] for m, c in a.num.terms()],
            "den": [[list(m), str(c)] for m, c in a.den.terms()],
        }

    def scalar_from_json(self, obj) -> RatFunc:
        num = self.poly({tuple(m): Fraction(c) for m, c in obj["num"]})
        den = self.poly({tuple(m): Fraction(c) for m, c in obj["den"]})
        return RatFunc(num, den)

    def __repr__(self):
        return "QQ(" + ",".join(self.params) + ")"

    def __eq__(self, other):
        return isinstance(other, FunctionField) and self.params == other.params

    def __hash__(self):
        return hash(("FunctionField", self.params))


_FIELD_CACHE: dict = {}


def field_for(params) -> "RationalField | FunctionField":
    """Canonical field instance for a parameter tuple (interned).

    Interning matters: scalars carry a reference to their field and only
    interoperate within one instance.
    """
    params = tuple(params)
    if not params:
        return QQ
    if params not in _FIELD_CACHE:
        _FIELD_CACHE[params] = FunctionField(params)
    return _FIELD_CACHE[params]


def specialize(value, assignment: dict) -> Fraction:
    """Evaluate a scalar at rational parameter values; Fractions pass through."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, MultiPoly):
        return value.evaluate(assignment)
    if isinstance(value, RatFunc):
        return value.specialize(assignment)
    raise TypeError(f"cannot specialize {value!r}")


def substitute(value, images: dict, target):
    """Map a scalar into another field, sending parameter names per `images`.

    `images` maps every parameter name of the source field to a scalar of
    the target field; used for restriction to Kuranishi components (for
    example t3 -> 0) and for sign enumeration (epsilon -> +-1).
    """
    if isinstance(value, (int, Fraction)):
        return target.coerce(value)

    def map_poly(p: MultiPoly):
        total = target.coerce(0)
        for monom, coeff in p.terms():
            term = target.coerce(coeff)
            for name, e in zip(p.field.params, monom):
                if e:
                    term = term * (target.coerce(images[name]) ** e)
            total = total + term
        return total

    if isinstance(value, MultiPoly):
        return map_poly(value)
    if isinstance(value, RatFunc):
        den = map_poly(value.den)
        if target.is_zero(den):
            raise PoleError(f"substitution {images} hits a pole")
        return map_poly(value.num) / den
    raise TypeError(f"cannot substitute into {value!r}")
