"""Dense univariate polynomials, coefficients stored low degree first."""

from __future__ import annotations

from ..errors import NonExactDivision
from .field import FieldSpec


def _trim(coeffs):
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldSpec, coeffs=()):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", _trim([field(c) for c in coeffs]))

    @classmethod
    def _raw(cls, field, coeffs):
        p = object.__new__(cls)
        object.__setattr__(p, "field", field)
        object.__setattr__(p, "coeffs", _trim(list(coeffs)))
        return p

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def constant(cls, field, c):
        return cls(field, [c])

    @classmethod
    def from_roots(cls, field, roots):
        """Monic polynomial prod (t - root)."""
        out = cls._raw(field, [field.one])
        for root in roots:
            out = out * cls._raw(field, [field.neg(field(root)), field.one])
        return out

    @property
    def degree(self):
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def coefficient(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def padded(self, length):
        """Coefficient list of exactly ``length`` entries."""
        if len(self.coeffs) > length:
            raise ValueError(f"degree {self.degree} does not fit in {length} coefficients")
        return list(self.coeffs) + [self.field.zero] * (length - len(self.coeffs))

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        fmt = self.field.format_scalar
        return f"Poly([{', '.join(fmt(c) for c in self.coeffs)}])"

    def __add__(self, other):
        F = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly._raw(F, [F.add(self.coefficient(i), other.coefficient(i)) for i in range(n)])

    def __sub__(self, other):
        F = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly._raw(F, [F.sub(self.coefficient(i), other.coefficient(i)) for i in range(n)])

    def __neg__(self):
        return Poly._raw(self.field, [self.field.neg(c) for c in self.coeffs])

    def __mul__(self, other):
        F = self.field
        if isinstance(other, Poly):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return Poly._raw(F, [])
            out = [F.zero] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if not x:
                    continue
                for j, y in enumerate(b):
                    out[i + j] += x * y
            if F.p is not None:
                out = [c % F.p for c in out]
            return Poly._raw(F, out)
        c = F(other)
        return Poly._raw(F, [F.mul(c, x) for x in self.coeffs])

    __rmul__ = __mul__

    def __call__(self, t):
        F = self.field
        acc = F.zero
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, t), c)
        return acc

    def monic(self):
        if self.is_zero():
            return self
        return self * self.field.inv(self.coeffs[-1])

    def divmod(self, den: "Poly"):
        if den.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        rem = list(self.coeffs)
        dq = len(rem) - len(den.coeffs)
        if dq < 0:
            return Poly._raw(F, []), self
        lead_inv = F.inv(den.coeffs[-1])
        quot = [F.zero] * (dq + 1)
        dlen = len(den.coeffs)
        for k in range(dq, -1, -1):
            c = F.mul(rem[k + dlen - 1], lead_inv)
            quot[k] = c
            if c:
                for j, d in enumerate(den.coeffs):
                    rem[k + j] = F.sub(rem[k + j], F.mul(c, d))
        return Poly._raw(F, quot), Poly._raw(F, rem[:dlen - 1])


def exact_divide(num: Poly, den: Poly) -> Poly:
    """``num / den``, raising :class:`NonExactDivision` on a nonzero remainder."""
    q, r = num.divmod(den)
    if not r.is_zero():
        raise NonExactDivision(f"remainder of degree {r.degree} in exact division")
    return q
