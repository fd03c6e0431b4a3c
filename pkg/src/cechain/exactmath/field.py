"""Base fields: a word-size prime field or the rationals.

Scalars are plain Python objects: ``int`` in ``[0, p)`` for a prime field and
``fractions.Fraction`` for the rationals.  A :class:`FieldSpec` carries the
arithmetic so the same algorithms run over either field.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

MERSENNE61 = (1 << 61) - 1
PRIME_ENV_VAR = "CECHAIN_PRIME"

# Rational sampling draws integers from [-RATIONAL_SAMPLE_BOUND, RATIONAL_SAMPLE_BOUND].
RATIONAL_SAMPLE_BOUND = 1 << 10


def default_prime():
    """The prime used when none is given; overridable via ``$CECHAIN_PRIME``."""
    value = os.environ.get(PRIME_ENV_VAR)
    return int(value) if value else MERSENNE61


@dataclass(frozen=True)
class FieldSpec:
    """Either GF(p) (``p`` a prime below 2**63) or Q (``p is None``)."""

    p: int | None = MERSENNE61

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or self.p < 2 or self.p >= 1 << 63:
                raise ValueError(f"field characteristic must be a word-size prime, got {self.p!r}")
            if not gmpy2.is_prime(self.p):
                raise ValueError(f"{self.p} is not prime")

    @classmethod
    def prime(cls, p=None):
        return cls(default_prime() if p is None else int(p))

    @classmethod
    def rational(cls):
        return cls(None)

    @classmethod
    def parse(cls, text):
        """Parse ``"rational"``/``"Q"`` or a decimal prime."""
        if text is None:
            return cls.prime()
        t = str(text).strip().lower()
        if t in ("rational", "q", "qq"):
            return cls.rational()
        return cls(int(t))

    @property
    def is_rational(self):
        return self.p is None

    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def __str__(self):
        return "rational" if self.p is None else str(self.p)

    # -- arithmetic -------------------------------------------------------

    def __call__(self, x):
        """Coerce an int, Fraction or decimal string into the field."""
        if isinstance(x, str):
            return self.parse_scalar(x)
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            return x.numerator % self.p * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else a * b % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a) if self.p is None else pow(a, -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, e):
        return a**e if self.p is None else pow(a, e, self.p)

    # -- sampling ---------------------------------------------------------

    def random(self, rng):
        """Uniform element of GF(p), or a bounded random integer over Q."""
        if self.p is None:
            return Fraction(int(rng.integers(-RATIONAL_SAMPLE_BOUND, RATIONAL_SAMPLE_BOUND + 1)))
        return int(rng.integers(0, self.p))

    def random_nonzero(self, rng):
        while True:
            x = self.random(rng)
            if x:
                return x

    def random_vector(self, rng, n):
        if self.p is None:
            vals = rng.integers(-RATIONAL_SAMPLE_BOUND, RATIONAL_SAMPLE_BOUND + 1, size=n)
            return [Fraction(int(v)) for v in vals]
        return [int(v) for v in rng.integers(0, self.p, size=n)]

    # -- text form --------------------------------------------------------

    def format_scalar(self, x):
        if self.p is None:
            x = Fraction(x)
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return str(int(x))

    def parse_scalar(self, text):
        text = str(text).strip()
        if "/" in text:
            num, den = text.split("/", 1)
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(int(text))
        return self(value)
