"""p-adic integers known modulo ``p^N``.

Arithmetic keeps the smaller precision of its operands, and dividing by
``p`` costs one digit:

    >>> a = PadicApprox(2, 8, 6)
    >>> a.div_p()
    PadicApprox(p=2, N=7, residue=3)
    >>> (a + PadicApprox(2, 4, 1)).N
    4
    >>> PadicApprox(2, 8, -1).residue
    255
"""

from __future__ import annotations

from dataclasses import dataclass


class PrecisionExhausted(ArithmeticError):
    """Raised when a computation would need more digits than are available."""


class NotDivisible(ArithmeticError):
    pass


@dataclass(frozen=True)
class PadicApprox:
    p: int
    N: int
    residue: int = 0

    def __post_init__(self):
        if self.N < 0:
            raise PrecisionExhausted(f"precision {self.N} is negative")
        object.__setattr__(self, "residue", self.residue % self.p ** self.N)

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    def _coerce(self, other) -> "PadicApprox":
        if isinstance(other, PadicApprox):
            if other.p != self.p:
                raise ValueError(f"mixing primes {self.p} and {other.p}")
            return other
        return PadicApprox(self.p, self.N, int(other))

    def __add__(self, other):
        o = self._coerce(other)
        return PadicApprox(self.p, min(self.N, o.N), self.residue + o.residue)

    __radd__ = __add__

    def __neg__(self):
        return PadicApprox(self.p, self.N, -self.residue)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return PadicApprox(self.p, min(self.N, o.N), self.residue * o.residue)

    __rmul__ = __mul__

    def valuation(self) -> int:
        """The p-adic valuation, capped at ``N`` when the residue is zero."""
        if self.residue == 0:
            return self.N
        v, r = 0, self.residue
        while r % self.p == 0:
            r //= self.p
            v += 1
        return v

    def div_p(self, times: int = 1) -> "PadicApprox":
        if times > self.N:
            raise PrecisionExhausted(f"cannot divide by p^{times} at precision {self.N}")
        if self.residue % self.p ** times:
            raise NotDivisible(f"{self.residue} is not divisible by {self.p}^{times}")
        return PadicApprox(self.p, self.N - times, self.residue // self.p ** times)

    def reduce(self, n: int) -> "PadicApprox":
        if n > self.N:
            raise PrecisionExhausted(f"cannot raise precision from {self.N} to {n}")
        return PadicApprox(self.p, n, self.residue)

    def is_zero(self) -> bool:
        return self.residue == 0

    def __eq__(self, other):
        if isinstance(other, PadicApprox):
            n = min(self.N, other.N)
            return self.p == other.p and (self.residue - other.residue) % self.p ** n == 0
        if isinstance(other, int):
            return (self.residue - other) % self.modulus == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.N, self.residue))

    def __int__(self):
        return self.residue

    def to_json(self):
        return {"p": self.p, "N": self.N, "residue": self.residue}
