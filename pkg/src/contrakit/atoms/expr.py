"""Atoms and formal direct sums of atoms.

The atoms are the standard abelian groups ``Z``, ``Z/p^k``, ``Q``,
``Zp(p)`` (p-adic integers), ``Qp(p)``, ``Prufer(p)`` (``Q_p/Z_p``) and
``Zinv(s)`` (``Z[1/s]``).  An :class:`AtomExpr` is a finite direct sum of
atoms with multiplicities, plus an optional block ``Prod{all}[Zp^r]``
standing for the product of ``Z_p^r`` over every prime.

Text form::

    >>> e = parse("Z/12 + Zp(2)^2 + Adele(1)")
    >>> print(e)
    Prod{all}[Zp^1] + Zp(2)^2 + Z/4 + Z/3
    >>> parse(str(e)) == e
    True
    >>> print(parse("Prod{2,3}[Zp]"))
    Zp(2) + Zp(3)
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from math import prod

from sympy import factorint, isprime


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


KIND_ORDER = ("Z", "Q", "Zinv", "Zp", "Qp", "Prufer", "Cyclic")
PRIME_KINDS = ("Zp", "Qp", "Prufer")


def radical(s: int) -> int:
    return prod(factorint(abs(s)))


def primes_of(s: int) -> list[int]:
    return sorted(factorint(abs(s)))


@dataclass(frozen=True, order=False)
class Atom:
    """One indecomposable building block.

    ``p`` is the prime for ``Zp``/``Qp``/``Prufer``/``Cyclic``, the
    squarefree radical for ``Zinv``; ``k`` is the exponent of a cyclic
    ``Z/p^k``.
    """

    kind: str
    p: int = 0
    k: int = 0

    def __post_init__(self):
        if self.kind not in KIND_ORDER:
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.kind in PRIME_KINDS + ("Cyclic",) and not isprime(self.p):
            raise ValueError(f"{self.kind} needs a prime, got {self.p}")
        if self.kind == "Cyclic" and self.k < 1:
            raise ValueError("cyclic atoms need exponent >= 1")
        if self.kind == "Zinv" and (self.p < 2 or radical(self.p) != self.p):
            raise ValueError("Zinv parameter must be a squarefree integer >= 2")

    @classmethod
    def zinv(cls, s: int) -> Atom:
        if abs(s) < 2:
            raise ValueError("Zinv(s) needs s outside {0, 1, -1}")
        return cls("Zinv", radical(s))

    @classmethod
    def cyclic(cls, p: int, k: int) -> Atom:
        return cls("Cyclic", p, k)

    @property
    def modulus(self) -> int:
        return self.p ** self.k if self.kind == "Cyclic" else 0

    def sort_key(self):
        return (KIND_ORDER.index(self.kind), self.p, self.k)

    def __str__(self):
        if self.kind in ("Z", "Q"):
            return self.kind
        if self.kind == "Cyclic":
            return f"Z/{self.modulus}"
        return f"{self.kind}({self.p})"


Z = Atom("Z")
Q = Atom("Q")


def Zp(p: int) -> Atom:
    return Atom("Zp", p)


def Qp(p: int) -> Atom:
    return Atom("Qp", p)


def Prufer(p: int) -> Atom:
    return Atom("Prufer", p)


def cyclic_atoms(d: int) -> Counter:
    """Primary decomposition of ``Z/d``."""
    return Counter({Atom.cyclic(p, e): 1 for p, e in factorint(d).items()})


class AtomExpr:
    """A finite direct sum of atoms plus ``Prod{all}[Zp^adele]``."""

    __slots__ = ("terms", "adele")

    def __init__(self, terms=None, adele: int = 0):
        c = Counter()
        for atom, mult in (terms.items() if isinstance(terms, dict) else (terms or ())):
            if mult < 0:
                raise ValueError("multiplicities are nonnegative")
            if mult:
                c[atom] += mult
        if adele < 0:
            raise ValueError("adele rank is nonnegative")
        self.terms = tuple(sorted(c.items(), key=lambda t: t[0].sort_key()))
        self.adele = adele

    @classmethod
    def zero(cls) -> AtomExpr:
        return cls()

    @classmethod
    def of(cls, *atoms: Atom) -> AtomExpr:
        return cls(Counter(atoms))

    @classmethod
    def from_invariants(cls, rank: int, torsion) -> AtomExpr:
        c = Counter({Z: rank})
        for d in torsion:
            c.update(cyclic_atoms(d))
        return cls(c)

    def counter(self) -> Counter:
        return Counter(dict(self.terms))

    def mult(self, atom: Atom) -> int:
        return dict(self.terms).get(atom, 0)

    def atoms(self):
        return [a for a, _ in self.terms]

    def is_zero(self) -> bool:
        return not self.terms and not self.adele

    def __add__(self, other: AtomExpr) -> AtomExpr:
        c = self.counter()
        c.update(other.counter())
        return AtomExpr(c, self.adele + other.adele)

    def times(self, n: int) -> AtomExpr:
        return AtomExpr({a: m * n for a, m in self.terms}, self.adele * n)

    def __eq__(self, other):
        return isinstance(other, AtomExpr) and (self.terms, self.adele) == (other.terms, other.adele)

    def __hash__(self):
        return hash((self.terms, self.adele))

    def __repr__(self):
        return f"AtomExpr({str(self)!r})"

    def __str__(self):
        parts = [f"Prod{{all}}[Zp^{self.adele}]"] if self.adele else []
        parts += [str(a) if m == 1 else f"{a}^{m}" for a, m in self.terms]
        return " + ".join(parts) if parts else "0"

    def primary_part(self, p: int) -> AtomExpr:
        """The ``Z/p^k`` summands."""
        return AtomExpr({a: m for a, m in self.terms if a.kind == "Cyclic" and a.p == p})

    def to_json(self) -> str:
        return str(self)


def sum_exprs(exprs) -> AtomExpr:
    out = AtomExpr.zero()
    for e in exprs:
        out = out + e
    return out


# ---------------------------------------------------------------------------
# parser


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z]+)|(?P<sym>[+^/(){}\[\],]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self, value=None, kind=None):
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value if value is not None else kind
            raise ParseError(f"expected {want!r}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def number(self) -> int:
        return int(self.take(kind="num")[1])

    def expr(self, block_prime=None) -> AtomExpr:
        if self.peek()[1] == "0" and block_prime is None:
            self.take()
            out = AtomExpr.zero()
        else:
            out = self.term(block_prime)
        while self.peek()[1] == "+":
            self.take("+")
            out = out + self.term(block_prime)
        return out

    def multiplicity(self) -> int:
        if self.peek()[1] == "^":
            self.take("^")
            return self.number()
        return 1

    def term(self, block_prime) -> AtomExpr:
        kind, value, pos = self.peek()
        if value == "Prod":
            return self.product()
        if value == "Adele":
            self.take()
            self.take("(")
            r = self.number()
            self.take(")")
            return AtomExpr(adele=r).times(self.multiplicity())
        if kind == "num" and value == "0":
            self.take()
            return AtomExpr.zero()
        base = self.atom(block_prime)
        return base.times(self.multiplicity())

    def atom(self, block_prime) -> AtomExpr:
        kind, value, pos = self.take(kind="name")
        try:
            if value in ("Z", "Q") and self.peek()[1] != "/":
                return AtomExpr.of(Atom(value))
            if value == "Z":
                self.take("/")
                d = self.number()
                if d < 2:
                    raise ParseError("cyclic modulus must be >= 2", pos)
                return AtomExpr(cyclic_atoms(d))
            if value in PRIME_KINDS + ("Zinv",):
                if self.peek()[1] != "(":
                    if block_prime is None or value == "Zinv":
                        raise ParseError(f"{value} needs a parameter", pos)
                    return AtomExpr.of(Atom(value, block_prime))
                self.take("(")
                n = self.number()
                self.take(")")
                return AtomExpr.of(Atom.zinv(n) if value == "Zinv" else Atom(value, n))
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), pos) from None
        raise ParseError(f"unknown atom {value!r}", pos)

    def product(self) -> AtomExpr:
        self.take("Prod")
        self.take("{")
        kind, value, pos = self.peek()
        if value == "all":
            self.take()
            self.take("}")
            self.take("[")
            self.take("Zp")
            r = self.multiplicity()
            self.take("]")
            return AtomExpr(adele=r)
        primes = [self.number()]
        while self.peek()[1] == ",":
            self.take(",")
            primes.append(self.number())
        self.take("}")
        bad = [q for q in primes if not isprime(q)]
        if bad or len(set(primes)) != len(primes):
            raise ParseError("product index set must be distinct primes", pos)
        self.take("[")
        start = self.i
        out = AtomExpr.zero()
        for q in primes:
            self.i = start
            out = out + self.expr(block_prime=q)
        self.take("]")
        return out


def parse(text: str) -> AtomExpr:
    """Parse the text form of an atom expression."""
    p = _Parser(text)
    if not p.tokens:
        raise ParseError("empty expression", 0)
    out = p.expr()
    if p.i != len(p.tokens):
        raise ParseError(f"trailing input {p.peek()[1]!r}", p.peek()[2])
    return out
