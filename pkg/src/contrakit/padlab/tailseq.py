"""Null sequences of p-adic integers with a geometric tail, and the subgroups ``E ⊂ D ⊂ C``.

A :class:`TailSeq` is a finite prefix ``u_0, ..., u_{L-1}`` followed by the
entries ``u_n = p^n w`` for ``n >= L``.  Entries are known modulo ``p^N``;
the tail coefficient ``w`` is known modulo ``p^(N-L)``, which is exactly the
information the entries ``p^n w`` (``n >= L``) carry.

The three subgroups of ``C`` (null sequences) are

* ``D``: sequences ``u_n = p^n v_n`` with ``v_n`` arbitrary,
* ``E``: the same with ``v_n -> 0``,
* ``E + p^m C``.

Membership is read off the prefix and the tail coefficient:

    >>> geo = TailSeq(2, 8, (), 1)          # (1, 2, 4, 8, ...)
    >>> bool(membership(geo, "E")), bool(membership(geo, "D"))
    (False, True)
    >>> bool(membership(TailSeq.unit(2, 8, 3).scale(8), "E"))
    True
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .. import mutations
from ..fpmod import FPModule, enumerate_module
from ..reports import Report
from .padic import PadicApprox, PrecisionExhausted


class PrecisionTooLow(ValueError):
    pass


@dataclass(frozen=True)
class TailSeq:
    p: int
    N: int
    prefix: tuple = ()
    w: int = 0

    def __post_init__(self):
        if len(self.prefix) > self.N:
            raise PrecisionTooLow(f"prefix length {len(self.prefix)} exceeds precision {self.N}")
        q = self.p ** self.N
        object.__setattr__(self, "prefix", tuple(int(u) % q for u in self.prefix))
        object.__setattr__(self, "w", int(self.w) % self.p ** (self.N - len(self.prefix)))

    @classmethod
    def zero(cls, p: int, N: int) -> "TailSeq":
        return cls(p, N)

    @classmethod
    def unit(cls, p: int, N: int, n: int) -> "TailSeq":
        """The sequence ``e_n`` with a single 1 at position ``n``."""
        return cls(p, N, (0,) * n + (1,), 0)

    @classmethod
    def geometric(cls, p: int, N: int, w: int = 1) -> "TailSeq":
        return cls(p, N, (), w)

    @property
    def L(self) -> int:
        return len(self.prefix)

    @property
    def prefix_padic(self) -> list[PadicApprox]:
        return [PadicApprox(self.p, self.N, u) for u in self.prefix]

    @property
    def tail_coeff(self) -> PadicApprox:
        return PadicApprox(self.p, self.N - self.L, self.w)

    def entry(self, n: int) -> int:
        if n < self.L:
            return self.prefix[n]
        return (self.p ** n * self.w) % self.p ** self.N

    def extend(self, length: int) -> "TailSeq":
        """The same sequence with the prefix written out to ``length`` positions.

        The tail coefficient keeps only ``N - length`` digits afterwards.
        """
        if length <= self.L:
            return self
        return TailSeq(self.p, self.N, tuple(self.entry(n) for n in range(length)), self.w)

    def reduce(self, n: int) -> "TailSeq":
        if n > self.N:
            raise PrecisionExhausted(f"cannot raise precision from {self.N} to {n}")
        return TailSeq(self.p, n, self.prefix, self.w)

    def _aligned(self, other: "TailSeq"):
        if (self.p, self.N) != (other.p, other.N):
            raise ValueError("sequences with different primes or precisions")
        h = max(self.L, other.L)
        return self.extend(h), other.extend(h)

    def __add__(self, other: "TailSeq") -> "TailSeq":
        a, b = self._aligned(other)
        return TailSeq(self.p, self.N, tuple(x + y for x, y in zip(a.prefix, b.prefix)), a.w + b.w)

    def __neg__(self) -> "TailSeq":
        return TailSeq(self.p, self.N, tuple(-x for x in self.prefix), -self.w)

    def __sub__(self, other: "TailSeq") -> "TailSeq":
        return self + (-other)

    def scale(self, k: int) -> "TailSeq":
        return TailSeq(self.p, self.N, tuple(k * x for x in self.prefix), k * self.w)

    def __eq__(self, other):
        if not isinstance(other, TailSeq):
            return NotImplemented
        a, b = self._aligned(other)
        return a.prefix == b.prefix and a.w == b.w

    def __hash__(self):
        return hash((self.p, self.N))

    def to_json(self):
        return {"p": self.p, "N": self.N, "prefix": list(self.prefix), "tail_coeff": self.w}

    def __str__(self):
        return f"TailSeq(p={self.p}, N={self.N}, prefix={list(self.prefix)}, w={self.w})"


@dataclass
class Membership:
    member: bool
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.member

    def to_json(self):
        return {"member": self.member, "witness": self.witness}


def parse_space(space: str) -> tuple[str, int | None]:
    """``"E"``, ``"D"`` or ``"E_plus_pmC(m)"`` as ``(kind, m)``."""
    if space in ("E", "D"):
        return space, None
    if space.startswith("E_plus_pmC(") and space.endswith(")"):
        return "E+pmC", int(space[len("E_plus_pmC("):-1])
    raise ValueError(f"unknown space {space!r}")


def membership(seq: TailSeq, space: str) -> Membership:
    """Decide membership of ``seq`` in ``E``, ``D`` or ``E_plus_pmC(m)``.

    A failing position or the nonzero tail coefficient is returned as the
    witness.
    """
    kind, m = parse_space(space)
    p = seq.p
    if kind == "E+pmC":
        if m > seq.N:
            raise PrecisionTooLow(f"m = {m} exceeds precision {seq.N}")
        need = [min(n, m) for n in range(seq.L)]
    elif kind == "E" and mutations.active("e_membership_index"):
        need = [n + 1 for n in range(seq.L)]
    else:
        need = list(range(seq.L))
    for n, (u, k) in enumerate(zip(seq.prefix, need)):
        if u % p ** k:
            return Membership(False, {"position": n, "entry": u, "required_divisor": f"{p}^{k}"})
    if kind == "E" and seq.w:
        return Membership(False, {"tail_coeff": seq.w, "modulus": f"{p}^{seq.N - seq.L}",
                                  "reason": "v_n = w for n >= L does not tend to zero"})
    return Membership(True, {"space": space})


# ---------------------------------------------------------------------------
# definition-level oracle


def _model(p: int, N: int, L: int, H: int, space_gens):
    """Relation lattice of the span of ``space_gens`` inside the TailSeq model.

    Coordinates are the entries ``u_0..u_{H-1}`` (mod ``p^N``) and the value
    ``T = p^H w`` (mod ``p^(N+H-L)``); the tail is ``u_n = p^(n-H) T`` for
    ``n >= H``.  The span is returned as an enumerable quotient whose zero
    class is the subgroup.
    """
    rels = []
    for n in range(H):
        rels.append([p ** N if j == n else 0 for j in range(H + 1)])
    rels.append([0] * H + [p ** (N + H - L)])
    quotient = FPModule(rels + [list(g) for g in space_gens], ngens=H + 1)
    return enumerate_module(quotient)


def _definition_generators(p: int, H: int, kind: str, m: int | None):
    """Generators read off the definitions of ``E``, ``D`` and ``C``.

    ``E``: ``p^n e_n`` (a single nonzero ``v_n`` tends to zero).
    ``D``: those and the sequence ``(p^n)_n`` with ``v_n = 1``, i.e. ``T = p^H``.
    ``C``: every ``e_n`` and the tail ``(p^(n-H))_{n>=H}``, i.e. ``T = 1``.
    """
    def vec(n, value):
        v = [0] * (H + 1)
        v[n] = value
        return v

    e_gens = [vec(n, p ** n) for n in range(H)]
    if kind == "E":
        return e_gens
    if kind == "D":
        return e_gens + [vec(H, p ** H)]
    c_gens = [vec(n, 1) for n in range(H + 1)]
    return e_gens + [[p ** m * x for x in g] for g in c_gens]


def _model_coordinates(p: int, N: int, L: int, H: int, prefixes: np.ndarray, ws: np.ndarray):
    cols = [prefixes[:, n] for n in range(L)]
    cols += [(p ** n * ws) % p ** N for n in range(L, H)]
    cols.append((p ** H * ws) % p ** (N + H - L))
    return np.stack(cols, axis=1) if cols else np.zeros((len(ws), 0), dtype=np.int64)


def all_tailseqs(p: int, N: int, L: int):
    prefixes = np.array(list(product(range(p ** N), repeat=L)), dtype=np.int64)
    prefixes = prefixes.reshape(len(prefixes), L)
    ws = np.arange(p ** (N - L), dtype=np.int64)
    pre = np.repeat(prefixes, len(ws), axis=0)
    w = np.tile(ws, len(prefixes))
    return pre, w


def verify_closed_forms(p: int = 2, max_N: int = 4, max_L: int = 4) -> Report:
    """Compare :func:`membership` with the definition-level spans on every small TailSeq."""
    rep = Report("membership-closed-forms", {"p": p, "max_precision": max_N, "max_length": max_L})
    for N in range(1, max_N + 1):
        for L in range(0, min(N, max_L) + 1):
            pre, ws = all_tailseqs(p, N, L)
            seqs = [TailSeq(p, N, tuple(r), int(w)) for r, w in zip(pre.tolist(), ws.tolist())]
            spaces = [("E", None), ("D", None)] + [("E+pmC", m) for m in range(N + 1)]
            for kind, m in spaces:
                H = L if m is None else max(L, m)
                en = _model(p, N, L, H, _definition_generators(p, H, kind, m))
                coords = _model_coordinates(p, N, L, H, pre, ws)
                oracle = ~en.reduce_array(coords).any(axis=1)
                name = kind if m is None else f"E_plus_pmC({m})"
                closed = np.array([membership(s, name).member for s in seqs])
                bad = np.flatnonzero(closed != oracle)
                witness = {"N": N, "L": L, "space": name, "checked": len(seqs)}
                if len(bad):
                    s = seqs[int(bad[0])]
                    witness.update(mismatches=int(len(bad)), first=s.to_json(),
                                   closed_form=bool(closed[bad[0]]), definition=bool(oracle[bad[0]]))
                rep.check(f"N={N} L={L} {name}", not len(bad), witness)
    return rep
