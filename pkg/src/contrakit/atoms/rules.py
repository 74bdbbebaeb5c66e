"""Rule tables between atoms: Hom, Delta, property flags and classification.

Every Hom entry carries a tag saying where it comes from.  Pairs the table
does not cover evaluate to :class:`Unknown`, which propagates through sums.

    >>> from contrakit.atoms.expr import parse
    >>> print(hom_atoms(parse("Zp(2)"), parse("Zp(3)")))
    0
    >>> print(hom_atoms(parse("Prufer(3)"), parse("Prufer(3)")))
    Zp(3)
    >>> hom_atoms(parse("Adele(1)"), parse("Z"))
    Unknown('Hom(Prod{all}[Zp^1], Z)')
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from sympy import nextprime

from .expr import Atom, AtomExpr, Q, Zp, Qp, Prufer, primes_of, sum_exprs


class AtomRuleMissing(LookupError):
    pass


@dataclass(frozen=True)
class Unknown:
    """A value the rule table does not determine."""

    what: str

    def __repr__(self):
        return f"Unknown({self.what!r})"

    def __str__(self):
        return f"Unknown[{self.what}]"


@dataclass(frozen=True)
class Rule:
    value: AtomExpr | Unknown
    tag: str


ADELE = "Adele"  # marker for the all-primes product block in rule lookups

E = AtomExpr.of
ZERO = AtomExpr.zero()


def _cyc(p, k):
    return E(Atom.cyclic(p, k))


def hom_rule(a, b) -> Rule:
    """Hom between two atoms; either side may be :data:`ADELE` (rank one block)."""
    if a == ADELE:
        return _hom_from_adele(b)
    if b == ADELE:
        return _hom_into_adele(a)
    k, bk = a.kind, b.kind
    if k == "Z":
        return Rule(E(b), "identity functor")
    if k == "Cyclic":
        if bk == "Cyclic":
            return Rule(_cyc(a.p, min(a.k, b.k)) if a.p == b.p else ZERO, "derived: elements killed by p^k")
        if bk == "Prufer":
            return Rule(_cyc(a.p, a.k) if a.p == b.p else ZERO, "derived: elements killed by p^k")
        return Rule(ZERO, "derived: torsion into torsion-free")
    if k == "Prufer":
        if bk == "Prufer":
            return Rule(E(Zp(a.p)) if a.p == b.p else ZERO,
                        "structure: Hom of injective hulls; Z_p = Hom(Q_p/Z_p, Q_p/Z_p)")
        if bk == "Cyclic":
            return Rule(ZERO, "derived: divisible into bounded")
        return Rule(ZERO, "derived: torsion into torsion-free")
    if k == "Q":
        if bk == "Q":
            return Rule(E(Q), "derived: Q-linear endomorphisms")
        if bk == "Qp":
            return Rule(E(b), "derived: Q-linear maps into a Q-vector space")
        if bk == "Prufer":
            return Rule(E(Qp(b.p)), "derived: Hom(Q, Q_p/Z_p) = Q_p")
        return Rule(ZERO, "structure: reduced iff Hom(Q, B) = 0")
    if k == "Zinv":
        s_primes = primes_of(a.p)
        if bk == "Q" or bk == "Qp":
            return Rule(E(b), "derived: torsion-free divisible target")
        if bk == "Z":
            return Rule(ZERO, "derived: Z has no nonzero s-divisible elements")
        if bk == "Zinv":
            ok = all(q in primes_of(b.p) for q in s_primes)
            return Rule(E(b) if ok else ZERO, "derived: s-divisible part of the target")
        if bk == "Zp":
            return Rule(ZERO if b.p in s_primes else E(b), "derived: p-adic separation / s invertible")
        if bk == "Cyclic":
            return Rule(ZERO if b.p in s_primes else E(b), "derived: s invertible on Z/p^k")
        if bk == "Prufer":
            if b.p in s_primes:
                return Rule(Unknown(f"Hom({a}, {b})"), "not covered")
            return Rule(E(b), "derived: s invertible on Q_p/Z_p")
    if k == "Zp":
        if bk == "Zp":
            return Rule(E(b) if a.p == b.p else ZERO, "structure: Hom(Z_p, Z_q) = 0 for p != q, Hom(Z_p, Z_p) = Z_p")
        if bk == "Cyclic":
            return Rule(_cyc(b.p, b.k) if a.p == b.p else ZERO, "derived: Z_p/p^k = Z/p^k; q-divisible otherwise")
        if bk in ("Z", "Zinv"):
            return Rule(ZERO, "derived: image divisible by every prime other than p")
        return Rule(Unknown(f"Hom({a}, {b})"), "not covered")
    if k == "Qp":
        if bk in ("Z", "Zinv", "Zp", "Cyclic"):
            return Rule(ZERO, "structure: reduced iff Hom(Q, B) = 0 (Q_p is divisible)")
        return Rule(Unknown(f"Hom({a}, {b})"), "not covered")
    raise AtomRuleMissing(f"no Hom rule for ({a}, {b})")


def _hom_from_adele(b) -> Rule:
    if b == ADELE:
        return Rule(AtomExpr(adele=1), "structure: Hom over maximal ideals, factorwise")
    if b.kind == "Zp":
        return Rule(E(b), "structure: Hom over maximal ideals, only the matching factor survives")
    if b.kind == "Cyclic":
        return Rule(E(b), "derived: complementary factor is p-divisible")
    return Rule(Unknown(f"Hom(Prod{{all}}[Zp^1], {b})"), "not covered")


def _hom_into_adele(a) -> Rule:
    k = a.kind
    if k == "Z":
        return Rule(AtomExpr(adele=1), "identity functor")
    if k in ("Cyclic", "Prufer", "Q", "Qp"):
        return Rule(ZERO, "derived: torsion or divisible into reduced torsion-free")
    if k == "Zp":
        return Rule(E(Zp(a.p)), "structure: Hom(Z_p, Z_q) = 0 for p != q, factorwise")
    return Rule(Unknown(f"Hom({a}, Prod{{all}}[Zp^1])"), "not covered")


def _pieces(x: AtomExpr):
    out = [(a, m) for a, m in x.terms]
    if x.adele:
        out.append((ADELE, x.adele))
    return out


def hom_atoms(a: AtomExpr, b: AtomExpr) -> AtomExpr | Unknown:
    """Bilinear expansion of the Hom table over finite sums."""
    parts = []
    for x, m in _pieces(a):
        for y, n in _pieces(b):
            v = hom_rule(x, y).value
            if isinstance(v, Unknown):
                return v
            parts.append(v.times(m * n))
    return sum_exprs(parts)


def hom_tags(a: AtomExpr, b: AtomExpr) -> list[str]:
    return [hom_rule(x, y).tag for x, _ in _pieces(a) for y, _ in _pieces(b)]


# ---------------------------------------------------------------------------
# Delta on atoms


def delta_p_atom(atom, p: int) -> AtomExpr:
    """``Delta_p`` of one atom (``ADELE`` is the rank-one all-primes block)."""
    if atom == ADELE:
        return E(Zp(p))
    k = atom.kind
    if k == "Z":
        return E(Zp(p))
    if k == "Cyclic":
        return E(atom) if atom.p == p else ZERO
    if k == "Zp":
        return E(atom) if atom.p == p else ZERO
    if k == "Zinv":
        return ZERO if p in primes_of(atom.p) else E(Zp(p))
    if k in ("Q", "Qp", "Prufer"):
        return ZERO
    raise AtomRuleMissing(f"no Delta_{p} rule for {atom}")


def delta_atoms(x: AtomExpr, s: int) -> AtomExpr:
    """``Delta_s`` of an atom expression: identity for 0, zero for units, else sum over primes of s."""
    s = abs(s)
    if s == 0:
        return x
    if s == 1:
        return ZERO
    parts = []
    for p in primes_of(s):
        for a, m in _pieces(x):
            parts.append(delta_p_atom(a, p).times(m))
    return sum_exprs(parts)


# ---------------------------------------------------------------------------
# property flags

_ATOM_FLAGS = {
    #            cotorsion reduced divisible flat
    "Z": (False, True, False, True),
    "Zinv": (False, True, False, True),
    "Zp": (True, True, False, True),
    "Q": (True, False, True, True),
    "Qp": (True, False, True, True),
    "Prufer": (True, False, True, False),
    "Cyclic": (True, True, False, False),
    ADELE: (True, True, False, True),
}
_FLAG_NAMES = ("cotorsion", "reduced", "divisible", "flat")


def _smallest_prime_not_dividing(s: int) -> int:
    q = 2
    while s % q == 0:
        q = nextprime(q)
    return q


def flags_atoms(x: AtomExpr) -> dict:
    """Cotorsion / reduced / divisible / flat flags with witnesses for failures."""
    flags = dict.fromkeys(_FLAG_NAMES, True)
    witnesses = {}
    for a, _ in _pieces(x):
        key = ADELE if a == ADELE else a.kind
        for name, val in zip(_FLAG_NAMES, _ATOM_FLAGS[key]):
            if not val and flags[name]:
                flags[name] = False
                witnesses[name] = _witness(name, a)
    return {"flags": flags, "witnesses": witnesses}


def _witness(name: str, a) -> str:
    label = "Prod{all}[Zp^1]" if a == ADELE else str(a)
    kind = ADELE if a == ADELE else a.kind
    if name == "cotorsion":
        q = _smallest_prime_not_dividing(a.p if kind == "Zinv" else 1)
        return (f"{label} -> Delta_{q}({label}) = {delta_p_atom(a, q)} is not surjective, "
                f"so Ext^1(Zinv({q}), {label}) != 0 with Zinv({q}) flat")
    if name == "reduced":
        return f"Hom(Q, {label}) = {hom_rule(Q, a).value} != 0"
    if name == "divisible":
        if kind in ("Zp", "Cyclic"):
            q = a.p
        elif kind == "Zinv":
            q = _smallest_prime_not_dividing(a.p)
        else:
            q = 2
        return f"multiplication by {q} is not surjective on {label}"
    if name == "flat":
        return f"{label} has torsion"
    return ""


# ---------------------------------------------------------------------------
# classification normal forms


@dataclass
class Classification:
    kind: str
    forms: dict = field(default_factory=dict)
    failing: dict = field(default_factory=dict)

    def to_json(self):
        return {"kind": self.kind, "forms": self.forms, "failing": self.failing}


def classify(x: AtomExpr) -> Classification:
    """Normal forms of injective, flat cotorsion and reduced cotorsion groups.

    ``injective``: ``{"X": a, "X_p": {p: b_p}}`` for ``Q^a + sum Prufer(p)^b_p``.
    ``flat_cotorsion``: ``{"Q": a, "all": r, "ranks": {p: r_p}}`` for
    ``Q^a + Prod{all}[Zp^r] + sum Zp(p)^r_p``.
    ``reduced_cotorsion``: ``{"all": r, "factors": {p: {"Zp": r_p, "cyclic": {k: m}}}}``.
    """
    info = flags_atoms(x)
    flags = info["flags"]
    if not flags["cotorsion"]:
        return Classification("NotInClass", failing={"cotorsion": info["witnesses"]["cotorsion"]})
    if any(a.kind == "Qp" for a, _ in x.terms):
        return Classification("NotInClass", failing={
            "finite multiplicity": "Q_p is a Q-vector space of infinite dimension"})
    forms = {}
    if flags["divisible"]:
        forms["injective"] = {
            "X": x.mult(Q),
            "X_p": {a.p: m for a, m in x.terms if a.kind == "Prufer"},
        }
    if flags["flat"]:
        forms["flat_cotorsion"] = {
            "Q": x.mult(Q),
            "all": x.adele,
            "ranks": {a.p: m for a, m in x.terms if a.kind == "Zp"},
        }
    if flags["reduced"]:
        factors = {}
        for a, m in x.terms:
            f = factors.setdefault(a.p, {"Zp": 0, "cyclic": {}})
            if a.kind == "Zp":
                f["Zp"] += m
            else:
                f["cyclic"][a.k] = f["cyclic"].get(a.k, 0) + m
        forms["reduced_cotorsion"] = {"all": x.adele, "factors": factors}
    divisible = AtomExpr({a: m for a, m in x.terms if a.kind in ("Q", "Prufer")})
    reduced = AtomExpr({a: m for a, m in x.terms if a.kind not in ("Q", "Prufer")}, x.adele)
    forms["cotorsion"] = {"divisible": str(divisible), "reduced": str(reduced)}
    for kind in ("injective", "flat_cotorsion", "reduced_cotorsion"):
        if kind in forms:
            return Classification(kind, forms)
    return Classification("cotorsion", forms)


def build_injective(X: int, X_p: dict) -> AtomExpr:
    return AtomExpr(Counter({Q: X, **{Prufer(p): b for p, b in X_p.items()}}))


def build_flat_cotorsion(q_rank: int, all_rank: int, ranks: dict) -> AtomExpr:
    return AtomExpr(Counter({Q: q_rank, **{Zp(p): r for p, r in ranks.items()}}), all_rank)


def build_reduced_cotorsion(all_rank: int, factors: dict) -> AtomExpr:
    c = Counter()
    for p, f in factors.items():
        c[Zp(p)] += f.get("Zp", 0)
        for k, m in f.get("cyclic", {}).items():
            c[Atom.cyclic(p, k)] += m
    return AtomExpr(c, all_rank)


def normalize_form(kind: str, data: dict) -> dict:
    """Drop zero multiplicities so that forms compare structurally."""
    if kind == "injective":
        return {"X": data["X"], "X_p": {p: b for p, b in data["X_p"].items() if b}}
    if kind == "flat_cotorsion":
        return {"Q": data["Q"], "all": data["all"],
                "ranks": {p: r for p, r in data["ranks"].items() if r}}
    if kind == "reduced_cotorsion":
        out = {}
        for p, f in data["factors"].items():
            cyc = {k: m for k, m in f.get("cyclic", {}).items() if m}
            if f.get("Zp", 0) or cyc:
                out[p] = {"Zp": f.get("Zp", 0), "cyclic": cyc}
        return {"all": data["all"], "factors": out}
    raise KeyError(kind)

