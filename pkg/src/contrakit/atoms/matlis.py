"""Duality ``T -> Hom(T, Q_p/Z_p)`` for finite p-groups.

A finite p-group of exponent ``p^K`` maps into ``Q_p/Z_p`` only through
``Z/p^K``, so the dual is ``Hom(T, Z/p^K)``.  Homomorphisms are
enumerated as vectors ``h`` (the images of the generators) with
``R h = 0 mod p^K``.

    >>> from contrakit.fpmod import FPModule
    >>> print(matlis_dual(FPModule.from_invariants(0, [2, 4])))
    Z/2 + Z/4
"""

from __future__ import annotations

import numpy as np
from sympy import factorint

from ..fpmod import (
    FPModule, IntMatrix, Morphism, cokernel, enumerate_module, hom, kernel, represent_randomly,
    subgroup,
)
from ..reports import Report


class NotPPrimary(ValueError):
    pass


def prime_of(t: FPModule) -> int | None:
    """The prime of a nonzero finite p-group; ``None`` for the zero group."""
    if not t.is_finite:
        raise NotPPrimary(f"{t} is infinite")
    if t.is_zero():
        return None
    primes = factorint(t.order)
    if len(primes) != 1:
        raise NotPPrimary(f"{t} is not a p-group")
    return next(iter(primes))


def exponent_valuation(t: FPModule, p: int) -> int:
    return factorint(t.exponent).get(p, 0)


def matlis_dual(t: FPModule) -> FPModule:
    p = prime_of(t)
    if p is None:
        return FPModule.zero()
    return hom(t, FPModule.cyclic(p ** exponent_valuation(t, p)))


def hom_vectors(x: FPModule, q: int) -> np.ndarray:
    """Every homomorphism ``x -> Z/q`` as the row of generator images."""
    g = x.ngens
    if g == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*(np.arange(q, dtype=np.int64) for _ in range(g)), indexing="ij")
    cand = np.stack([a.ravel() for a in grids], axis=1)
    rel = np.array([[c % q for c in r] for r in x.presentation.entries], dtype=np.int64).reshape(-1, g)
    ok = ~((cand @ rel.T) % q).any(axis=1) if rel.size else np.ones(len(cand), dtype=bool)
    return cand[ok]


def hom_generators(x: FPModule, q: int) -> list[list[int]]:
    """Generators of ``Hom(x, Z/q)`` as a subgroup of ``(Z/q)^g``: the kernel of ``R^T``."""
    g = x.ngens
    cube = FPModule.from_invariants(0, [q] * g) if g else FPModule.zero()
    r = x.presentation.rows
    if r == 0:
        return [list(v) for v in IntMatrix.identity(g).entries]
    target = FPModule.from_invariants(0, [q] * r)
    rt = x.presentation.transpose()
    _, incl = kernel(Morphism(cube, target, rt, check=False))
    return [[c % q for c in row] for row in incl.matrix.entries]


def _encode(vecs: np.ndarray, q: int) -> np.ndarray:
    out = np.zeros(len(vecs), dtype=np.int64)
    for j in range(vecs.shape[1]):
        out = out * q + (vecs[:, j] % q)
    return out


def _generated_size(gens, q: int, g: int) -> int:
    """Size of the subgroup of ``(Z/q)^g`` generated by ``gens``, by closure."""
    seen = {0}
    gens = [np.array(v, dtype=np.int64) % q for v in gens]
    members = np.zeros((1, g), dtype=np.int64)
    while True:
        new = []
        for v in gens:
            cand = (members + v) % q
            codes = _encode(cand, q)
            for code, row in zip(codes.tolist(), cand):
                if code not in seen:
                    seen.add(code)
                    new.append(row)
        if not new:
            return len(seen)
        members = np.array(new)


def duality_report(t: FPModule) -> Report:
    """Enumeration checks: the dual count, invariants, and the double-dual evaluation map."""
    rep = Report("matlis-dual", {"module": str(t)})
    p = prime_of(t)
    if p is None:
        rep.check("zero dual", matlis_dual(t).is_zero())
        return rep
    q = p ** exponent_valuation(t, p)
    dual = matlis_dual(t)
    homs = hom_vectors(t, q)
    rep.check("dual order equals homomorphism count", dual.order == len(homs),
              {"symbolic": dual.order, "enumerated": len(homs)})
    rep.check("dual has the same invariants", dual.invariants == t.invariants,
              {"dual": str(dual), "input": str(t)})
    gens = hom_generators(t, q)
    codes = set(_encode(homs, q).tolist())
    in_set = all(int(_encode(np.array([g]), q)[0]) in codes for g in gens)
    if len(homs) <= 20000:
        size = _generated_size(gens, q, t.ngens)
    else:  # closure by brute force is too slow here; use the subgroup order instead
        size = subgroup(FPModule.from_invariants(0, [q] * t.ngens), gens)[0].order
    rep.check("kernel generators span the enumerated homomorphisms", in_set and size == len(homs),
              {"generated": size})
    en = enumerate_module(t)
    elems = en.element_array()
    values = (elems @ np.array(gens, dtype=np.int64).T) % q
    killed = int(np.count_nonzero(~values.any(axis=1)))
    rep.check("evaluation map into the double dual is injective", killed == 1,
              {"elements_killed_by_every_functional": killed})
    double = hom_vectors(dual, q)
    rep.check("double dual has the order of the input", len(double) == en.size,
              {"double_dual": len(double), "input": en.size})
    return rep


def dual_sequence_report(a_incl: Morphism, proj: Morphism, q: int) -> Report:
    """Exactness of ``0 -> C* -> B* -> A* -> 0`` for ``0 -> A -> B -> C -> 0``, by enumeration.

    ``a_incl: A -> B`` and ``proj: B -> C``; every module is a p-group
    killed by ``q``.
    """
    rep = Report("dual-sequence", {"A": str(a_incl.source), "B": str(a_incl.target),
                                   "C": str(proj.target), "q": q})
    ha = hom_vectors(a_incl.source, q)
    hb = hom_vectors(a_incl.target, q)
    hc = hom_vectors(proj.target, q)
    fmat = np.array(a_incl.matrix.entries, dtype=np.int64).reshape(a_incl.source.ngens, -1)
    gmat = np.array(proj.matrix.entries, dtype=np.int64).reshape(proj.source.ngens, -1)
    g_star = (hc @ gmat.T) % q if len(gmat) else np.zeros((len(hc), 0), np.int64)
    f_star = (hb @ fmat.T) % q if len(fmat) else np.zeros((len(hb), 0), np.int64)
    gs = _encode(g_star, q)
    rep.check("C* -> B* injective", len(set(gs.tolist())) == len(hc))
    ker_f = hb[~f_star.any(axis=1)] if f_star.shape[1] else hb
    rep.check("image equals kernel at B*", set(gs.tolist()) == set(_encode(ker_f, q).tolist()),
              {"image": len(set(gs.tolist())), "kernel": len(ker_f)})
    rep.check("B* -> A* surjective",
              set(_encode(f_star, q).tolist()) == set(_encode(ha, q).tolist()),
              {"image": len(set(_encode(f_star, q).tolist())), "A*": len(ha)})
    return rep


def random_p_group(rng, p: int, max_gens: int = 3, max_exp: int = 4) -> FPModule:
    exps = sorted(rng.randint(1, max_exp) for _ in range(rng.randint(1, max_gens)))
    return represent_randomly(FPModule.from_invariants(0, [p ** e for e in exps]), rng)


def all_p_groups(p: int, max_gens: int = 3, max_exp: int = 4):
    """Every p-group with at most ``max_gens`` generators and exponent at most ``p^max_exp``."""
    out = [FPModule.zero()]

    def rec(prefix, lo):
        if prefix:
            out.append(FPModule.from_invariants(0, [p ** e for e in prefix]))
        if len(prefix) < max_gens:
            for e in range(lo, max_exp + 1):
                rec(prefix + [e], e)

    rec([], 1)
    return out


def random_short_exact(rng, p: int):
    """``(A -> B, B -> C)`` with ``A`` the subgroup of a random p-group spanned by random elements."""
    b = random_p_group(rng, p)
    gens = [[rng.randrange(0, p ** 4) for _ in range(b.ngens)] for _ in range(rng.randint(1, 2))]
    a, incl = subgroup(b, gens)
    c, proj = cokernel(incl)
    return incl, proj
