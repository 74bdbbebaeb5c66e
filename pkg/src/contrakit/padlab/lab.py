"""Named experiments over the sequence spaces, summation carriers and the ``(p, x)`` tower.

Each scenario returns a :class:`~contrakit.reports.Report`:

    >>> counterexample_CE(2, 16, 12).passed
    True
"""

from __future__ import annotations

import random

from ..reports import Report
from .summation import (
    DEFAULT_SEED, NullSeqC, QuotientCmodE, ZpModPk, ZpScalar, check_axioms, check_two_variable,
    one_variable_carriers, solve_telescope, two_variable_carriers,
)
from .tailseq import TailSeq, membership
from .tower import TowerElement, nakayama_trace, nested_completion, random_cauchy


def counterexample_CE(p: int, N: int, M: int) -> Report:
    """``C/E`` is not ``p``-separated: the class of ``sum p^n e_n`` is a nonzero element of every ``p^m(C/E)``.

    Nonzeroness is witnessed in the TailSeq model (the tail coefficient of
    the representative is 1) at each depth ``m <= M``; no finite procedure
    over the whole of ``C/E`` is claimed.
    """
    if not N > M:
        raise ValueError("the precision N must exceed the depth M")
    rep = Report("ce-quotient", {"p": p, "precision": N, "depth": M})
    quotient = QuotientCmodE(p, N)
    zero = quotient.zero()
    killed = [n for n in range(M + 1)
              if not (membership(TailSeq.unit(p, N, n).scale(p ** n), "E")
                      and quotient.eq(quotient.s_power(n, TailSeq.unit(p, N, n)), zero))]
    rep.check("p^n e_n lies in E, so p^n b_n = 0 in C/E", not killed,
              {"failing_n": killed, "checked": M + 1})
    total = NullSeqC(p, N).sum_diagonal([], 1)
    expected = TailSeq.geometric(p, N, 1)
    rep.check("sum p^n e_n is the sequence (p^n)", total == expected, {"sum": total})
    partial = zero
    for n in range(N):
        partial = partial + TailSeq.unit(p, N, n).scale(p ** n)
    agree = all(partial.entry(k) == total.entry(k) for k in range(2 * N))
    rep.check("partial sums agree entrywise modulo p^N", agree, {"partial": partial})
    in_e = membership(total, "E")
    rep.check("representative is not in E (the class is nonzero)", not in_e, in_e.witness)
    rep.check("representative lies in D", membership(total, "D").member)
    depths = [m for m in range(M + 1) if not membership(total, f"E_plus_pmC({m})")]
    expanded = [m for m in range(M + 1)
                if not membership(total.extend(m), f"E_plus_pmC({m})")]
    rep.check("representative lies in E + p^m C for every m <= M", not depths and not expanded,
              {"failing_m": depths, "failing_after_expansion": expanded})
    rep.data["scope"] = ("nonzeroness is decided in the TailSeq model, where the tail coefficient "
                         "carries the convergence condition; membership in p^m(C/E) is checked "
                         "separately at each depth m <= M")
    rep.data["representative"] = total
    return rep


def precision_monotonicity(seed: int = DEFAULT_SEED, trials: int = 20) -> Report:
    """Results at precision ``N`` reduced to ``N' < N`` match the results computed at ``N'``."""
    rng = random.Random(seed)
    rep = Report("precision-monotonicity", {"seed": seed, "trials": trials})
    bad = []
    for trial in range(trials):
        hi, lo = 16, rng.randint(4, 15)
        vals = [rng.randrange(2 ** hi) for _ in range(6)]
        a_hi = [ZpScalar(2, hi).zero() + v for v in vals]
        s_hi = solve_telescope(ZpScalar(2, hi), a_hi).data["b"]
        s_lo = solve_telescope(ZpScalar(2, lo), [ZpScalar(2, lo).zero() + v for v in vals]).data["b"]
        if [x.reduce(lo) for x in s_hi] != s_lo:
            bad.append({"trial": trial, "kind": "telescope"})
        c = random_cauchy(rng, 2, 10)
        b_hi = nested_completion(c).data["b"].reduce(lo if lo < 10 else 9)
        b_lo = nested_completion([x.reduce(b_hi.K) for x in c[: b_hi.K]]).data["b"]
        if b_hi != b_lo:
            bad.append({"trial": trial, "kind": "nested completion"})
        seq = NullSeqC(2, hi).random(rng)
        for space in ("E", "D", "E_plus_pmC(3)"):
            if seq.L <= lo and membership(seq, space).member and \
                    not membership(seq.reduce(lo), space).member:
                bad.append({"trial": trial, "kind": space})
    rep.check("reduction commutes with computation", not bad, bad[:3])
    return rep


def run_scenario(name: str, p: int = 2, N: int = 24, M: int = 12, K: int = 12,
                 seed: int = DEFAULT_SEED, trials: int = 100) -> Report:
    """Dispatch one named lab scenario."""
    if name == "axioms":
        rep = Report("axioms", {"p": p, "precision": N, "seed": seed})
        for inst in one_variable_carriers(N):
            sub = check_axioms(inst, trials, seed=seed)
            for c in sub.checks:
                rep.check(f"{inst.name}: {c.name}", c.passed, c.witness)
        return rep
    if name == "two-var":
        rep = Report("two-var", {"p": p, "precision": N, "seed": seed})
        for inst in two_variable_carriers(N):
            sub = check_two_variable(inst, trials, seed=seed)
            for c in sub.checks:
                rep.check(f"{inst.name}: {c.name}", c.passed, c.witness)
        return rep
    if name == "telescope":
        rng = random.Random(seed)
        rep = Report("telescope", {"p": p, "precision": N, "seed": seed, "trials": trials})
        carriers = [ZpScalar(p, N), ZpModPk(5, 6), NullSeqC(p, N)]
        for t in range(trials):
            inst = carriers[t % len(carriers)]
            a = [inst.random(rng) for _ in range(rng.randint(1, 10))]
            sub = solve_telescope(inst, a)
            for c in sub.checks:
                if not c.passed:
                    rep.check(f"trial {t} {inst.name}: {c.name}", False, c.witness)
        rep.check("every instance solved with zero residual and unique solution", not rep.checks)
        return rep
    if name == "nakayama":
        rng = random.Random(seed)
        return nakayama_trace(TowerElement.random(rng, p, 2 * K, power=K), K)
    if name == "ce-quotient":
        return counterexample_CE(p, N, M)
    if name == "nested-completion":
        rng = random.Random(seed)
        rep = Report("nested-completion", {"p": p, "precision": K, "seed": seed, "trials": trials})
        for t in range(trials):
            c = random_cauchy(rng, p, K)
            first = nested_completion(c)
            traded = nested_completion(c, random.Random(rng.random()), trades=2 * K)
            for ch in first.checks + traded.checks:
                if not ch.passed:
                    rep.check(f"trial {t}: {ch.name}", False, ch.witness)
            if first.data["b"] != traded.data["b"]:
                rep.check(f"trial {t}: b independent of the a-array", False,
                          {"b": first.data["b"], "b_traded": traded.data["b"]})
        rep.check("b = c_n mod I^n for all n, for every sequence and decomposition", not rep.checks)
        return rep
    raise KeyError(f"unknown lab scenario {name!r}")


SCENARIOS = ("axioms", "telescope", "two-var", "nakayama", "ce-quotient", "nested-completion")
