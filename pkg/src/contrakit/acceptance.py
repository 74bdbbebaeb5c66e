"""The acceptance suite: thirteen property and oracle checks, run at ``smoke`` or ``desk`` scale.

Every criterion returns a :class:`~contrakit.reports.Report`; failed checks
carry witnesses.  ``desk`` runs the full sizes, ``smoke`` a small subset for
quick feedback.
"""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass

from sympy import Matrix, divisors

from . import mutations
from .atoms.cotorsion import CORPUS, cotorsion_envelope, envelope_report, flat_cover_corpus
from .atoms.expr import AtomExpr, parse
from .atoms.matlis import all_p_groups, dual_sequence_report, duality_report, random_short_exact
from .atoms.rules import (
    build_flat_cotorsion, build_injective, build_reduced_cotorsion, classify, flags_atoms,
    normalize_form,
)
from .fpmod import FPModule, IntMatrix, enumerate_module, random_module
from .functors import check_properties, delta_s, gamma_routes, implication_violations
from .padlab.lab import counterexample_CE, run_scenario
from .padlab.summation import (
    NullSeqC, QuotientCmodE, ZpModPk, ZpScalar, check_axioms, check_two_variable,
    one_variable_carriers, solve_telescope, two_variable_carriers,
)
from .padlab.tailseq import verify_closed_forms
from .reports import Report

SCALES = ("smoke", "desk")
DEFAULT_SEED = 0

# finitely presented corpus: (rank, torsion invariants)
FP_CORPUS = (
    (0, ()), (1, ()), (2, ()), (0, (12,)), (0, (8,)), (0, (30,)), (1, (12,)), (1, (4,)),
    (0, (2, 4)), (0, (3, 9, 27)), (2, (6, 36)), (1, (2, 2, 8)), (0, (5, 25)), (3, (60,)),
)

ATOM_CORPUS = (
    "0", "Z", "Q", "Zp(2)", "Qp(3)", "Prufer(5)", "Z/8 + Z/9", "Zinv(6)", "Prod{all}[Zp^2]",
    "Q^2 + Prufer(2)^3", "Prod{all}[Zp^1] + Z/4", "Zp(3)^2 + Z/27", "Q + Zp(2)", "Z + Prufer(3)",
)


def _rng(seed: int, index: int) -> random.Random:
    return random.Random(1000 * seed + index)


def _size(scale: str, desk: int, smoke: int) -> int:
    return desk if scale == "desk" else smoke


# ---------------------------------------------------------------------------
# 1. SNF against enumeration


def criterion_1(seed: int, scale: str) -> Report:
    rng = _rng(seed, 1)
    count = _size(scale, 200, 20)
    rep = Report("snf-oracle", {"seed": seed, "matrices": count})
    finite = 0
    for t in range(count):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        rows = [[rng.randint(-30, 30) for _ in range(c)] for _ in range(r)]
        m = FPModule(IntMatrix.from_rows(rows, c))
        rank = Matrix(rows).rank()
        if m.rank != c - rank:
            rep.check(f"matrix {t}: free rank", False, {"rows": rows, "snf": m.rank, "sympy": c - rank})
        if not m.is_finite or m.order > 10**5:
            continue
        finite += 1
        en = enumerate_module(m, bound=10**5)
        ok = en.size == m.order
        bad = None
        for d in divisors(m.exponent):
            predicted = 1
            for inv in m.torsion:
                predicted *= _gcd(d, inv)
            counted = en.count_killed_by(d)
            if counted != predicted:
                ok, bad = False, {"k": d, "enumerated": counted, "predicted": predicted}
                break
        if en.exponent() != m.exponent:
            ok, bad = False, {"exponent": en.exponent(), "predicted": m.exponent}
        if not ok:
            rep.check(f"matrix {t}: enumeration", False,
                      {"rows": rows, "invariants": list(m.torsion), **(bad or {"order": en.size})})
    rep.check("every finite cokernel matches enumeration", not rep.failures(),
              {"finite_cokernels": finite})
    return rep


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


# ---------------------------------------------------------------------------
# 2-5. functors


def criterion_2(seed: int, scale: str) -> Report:
    rng = _rng(seed, 2)
    count = _size(scale, 100, 10)
    rep = Report("gamma-three-way", {"seed": seed, "modules": count})
    for t in range(count):
        m = random_module(rng)
        for s in (2, 3, 6, 12, 30):
            g = gamma_routes(m, s)
            if not g.agree:
                rep.check(f"module {t} s={s}", False, {"module": m.to_json(), "routes": asdict(g)})
    rep.check("all routes agree", not rep.failures(), {"cases": count * 5})
    return rep


def criterion_3(seed: int, scale: str) -> Report:
    rng = _rng(seed, 3)
    count = _size(scale, 100, 10)
    rep = Report("delta-primes-radical", {"seed": seed, "modules": count})
    for t in range(count):
        m = random_module(rng)
        d6, d2, d3, d12 = (delta_s(m, s)[0] for s in (6, 2, 3, 12))
        if d6 != d2 + d3:
            rep.check(f"module {t}: Delta_6 = Delta_2 + Delta_3", False,
                      {"module": m.to_json(), "Delta_6": str(d6), "sum": str(d2 + d3)})
        if d6 != d12:
            rep.check(f"module {t}: Delta_6 = Delta_12", False,
                      {"module": m.to_json(), "Delta_6": str(d6), "Delta_12": str(d12)})
    rep.check("prime decomposition and radical invariance", not rep.failures())
    return rep


def criterion_4(seed: int, scale: str) -> Report:
    rep = Report("lim1", {"seed": seed})
    corpus = FP_CORPUS if scale == "desk" else FP_CORPUS[:5]
    for rank, tors in corpus:
        m = FPModule.from_invariants(rank, tors)
        for s in (2, 3, 6, 12):
            cert = {}
            delta_s(m, s, cert)
            ok = cert["lim1"] == "0" and cert["lim1_certified"] and cert["agree"] \
                and cert["lambda_stable"] and cert["power_series_truncation"]
            if not ok:
                rep.check(f"{m} s={s}", False, cert)
    rep.check("lim^1 vanishes and Delta equals Lambda on the corpus", not rep.failures(),
              {"modules": len(corpus)})
    return rep


def _carrier_flags():
    """s-adic flags of the lab carriers from their computations."""
    out = {}
    for inst in (ZpScalar(2, 16), ZpModPk(5, 6), NullSeqC(2, 16), QuotientCmodE(2, 16)):
        tele = solve_telescope(inst, [inst.random(random.Random(0)) for _ in range(4)])
        solvable = tele.checks[0].passed
        unique = tele.checks[1].passed
        separated = unique
        if isinstance(inst, QuotientCmodE):
            separated = not counterexample_CE(2, 16, 12).passed
        out[inst.name] = {
            "torsion_free": not isinstance(inst, (ZpModPk, QuotientCmodE)),
            "divisible": False,
            "separated": separated,
            "complete": solvable,
            "contraadjusted": solvable,
            "contramodule": solvable and unique,
        }
    return out


def _atom_implications(x: AtomExpr) -> list[str]:
    f = flags_atoms(x)["flags"]
    bad = []
    if f["divisible"] and not f["cotorsion"]:
        bad.append("divisible => cotorsion")
    if f["divisible"] and f["reduced"] and not x.is_zero():
        bad.append("divisible and reduced => zero")
    return bad


def criterion_5(seed: int, scale: str) -> Report:
    rng = _rng(seed, 5)
    count = _size(scale, 60, 6)
    rep = Report("implication-diagram", {"seed": seed, "random_modules": count})
    mods = [FPModule.from_invariants(r, t) for r, t in FP_CORPUS]
    mods += [random_module(rng) for _ in range(count)]
    checked = 0
    for m in mods:
        for s in (0, 1, -1, 2, 6, 5):
            v = implication_violations(check_properties(m, s).flags)
            checked += 1
            if v:
                rep.check(f"{m} s={s}", False, {"violations": v})
    for text in ATOM_CORPUS:
        v = _atom_implications(parse(text))
        checked += 1
        if v:
            rep.check(f"atoms {text}", False, {"violations": v})
    for name, flags in _carrier_flags().items():
        v = implication_violations(flags)
        checked += 1
        if v:
            rep.check(f"carrier {name}", False, {"flags": flags, "violations": v})
    rep.check("no implication is violated", not rep.failures(), {"cases": checked})
    return rep


# ---------------------------------------------------------------------------
# 6-9. the sequence lab


def criterion_6(seed: int, scale: str) -> Report:
    rep = Report("ce-quotient", {"seed": seed})
    for p in (2, 3):
        sub = counterexample_CE(p, 16, 12)
        for c in sub.checks:
            rep.check(f"p={p}: {c.name}", c.passed, c.witness)
    gate = verify_closed_forms(2, 4 if scale == "desk" else 3, 4)
    bad = gate.failures()
    rep.check("membership closed forms agree with the definitions", not bad,
              bad[0].witness if bad else {"cases": len(gate.checks)})
    return rep


def criterion_7(seed: int, scale: str) -> Report:
    trials = _size(scale, 100, 5)
    rep = Report("summation-axioms", {"seed": seed, "precision": 24, "trials": trials})
    for inst in one_variable_carriers(24):
        for c in check_axioms(inst, trials, seed=seed).checks:
            rep.check(f"{inst.name}: {c.name}", c.passed, c.witness)
    for inst in two_variable_carriers(24):
        for c in check_two_variable(inst, trials, seed=seed).checks:
            rep.check(f"{inst.name}: {c.name}", c.passed, c.witness)
    return rep


def criterion_8(seed: int, scale: str) -> Report:
    return run_scenario("telescope", N=24, seed=seed, trials=_size(scale, 100, 10))


def criterion_9(seed: int, scale: str) -> Report:
    return run_scenario("nested-completion", p=2, K=12, seed=seed, trials=_size(scale, 20, 2))


# ---------------------------------------------------------------------------
# 10-12. atoms


def criterion_10(seed: int, scale: str) -> Report:
    rng = _rng(seed, 10)
    rep = Report("matlis", {"seed": seed})
    for p in (2, 3):
        groups = all_p_groups(p)
        if scale != "desk":
            groups = groups[:6]
        for t in groups:
            for c in duality_report(t).failures():
                rep.check(f"{t}: {c.name}", False, c.witness)
        for k in range(_size(scale, 50, 5)):
            incl, proj = random_short_exact(rng, p)
            for c in dual_sequence_report(incl, proj, p ** 4).failures():
                rep.check(f"p={p} sequence {k}: {c.name}", False, c.witness)
    rep.check("duality and exactness hold", not rep.failures())
    return rep


def criterion_11(seed: int, scale: str) -> Report:
    rng = _rng(seed, 11)
    rep = Report("cotorsion-corpus", {"seed": seed})
    for name in CORPUS:
        sub = flat_cover_corpus(name, 12)
        for c in sub.checks:
            rep.check(f"{name}: {c.name}", c.passed, c.witness)
    env = cotorsion_envelope(FPModule.cyclic(12))[0]
    rep.check("envelope of Z/12 is Z/4 + Z/3", str(env) == "Z/4 + Z/3", {"envelope": str(env)})
    for t in range(_size(scale, 50, 5)):
        m = random_module(rng)
        for c in envelope_report(m).failures():
            rep.check(f"module {t}: {c.name}", False, {"module": m.to_json(), "witness": c.witness})
    rep.check("random envelopes verified", True)
    return rep


def _random_primes(rng, k):
    return rng.sample([2, 3, 5, 7, 11, 13], k)


def criterion_12(seed: int, scale: str) -> Report:
    rng = _rng(seed, 12)
    count = _size(scale, 100, 10)
    rep = Report("classification-round-trip", {"seed": seed, "vectors": count})
    for t in range(count):
        data = {"X": rng.randint(0, 3),
                "X_p": {p: rng.randint(0, 3) for p in _random_primes(rng, rng.randint(0, 3))}}
        cases = [("injective", build_injective(data["X"], data["X_p"]), data)]
        fc = {"Q": rng.randint(0, 3), "all": rng.randint(0, 3),
              "ranks": {p: rng.randint(0, 3) for p in _random_primes(rng, rng.randint(0, 3))}}
        cases.append(("flat_cotorsion", build_flat_cotorsion(fc["Q"], fc["all"], fc["ranks"]), fc))
        factors = {}
        for p in _random_primes(rng, rng.randint(0, 3)):
            factors[p] = {"Zp": rng.randint(0, 2),
                          "cyclic": {k: rng.randint(0, 2) for k in rng.sample(range(1, 6), 2)}}
        rc = {"all": rng.randint(0, 3), "factors": factors}
        cases.append(("reduced_cotorsion", build_reduced_cotorsion(rc["all"], rc["factors"]), rc))
        for kind, x, d in cases:
            got = classify(x)
            ok = kind in got.forms and normalize_form(kind, got.forms[kind]) == normalize_form(kind, d)
            if not ok:
                rep.check(f"vector {t} {kind}", False,
                          {"built": str(x), "data": d, "classified": got.to_json()})
    rep.check("build then classify is the identity", not rep.failures())
    return rep


# ---------------------------------------------------------------------------
# 13. mutation sensitivity

MUTATION_TARGETS = {"psi_sign": 2, "binomial_index": 7, "e_membership_index": 6}


def criterion_13(seed: int, scale: str) -> Report:
    rep = Report("mutation-sensitivity", {"seed": seed})
    for name, index in MUTATION_TARGETS.items():
        with mutations.mutation(name):
            sub = CRITERIA[index][1](seed, "smoke")
        bad = sub.failures()
        rep.check(f"{name} breaks criterion {index}", bool(bad),
                  {"failing_check": bad[0].name, "witness": bad[0].witness} if bad else None)
    return rep


CRITERIA = {
    1: ("SNF oracle equivalence", criterion_1),
    2: ("Gamma_s three-way agreement", criterion_2),
    3: ("Delta prime decomposition and radical invariance", criterion_3),
    4: ("lim^1 sequence", criterion_4),
    5: ("implication diagram", criterion_5),
    6: ("counterexample C/E", criterion_6),
    7: ("summation axioms", criterion_7),
    8: ("telescope solver", criterion_8),
    9: ("nested completion", criterion_9),
    10: ("Matlis duality", criterion_10),
    11: ("cotorsion corpus", criterion_11),
    12: ("classification round trips", criterion_12),
    13: ("mutation sensitivity", criterion_13),
}


@dataclass
class CriterionResult:
    index: int
    name: str
    report: Report
    seconds: float

    @property
    def passed(self) -> bool:
        return self.report.passed

    def to_json(self, timing: bool = True):
        out = {"criterion": self.index, "name": self.name, "pass": self.passed,
               "report": self.report.to_json()}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def run_criterion(index: int, seed: int = DEFAULT_SEED, scale: str = "desk") -> CriterionResult:
    if scale not in SCALES:
        raise ValueError(f"scale must be one of {SCALES}")
    name, fn = CRITERIA[index]
    start = time.perf_counter()
    rep = fn(seed, scale)
    return CriterionResult(index, name, rep, time.perf_counter() - start)


def verify_all(seed: int = DEFAULT_SEED, scale: str = "desk", only=None) -> list[CriterionResult]:
    """Run every criterion (or those in ``only``) in index order."""
    indices = sorted(only) if only else sorted(CRITERIA)
    return [run_criterion(i, seed, scale) for i in indices]
