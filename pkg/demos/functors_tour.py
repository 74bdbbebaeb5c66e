"""Gamma, Lambda and Delta on a few finitely generated groups, with the property flags."""

from contrakit.fpmod import FPModule
from contrakit.functors import check_properties, delta_s, gamma_s, lambda_s

modules = {
    "Z": FPModule.free(1),
    "Z/12": FPModule.cyclic(12),
    "Z + Z/18": FPModule.from_invariants(1, [18]),
}

for label, m in modules.items():
    for s in (2, 6):
        gamma, _ = gamma_s(m, s)
        delta, _ = delta_s(m, s)
        flags = check_properties(m, s).flags
        print(f"{label:10s} s={s}: Gamma = {gamma}, Lambda = {lambda_s(m, s)}, Delta = {delta}")
        print("    " + ", ".join(k for k, v in flags.items() if v))
