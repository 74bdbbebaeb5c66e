"""The quotient C/E is not p-separated: print the checks for p = 2 and p = 3."""

from contrakit.padlab.lab import counterexample_CE

for p in (2, 3):
    rep = counterexample_CE(p, 16, 12)
    print(f"p = {p}: {'pass' if rep.passed else 'FAIL'}")
    for check in rep.checks:
        print(f"  [{'x' if check.passed else ' '}] {check.name}")
    print(f"  representative: {rep.data['representative']}")
