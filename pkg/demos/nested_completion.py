"""Limit of the partial sums of the geometric series in px, computed inside Z[x]/(p, x)^8."""

from contrakit.padlab.tower import TowerElement, nested_completion

K = 8
px = TowerElement.from_coeffs(2, K, [0, 2])
powers = [TowerElement.one(2, K)]
for _ in range(K):
    powers.append(powers[-1] * px)

c = [sum((powers[k] for k in range(1, K) if 2 * k < n), powers[0]) for n in range(1, K + 1)]
rep = nested_completion(c)
print("limit b =", rep.data["b"])
for check in rep.checks:
    print(f"  {'ok' if check.passed else 'FAILED'}: {check.name}")
