"""
Annual Wolf sunspot numbers, 1700-1979.

A constant mean and a low-order AR leave clear structure in the residuals.
The three-regime threshold model with Y_{t-2} as the threshold variable
does not.
"""
from splitgof import harness, load_sunspots

y = load_sunspots()
print(f"{len(y)} observations, mean {y.values.mean():.1f}")

models = ["const", "ar:5", "ar:10", "tar:11,10,10:d=2"]
table = harness.run_empirical(y, models, B=500, seed=0)
print(f"\n{'model':<18}{'test':<18}{'p-value':>8}")
for row in table:
    print(f"{row['model']:<18}{row['test']:<18}{row['p_value']:>8.3f}")
