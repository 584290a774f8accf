"""
Checking an AR(1) fit with the split-sample test.

The model is estimated on the first half of the series and the residuals
of the whole series are checked. A correctly specified AR(1) should pass;
the tent map, which is deterministic but looks like white noise to an
autocorrelation test, should be rejected.
"""
from splitgof import dgps, split_sample_test

for name in ("ar1", "temmap", "tar2"):
    y = dgps.simulate(name, 200, seed=1).values
    print(f"\n{name}: {dgps.REGISTRY[name].formula}")
    for weight in ("indicator", "cf"):
        out = split_sample_test(y, "ar:1", weight=weight, B=500, seed=1)
        verdict = "reject" if out.reject else "keep"
        print(f"  {weight:<9} D^2 = {out.statistic:8.4f}  p = {out.p_value:.3f}  -> {verdict}")
