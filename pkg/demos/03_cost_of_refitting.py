"""
Why splitting is cheap: the multiplier bootstrap never refits.

The full-sample fixed-design wild bootstrap has to re-estimate the model
for every bootstrap draw. For a three-regime threshold model that means
B grid searches, against a single one for the split scheme.
"""
import time

from splitgof import dgps, full_sample_fdwb_test, split_sample_test

y = dgps.simulate("tar3", 200, seed=2).values
model = "tar:1,1,1:d=1"

# compile the kernels once so the timings below are steady-state
split_sample_test(y, model, B=5)

t0 = time.perf_counter()
split = split_sample_test(y, model, B=500, seed=2)
t_split = time.perf_counter() - t0

t0 = time.perf_counter()
full = full_sample_fdwb_test(y, model, B=500, seed=2)
t_full = time.perf_counter() - t0

print(f"split-sample: p = {split.p_value:.3f} in {t_split:.3f}s")
print(f"full FDWB   : p = {full.p_value:.3f} in {t_full:.3f}s")
print(f"ratio       : {t_full / t_split:.0f}x")
