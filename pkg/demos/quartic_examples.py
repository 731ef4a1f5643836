# Bivariate quartic data: one hopeless case, one fixable by perturbation, one definite case.
import numpy as np

from truncmoment.core import moment_matrix, verify_measure
from truncmoment.fixtures import definite_quartic_instance, load_fixture
from truncmoment.quartic import decide_quartic, quartic_approx, recursive_check

# rank 4 but only 3 points on the variety: no measure
y = load_fixture("quartic_rank_gap").sequence
v = decide_quartic(y)
print(v.status, v.certificate[-1])

# it is still a limit of measure-bearing data
step = quartic_approx(y, 1 / 16)
print("nearby data, deviation", round(step.deviation, 4), "with", len(step.witness), "atoms")

# X1 = 1 holds but X1^2 = X1 does not: not recursively generated
y = load_fixture("quartic_ones_twos").sequence
rc = recursive_check(moment_matrix(y))
print("recursive:", rc.passed, " violation:", rc.violation[0], "times", rc.violation[1])

# one atom walks off to infinity along (1, 1) and supplies the missing quartic moments
for eps in (1 / 16, 1 / 256, 1 / 4096):
    s = quartic_approx(y, eps)
    print(f"eps={eps:<10g} deviation={s.deviation:.4f}  far atom {np.round(s.witness.atoms[-1], 3)}")

# positive definite M2: a measure exists; flat_search usually finds six atoms
y = definite_quartic_instance(10)
v = decide_quartic(y)
print(v.status, "atoms:", 0 if v.measure is None else len(v.measure))
if v.measure is not None:
    print("verified:", verify_measure(y, v.measure).passed)
