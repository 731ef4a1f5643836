# Degree-2 data with a quadratic constraint, and positivity certificates.
import numpy as np

from truncmoment.core import PreconditionError, moment_matrix
from truncmoment.fixtures import load_fixture
from truncmoment.quadratic import Mode, approx_sequence, decide_noncompact, eps_cert, eq_lemma_cert, split_quadratic
from truncmoment.sturm_zhang import sz_decompose

fx = load_fixture("parabola_singular")
y, q = fx.sequence, fx.constraint
print(moment_matrix(y).entries)

v = decide_noncompact(y, q, Mode.EQUALITY)
print(v.status)
for line in v.certificate:
    print("  ", line)

# the rank-one splitting leaves a term with no point mass: its direction is (0, 0, 1)
dec = sz_decompose(moment_matrix(y).entries, split_quadratic(q).matrix)
print(np.round(dec.vectors, 6))

# replace it by a small weight far out on the parabola
for j in range(1, 6):
    s = approx_sequence(y, q, Mode.EQUALITY, 4.0 ** -j)
    print(f"eps=4^-{j}  deviation={s.deviation:.5f}  rate={s.rate_constant:.3f}  far atom {np.round(s.witness.atoms[-1], 3)}")

# f = x1 x2 on {-x1^2 = 0}: f vanishes there, but no multiplier exists
cx = load_fixture("slemma_no_positive_point")
f, g = split_quadratic(cx.objective), split_quadratic(cx.constraint)
try:
    eq_lemma_cert(f, g)
except PreconditionError as exc:
    print("equality lemma:", exc)
for eps in (1.0, 0.1, 0.01):
    c = eps_cert(f, g, Mode.EQUALITY, eps)
    print(f"eps={eps}: feasible={c.feasible} t={c.t:.4g}")
