# Moment data on the cubic curve x2 = x1^3, sitting exactly on the boundary s = psi.
from fractions import Fraction

from truncmoment.curve_psi import (compression_is_pd, curve_approx_sequence, curve_measure_test, curve_witness, psi,
                                   s_window, t_floor, verify_curve_witness)
from truncmoment.fixtures import load_fixture

m = load_fixture("curve_boundary").curve
print("s   =", m.s)
print("psi =", psi(m))                     # exact fraction, same as s
print("verdict:", curve_measure_test(m)[0])

# psi does not involve s or t
for t in (11319100143, 12 * 10**9, 10**11):
    print("t =", t, " psi unchanged:", psi(m.with_values(t=t)) == m.s)

# J > 0 needs t above a floor that moves with s; at the stored t the window in s is tiny
print("t floor:", float(t_floor(m)))
print("s window:", s_window(m))

# so push s up by 1/m only after raising t
big = m.with_values(t=12 * 10**9)
for step in curve_approx_sequence(big, [10, 100, 1000]):
    print(f"m={step.m:5d}  |y_m - y| = {step.deviation}  {step.verdict}")

# one of them, with its 10-atom measure on the curve
y1 = big.with_values(s=big.s + Fraction(1, 100))
mu = curve_witness(y1)
check = verify_curve_witness(y1, mu)
print(len(mu), "atoms; deviation relative to the largest moment:", check.max_abs_deviation / float(y1.t), check.passed)

# the printed base data never gets this far: its compression is indefinite
base = load_fixture("curve_catalan").curve
print("base data usable:", compression_is_pd(base))
