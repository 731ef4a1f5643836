"""Command-line front end.

Output is line-oriented ``key: value``.  Exit codes: 0 a measure was built
or is known to exist, 1 no measure, 2 no measure but approximable, 3
inconclusive (heuristic failure or construction unavailable), 64 bad input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import curve_psi, fixtures
from .core import (AtomicMeasure, MomentError, MomentSequence, NoMeasureError, PreconditionError, Status,
                   ToleranceConfig, Verdict, moments_of_measure, verify_measure)
from .fileio import (FileFormatError, ProblemFile, format_measure, format_number, format_sequence, parse_number,
                     read_measure, read_problem)
from .quadratic import (ApproximationError, Mode, approx_sequence, decide_noncompact, eps_cert, eq_lemma_cert,
                        s_lemma_cert, solve_degree1, solve_unconstrained, split_quadratic)
from .quartic import cubic_solve, decide_quartic, decide_univariate, quartic_approx

EXIT_OK, EXIT_NO, EXIT_APPROX, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3, 64

SUPPORTED = """supported inputs:
  any n, k = 1                          degree-one data
  any n, k = 2                          quadratic data, optional quadratic constraint
  n = 1, even k                         univariate data
  n = 2, k = 3                          bivariate cubic data
  n = 2, k = 4                          bivariate quartic data
  n = 2, k = 6 with X2 = X1^3           cubic-curve data"""

_EXIT = {Status.MEASURE_CONSTRUCTED: EXIT_OK, Status.EXISTS_NONCONSTRUCTIVE: EXIT_OK, Status.NO_MEASURE: EXIT_NO,
         Status.APPROXIMABLE_ONLY: EXIT_APPROX, Status.INCONCLUSIVE: EXIT_INCONCLUSIVE}


class ScopeError(MomentError):
    pass


def _emit(out, key, value):
    print(f"{key}: {value}", file=out)


def _cfg(args) -> ToleranceConfig:
    kw = {}
    if args.tol_psd is not None:
        kw.update(psd_tol=args.tol_psd, rank_tol=args.tol_psd)
    if args.tol_moment is not None:
        kw.update(moment_tol=args.tol_moment)
    return ToleranceConfig(**kw)


def _is_curve(pf: ProblemFile) -> bool:
    if (pf.n, pf.k) != (2, 6) or pf.constraint is not None:
        return False
    try:
        curve_psi.curve_from_values(pf.values, pf.values[(0, 0)])
    except (PreconditionError, ZeroDivisionError):
        return False
    return True


def _curve(pf: ProblemFile, exact: bool):
    m = curve_psi.curve_from_values(pf.values, pf.values[(0, 0)])
    if not exact:
        m = curve_psi.CubicCurveMoments({c: float(v) for c, v in m.values.items()})
    return m, pf.values[(0, 0)]


# -- decision dispatch ------------------------------------------------------------


def _decide_curve(pf: ProblemFile, args, cfg) -> Verdict:
    m, y00 = _curve(pf, exact=pf.exact or args.exact)
    diag: dict = {}
    if not curve_psi.compression_is_pd(m, cfg):
        return Verdict(Status.NO_MEASURE, certificate=[
            "relation X2 = X1^3 holds but the compression J is not positive definite (M is not PSD with rank 9)"],
            diagnostics=diag)
    verdict, value = curve_psi.curve_measure_test(m, cfg)
    diag.update(psi=value, s=m.s, curve=str(verdict))
    if verdict is curve_psi.CurveVerdict.NO_MEASURE:
        return Verdict(Status.NO_MEASURE, certificate=["s < psi: no measure on the curve x2 = x1^3"], diagnostics=diag)
    if verdict is curve_psi.CurveVerdict.BOUNDARY:
        return Verdict(Status.APPROXIMABLE_ONLY, certificate=[
            "s = psi: no measure, but s + 1/m gives measures converging to y"], approximable=True, diagnostics=diag)
    cert = ["s > psi: a measure on the curve x2 = x1^3 exists"]
    try:
        mu = curve_psi.curve_witness(m, float(y00), cfg)
    except PreconditionError as exc:
        return Verdict(Status.EXISTS_NONCONSTRUCTIVE, certificate=cert + [f"witness construction failed: {exc}"],
                       diagnostics=diag)
    if verify_measure(pf.sequence(), mu, cfg).passed:
        return Verdict(Status.MEASURE_CONSTRUCTED, mu, cert + ["atoms from the flat parameter Hankel extension"],
                       diagnostics=diag)
    return Verdict(Status.EXISTS_NONCONSTRUCTIVE, certificate=cert + ["witness failed verification"], diagnostics=diag)


def decide(pf: ProblemFile, args, cfg) -> Verdict:
    if pf.k is None:
        raise ScopeError("file carries no moments (use the 'cert' command for polynomial files)")
    y = pf.sequence()
    n, k = pf.n, pf.k
    if pf.constraint is not None:
        if k != 2:
            raise ScopeError("constraints are supported for degree-2 data only")
        q = split_quadratic(pf.constraint_poly())
        return decide_noncompact(y, q, Mode(args.mode), cfg)
    if k == 1:
        try:
            mu = solve_degree1(y)
        except NoMeasureError as exc:
            return Verdict(Status.NO_MEASURE, certificate=[str(exc)])
        return Verdict(Status.MEASURE_CONSTRUCTED, mu, ["y_0 > 0: one atom at the normalized first moments"])
    if k == 2:
        try:
            mu = solve_unconstrained(y, cfg)
        except (NoMeasureError, PreconditionError) as exc:
            return Verdict(Status.NO_MEASURE, certificate=[str(exc)])
        return Verdict(Status.MEASURE_CONSTRUCTED, mu, ["M1(y) PSD: rank-many atoms from an equal-value rank-one split"])
    if n == 1 and k % 2 == 0:
        return decide_univariate(y, cfg)
    if n == 2 and k == 3:
        return cubic_solve(y, cfg, args.seed)
    if n == 2 and k == 4:
        return decide_quartic(y, cfg, args.seed)
    if _is_curve(pf):
        return _decide_curve(pf, args, cfg)
    raise ScopeError(f"n={n}, k={k} is out of implemented scope\n{SUPPORTED}")


def _print_verdict(v: Verdict, out):
    _emit(out, "status", v.status)
    _emit(out, "approximable", "yes" if v.approximable else "no")
    for line in v.certificate:
        _emit(out, "reason", line)
    for key, val in v.diagnostics.items():
        _emit(out, key, format_number(val) if isinstance(val, (float, Fraction)) else val)
    if v.measure is not None:
        _emit(out, "atoms", len(v.measure))
        for w, u in zip(v.measure.weights, v.measure.atoms):
            _emit(out, "atom", " ".join(format_number(x) for x in (w, *u)))


def cmd_decide(args, out) -> int:
    cfg = _cfg(args)
    v = decide(read_problem(args.input), args, cfg)
    _print_verdict(v, out)
    return _EXIT[v.status]


def cmd_solve(args, out) -> int:
    cfg = _cfg(args)
    pf = read_problem(args.input)
    v = decide(pf, args, cfg)
    if v.measure is None:
        _print_verdict(v, out)
        return EXIT_INCONCLUSIVE if v.status is Status.EXISTS_NONCONSTRUCTIVE else _EXIT[v.status]
    check = verify_measure(pf.sequence(), v.measure, cfg)
    _emit(out, "status", v.status)
    _emit(out, "max_abs_deviation", format_number(check.max_abs_deviation))
    if not check.passed:
        _emit(out, "error", "constructed measure failed verification; nothing written")
        return EXIT_INCONCLUSIVE
    text = format_measure(v.measure)
    if args.out:
        Path(args.out).write_text(text)
        _emit(out, "written", args.out)
    else:
        out.write(text)
    return EXIT_OK


# -- approximation ------------------------------------------------------------------


def _parse_list(text: str, kind):
    try:
        vals = [kind(parse_number(t)) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise FileFormatError(str(exc)) from None
    return vals


def _write_pair(args, idx: int, y: MomentSequence, mu: AtomicMeasure | None, constraint=None, out=None):
    if not args.out_dir:
        return
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    (d / f"instance_{idx}.txt").write_text(format_sequence(y, constraint))
    if mu is not None:
        (d / f"witness_{idx}.txt").write_text(format_measure(mu))


def _approx_curve(pf, args, cfg, out) -> int:
    if not args.m_list:
        raise FileFormatError("cubic-curve data takes --m-list")
    exact = pf.exact or args.exact
    m, y00 = _curve(pf, exact)
    if not curve_psi.compression_is_pd(m, cfg):
        _emit(out, "error", "the compression J is not positive definite")
        return EXIT_INCONCLUSIVE
    verdict, value = curve_psi.curve_measure_test(m, cfg)
    _emit(out, "psi", format_number(value))
    _emit(out, "curve", verdict)
    steps = curve_psi.curve_approx_sequence(m, [int(v) for v in _parse_list(args.m_list, int)], cfg)
    code = EXIT_OK
    for i, st in enumerate(steps, 1):
        mu = None
        if st.in_window and st.verdict is curve_psi.CurveVerdict.HAS_MEASURE:
            try:
                mu = curve_psi.curve_witness(st.moments, float(y00), cfg)
            except PreconditionError:
                mu = None
        status = st.verdict if st.in_window else "outside positivity window"
        _emit(out, f"step {i}", f"m={st.m} deviation={format_number(st.deviation * y00)} verdict={status}"
                                + ("" if mu is None else f" witness_atoms={len(mu)}"))
        if not st.in_window:
            code = EXIT_INCONCLUSIVE
        _write_pair(args, i, st.moments.to_sequence(float(y00)), mu)
    return code


def cmd_approx(args, out) -> int:
    cfg = _cfg(args)
    pf = read_problem(args.input)
    if pf.k is None:
        raise ScopeError("file carries no moments")
    if _is_curve(pf):
        return _approx_curve(pf, args, cfg, out)
    if not args.eps:
        raise FileFormatError("give --eps (or --m-list for cubic-curve data)")
    eps_list = _parse_list(args.eps, float)
    if any(e <= 0 or e >= 1 for e in eps_list):
        raise FileFormatError("every eps must lie in (0, 1)")
    y = pf.sequence()
    if pf.constraint is not None and pf.k == 2:
        q = split_quadratic(pf.constraint_poly())
        step = lambda e: approx_sequence(y, q, Mode(args.mode), e, cfg)
    elif (pf.n, pf.k) == (2, 4):
        v = decide_quartic(y, cfg, args.seed)
        if v.measure is not None:
            step = lambda e: _fixed(y, v.measure, e)
        else:
            step = lambda e: quartic_approx(y, e, cfg, args.seed)
    else:
        v = decide(pf, args, cfg)
        if v.measure is None:
            _emit(out, "error", f"no approximation scheme for this input ({v.status})")
            return EXIT_INCONCLUSIVE
        step = lambda e: _fixed(y, v.measure, e)
    code = EXIT_OK
    for i, e in enumerate(eps_list, 1):
        try:
            st = step(e)
        except NoMeasureError as exc:
            _emit(out, "error", f"not approximable: {exc}")
            return EXIT_INCONCLUSIVE
        except (ApproximationError, ValueError) as exc:
            _emit(out, f"step {i}", f"eps={format_number(e)} failed: {exc}")
            code = EXIT_INCONCLUSIVE
            continue
        check = verify_measure(st.perturbed, st.witness, cfg)
        _emit(out, f"step {i}", f"eps={format_number(e)} deviation={format_number(st.deviation)} "
                                f"rate={format_number(st.rate_constant)} witness_atoms={len(st.witness)} "
                                f"witness_deviation={format_number(check.max_abs_deviation)}")
        _write_pair(args, i, st.perturbed, st.witness, pf.constraint_poly())
    return code


def _fixed(y, mu, e):
    from .quadratic import ApproxStep
    return ApproxStep(e, y, mu, 0.0, 0.0, 0)


# -- psi, verify, cert ------------------------------------------------------------


def cmd_psi(args, out) -> int:
    cfg = _cfg(args)
    pf = read_problem(args.input)
    if not _is_curve(pf):
        raise ScopeError("psi needs n=2, k=6 data satisfying X2 = X1^3")
    exact = pf.exact or args.exact
    m, _ = _curve(pf, exact)
    if not curve_psi.compression_is_pd(m, cfg):
        _emit(out, "error", "the compression J is not positive definite; psi is undefined")
        return EXIT_NO
    verdict, value = curve_psi.curve_measure_test(m, cfg)
    _emit(out, "psi", format_number(value))
    _emit(out, "psi_float", repr(float(value)))
    _emit(out, "s", format_number(m.s))
    _emit(out, "verdict", verdict)
    if exact:
        _emit(out, "t_floor", repr(float(curve_psi.t_floor(m))))
        _emit(out, "s_window", repr(curve_psi.s_window(m)))
    return {curve_psi.CurveVerdict.HAS_MEASURE: EXIT_OK, curve_psi.CurveVerdict.NO_MEASURE: EXIT_NO,
            curve_psi.CurveVerdict.BOUNDARY: EXIT_APPROX}[verdict]


def cmd_verify(args, out) -> int:
    cfg = _cfg(args)
    pf = read_problem(args.input)
    y = pf.sequence()
    mu = read_measure(args.measure, pf.n)
    check = verify_measure(y, mu, cfg)
    _emit(out, "atoms", len(mu))
    _emit(out, "max_abs_deviation", format_number(check.max_abs_deviation))
    _emit(out, "tolerance", format_number(check.tolerance))
    _emit(out, "result", "pass" if check.passed else "fail")
    return EXIT_OK if check.passed else EXIT_NO


def cmd_cert(args, out) -> int:
    cfg = _cfg(args)
    pf = read_problem(args.input)
    if pf.objective is None or pf.constraint is None:
        raise FileFormatError("cert needs 'objective' and 'constraint' sections")
    f, q = split_quadratic(pf.objective_poly()), split_quadratic(pf.constraint_poly())
    mode = Mode(args.mode)
    try:
        if args.eps:
            cert = eps_cert(f, q, mode, float(parse_number(args.eps)), cfg)
            kind = "eps"
        elif mode is Mode.EQUALITY:
            cert, kind = eq_lemma_cert(f, q, cfg), "equality"
        else:
            cert, kind = s_lemma_cert(f, q, cfg), "inequality"
    except PreconditionError as exc:
        _emit(out, "precondition", str(exc))
        return EXIT_INCONCLUSIVE
    _emit(out, "certificate", kind)
    _emit(out, "feasible", "yes" if cert.feasible else "no")
    _emit(out, "t", format_number(cert.t))
    _emit(out, "min_eig", format_number(cert.min_eig))
    _emit(out, "reason", cert.reason)
    if cert.violating_point is not None:
        _emit(out, "violating_point", " ".join(format_number(v) for v in cert.violating_point))
    return EXIT_OK if cert.feasible else EXIT_NO


def cmd_fixture(args, out) -> int:
    if not args.name:
        for name in fixtures.NAMES:
            _emit(out, name, fixtures.load_fixture(name).description)
        return EXIT_OK
    out.write(fixtures.fixture_path(args.name).read_text())
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-psd", type=float, help="relative eigenvalue tolerance (default 1e-9)")
    common.add_argument("--tol-moment", type=float, help="relative moment tolerance (default 1e-8)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized searches (default 0)")
    common.add_argument("--exact", action="store_true", help="exact rational arithmetic where available")
    common.add_argument("--mode", choices=["equality", "inequality"], default="equality",
                        help="support on {q = 0} or {q >= 0} (default equality)")

    p = argparse.ArgumentParser(prog="truncmoment", description="Truncated moment problems: decide, solve, approximate.",
                                epilog=SUPPORTED, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("decide", parents=[common], help="decide whether a representing measure exists")
    s.add_argument("input")
    s.set_defaults(func=cmd_decide)
    s = sub.add_parser("solve", parents=[common], help="construct and write a representing measure")
    s.add_argument("input")
    s.add_argument("--out", help="measure file to write (default: standard output)")
    s.set_defaults(func=cmd_solve)
    s = sub.add_parser("approx", parents=[common], help="nearby data with measures")
    s.add_argument("input")
    s.add_argument("--eps", help="comma-separated list, e.g. 1/16,1/256")
    s.add_argument("--m-list", help="comma-separated integers for cubic-curve data")
    s.add_argument("--out-dir", help="directory for instance_i.txt / witness_i.txt")
    s.set_defaults(func=cmd_approx)
    s = sub.add_parser("psi", parents=[common], help="psi and the s-versus-psi test for cubic-curve data")
    s.add_argument("input")
    s.set_defaults(func=cmd_psi)
    s = sub.add_parser("verify", parents=[common], help="check a measure file against a problem file")
    s.add_argument("input")
    s.add_argument("measure")
    s.set_defaults(func=cmd_verify)
    s = sub.add_parser("cert", parents=[common], help="multiplier certificate for f >= 0 on {q = 0} or {q >= 0}")
    s.add_argument("input")
    s.add_argument("--eps", help="use the relaxed certificate with this eps > 0")
    s.set_defaults(func=cmd_cert)
    s = sub.add_parser("fixture", help="list shipped examples or print one")
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_fixture)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (FileFormatError, ScopeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
