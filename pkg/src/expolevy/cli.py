"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 numerical failure,
3 usage error. Errors print a one-object JSON diagnostic to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import mellin as mel
from . import model as mod
from . import montecarlo as mc
from . import roots as rts
# the package re-exports a function named `density`, which shadows the
# submodule on the package object; import the callables directly
from .density import (cdf as _cdf_fn, density as _density_fn,
                      density_asymptotic, density_best,
                      density_via_inversion, normalization_check,
                      price_asian, quantiles, tail_exponent)
from .errors import (ExpoLevyError, ModelInvalidError, NumericalFailure,
                     UsageError, ValidationFailure)


def _fmt(x: float) -> str:
    return "%.17g" % x


def _parse_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    logflag = False
    if len(parts) == 4:
        if parts[3] != "log":
            raise UsageError(f"bad grid spec '{spec}': trailing field must be 'log'")
        logflag = True
        parts = parts[:3]
    if len(parts) != 3:
        raise UsageError(f"bad grid spec '{spec}': expected MIN:MAX:N[:log]")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise UsageError(f"bad grid spec '{spec}': {e}") from None
    if n < 1 or hi < lo or (logflag and lo <= 0):
        raise UsageError(f"bad grid spec '{spec}'")
    if logflag:
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def _parse_complex_list(text: str) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            out.append(complex(tok))
        except ValueError:
            raise UsageError(f"cannot parse '{tok}' as a complex number") from None
    if not out:
        raise UsageError("empty value list")
    return out


def _parse_float_list(text: str) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            out.append(float(tok))
        except ValueError:
            raise UsageError(f"cannot parse '{tok}' as a number") from None
    if not out:
        raise UsageError("empty value list")
    return out


def _load(args, check_valid: bool = True) -> mod.LevyModel:
    try:
        model = mod.load_model(args.model)
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise UsageError(f"cannot read model file '{args.model}': {e}") from None
    if check_valid:
        violations = mod.validate(model)
        if violations:
            raise ModelInvalidError(violations)
    return model


def _emit_rows(args, header: tuple, rows: list, summary: dict | None = None):
    if args.out == "csv":
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(v) if isinstance(v, float) else str(v)
                           for v in row))
        if summary is not None:
            print(json.dumps(summary), file=sys.stderr)
    else:
        doc = {"rows": [dict(zip(header, row)) for row in rows]}
        if summary is not None:
            doc["summary"] = summary
        print(json.dumps(doc, indent=2))


def _grid_or_default(args, params) -> np.ndarray:
    if args.grid:
        return _parse_grid(args.grid)
    lo, hi = quantiles(params, [0.05, 0.95])
    return np.geomspace(lo, hi, 21)


def _summary(params) -> dict:
    return {
        "normalization_check": normalization_check(params),
        "tail_exponent": tail_exponent(params),
    }


# --------------------------------------------------------------------------
# subcommands

def _cmd_validate(args) -> int:
    model = _load(args, check_valid=False)
    violations = mod.validate(model)
    print(json.dumps({"valid": not violations, "violations": violations},
                     indent=2))
    if violations:
        raise ModelInvalidError(violations)
    return 0


def _cmd_roots(args) -> int:
    model = _load(args)
    rs = rts.solve(model, args.q)
    report = rts.check_assumptions(model, rs)
    M = model.total_positive_multiplicity
    Mhat = model.total_negative_multiplicity
    doc = {
        "roots": rs.to_dict(),
        "counts": {"K": rs.K, "Khat": rs.Khat, "M": M, "Mhat": Mhat,
                   "sigma_positive": model.sigma > 0,
                   "law_satisfied": True},
        "assumptions": {"passed": report.passed,
                        "warnings": list(report.warnings),
                        "all_pass": report.all_pass},
    }
    if args.out == "csv":
        print("kind,re,im")
        for z in rs.zeta:
            print("zeta,%s,%s" % (_fmt(z.real), _fmt(z.imag)))
        for z in rs.zeta_hat:
            print("zeta_hat,%s,%s" % (_fmt(z.real), _fmt(z.imag)))
        print(json.dumps(doc["assumptions"]), file=sys.stderr)
    else:
        print(json.dumps(doc, indent=2))
    return 0


def _cmd_mellin(args) -> int:
    model = _load(args)
    params = mel.params_from_model(model, args.q)
    svals = _parse_complex_list(args.s)
    rows = []
    if args.u is not None:
        u = complex(args.u)
        for s in svals:
            v = mel.joint_transform(model, args.q, u, s, params=params)
            rows.append((s.real, s.imag, v.real, v.imag))
        header = ("re_s", "im_s", "re_joint", "im_joint")
    else:
        for s in svals:
            v = mel.mellin_transform(params, s)
            rows.append((s.real, s.imag, v.real, v.imag))
        header = ("re_s", "im_s", "re_m", "im_m")
    _emit_rows(args, header, rows)
    return 0


def _cmd_density(args) -> int:
    model = _load(args)
    params = mel.params_from_model(model, args.q)
    xs = _grid_or_default(args, params)
    rows = []
    for x in xs:
        x = float(x)
        if args.method == "inversion":
            v = density_via_inversion(params, x, c=args.contour)
            rows.append((x, v, abs(v) * 1e-12, "quadrature"))
        elif args.method == "asymptotic":
            regime = "zero" if params.sigma > 0 else "infinity"
            se = density_asymptotic(params, x, regime, tol=args.tol)
            rows.append((x, float(se.value), se.abs_err, se.mode))
        elif args.method == "series":
            se = _density_fn(params, x, tol=args.tol)
            rows.append((x, float(se.value), se.abs_err, se.mode))
        else:
            se = density_best(params, x)
            rows.append((x, float(se.value), se.abs_err, se.mode))
    _emit_rows(args, ("x", "value", "abs_err", "mode"), rows, _summary(params))
    return 0


def _cmd_cdf(args) -> int:
    model = _load(args)
    params = mel.params_from_model(model, args.q)
    xs = _grid_or_default(args, params)
    rows = [(float(x), _cdf_fn(params, float(x)), 1e-9, "quadrature")
            for x in xs]
    _emit_rows(args, ("x", "value", "abs_err", "mode"), rows, _summary(params))
    return 0


def _cmd_moment(args) -> int:
    model = _load(args)
    params = mel.params_from_model(model, args.q)
    rows = [(float(n), mel.moment(params, int(n)))
            for n in _parse_float_list(args.n)]
    _emit_rows(args, ("n", "value"), rows)
    return 0


def _cmd_price(args) -> int:
    model = _load(args)
    params = mel.params_from_model(model, args.q)
    strikes = _parse_float_list(args.strikes)
    rows = [(float(k), price_asian(params, float(k)), 1e-9, "quadrature")
            for k in strikes]
    _emit_rows(args, ("strike", "value", "abs_err", "mode"), rows,
               _summary(params))
    return 0


def _cmd_simulate(args) -> int:
    model = _load(args)
    cfg = mc.McConfig(paths=args.paths, seed=args.seed,
                      diffusion_step=args.step)
    samples = mc.simulate_exponential_functional(model, args.q, cfg)
    if args.samples_out:
        np.save(args.samples_out, samples)
    if args.out == "csv" and not args.samples_out:
        print("sample")
        for v in samples:
            print(_fmt(float(v)))
        return 0
    qs = np.quantile(samples, [0.1, 0.25, 0.5, 0.75, 0.9])
    print(json.dumps({
        "paths": len(samples),
        "seed": args.seed,
        "mean": float(samples.mean()),
        "stdev": float(samples.std()),
        "min": float(samples.min()),
        "max": float(samples.max()),
        "deciles": {"0.1": qs[0], "0.25": qs[1], "0.5": qs[2],
                    "0.75": qs[3], "0.9": qs[4]},
        "samples_file": args.samples_out,
    }, indent=2))
    return 0


def _cmd_check(args) -> int:
    model = _load(args)
    q = args.q
    params = mel.params_from_model(model, q)
    rs = rts.solve(model, q)
    rng = np.random.default_rng(20240901)
    theta = params.theta

    # functional equation M(s+1) = s M(s) / (q - psi(s)) on random s
    worst_fe = 0.0
    for _ in range(200):
        s = complex(rng.uniform(0.05 * theta, 0.95 * theta),
                    rng.uniform(-3.0, 3.0))
        lhs = mel.mellin_transform(params, s + 1)
        rhs = s * mel.mellin_transform(params, s) / (
            q - mod.laplace_exponent(model, s))
        worst_fe = max(worst_fe, abs(lhs - rhs) / abs(lhs))
    fe_pass = bool(worst_fe < 1e-9)

    # rational factorization of s/(q - psi(s))
    worst_fac = 0.0
    zhat1 = rs.zeta_hat[0].real if rs.zeta_hat else 1.0
    lead = {"sigma_pos": model.sigma ** 2 / 2.0,
            "drift_only": model.mu,
            "pure_jump": -(q + mod.jump_intensity(model))}[
                rts.to_rational(model).kind]
    n_done = 0
    while n_done < 100:
        s = complex(rng.uniform(-0.9 * zhat1, 0.9 * theta),
                    rng.uniform(-2.0, 2.0))
        near = [r for r, _ in params.rho] + [-r for r, _ in params.rho_hat] \
            + list(params.zeta) + [-z for z in params.zeta_hat]
        if any(abs(s - z) < 0.05 for z in near) or abs(s) < 0.05:
            continue
        lhs = s / (q - mod.laplace_exponent(model, s))
        prod = -s / lead
        for r, m in params.rho:
            prod *= (s - r) ** m
        for r, m in params.rho_hat:
            prod *= (s + r) ** m
        for z in params.zeta:
            prod /= (s - z)
        for z in params.zeta_hat:
            prod /= (s + z)
        worst_fac = max(worst_fac, abs(lhs - prod) / abs(lhs))
        n_done += 1
    fac_pass = bool(worst_fac < 1e-9)

    norm = normalization_check(params)
    norm_pass = bool(abs(norm - 1.0) < 1e-6)

    # series vs inversion, scanning well past the central quantiles: the
    # healthy series range can sit in the far tail (sigma > 0 with small
    # A pushes cancellation across the bulk of the distribution)
    lo, hi = quantiles(params, [0.02, 0.998])
    worst_si = 0.0
    used = 0
    for x in np.geomspace(lo / 4.0, hi * 4.0, 48):
        if used >= 12:
            break
        x = float(x)
        if params.sigma == 0 and params.mu != 0:
            if abs(x * abs(params.mu) - 1.0) < 0.025:
                continue
        try:
            se = _density_fn(params, x)
        except ExpoLevyError:
            continue
        if se.mode != "convergent" or se.abs_err > 1e-9 * abs(se.value):
            continue
        vi = density_via_inversion(params, x)
        worst_si = max(worst_si, abs(float(se.value) - vi) / abs(vi))
        used += 1
    si_pass = bool(used >= 6 and worst_si < 1e-7)

    cfg = mc.McConfig(paths=args.paths, seed=args.seed,
                      diffusion_step=args.step)
    report = mc.compare_report(model, q, cfg, params=params)

    doc = {
        "functional_equation": {"max_rel_err": worst_fe, "pass": fe_pass},
        "factorization": {"max_rel_err": worst_fac, "pass": fac_pass},
        "normalization": {"value": float(norm), "pass": norm_pass},
        "series_vs_inversion": {"max_rel_err": worst_si, "points": used,
                                "pass": si_pass},
        "monte_carlo": report.to_dict(),
        "all_pass": fe_pass and fac_pass and norm_pass and si_pass
                    and report.all_pass,
    }
    print(json.dumps(doc, indent=2))
    if not doc["all_pass"]:
        raise NumericalFailure("check: one or more invariants failed")
    return 0


# --------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="expolevy",
        description="Exponential functionals of Levy processes with "
                    "rational Laplace exponent")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, q_required=True):
        p.add_argument("--model", required=True, help="model JSON file")
        if q_required:
            p.add_argument("--q", type=float, required=True,
                           help="killing rate (q >= 0)")
        p.add_argument("--out", choices=("csv", "json"), default="json")

    p = sub.add_parser("validate", help="check model admissibility")
    p.add_argument("--model", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("roots", help="solve psi(z) = q and report root counts")
    common(p)
    p.set_defaults(func=_cmd_roots)

    p = sub.add_parser("mellin", help="Mellin transform values M(s)")
    common(p)
    p.add_argument("--s", required=True,
                   help="comma-separated s values (complex accepted)")
    p.add_argument("--u", default=None,
                   help="exponential tilt for the joint transform")
    p.set_defaults(func=_cmd_mellin)

    p = sub.add_parser("density", help="density of I_q on a grid")
    common(p)
    p.add_argument("--grid", default=None, help="MIN:MAX:N[:log]")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--method",
                   choices=("auto", "series", "inversion", "asymptotic"),
                   default="auto")
    p.add_argument("--contour", type=float, default=1.0,
                   help="inversion contour abscissa")
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("cdf", help="CDF of I_q on a grid")
    common(p)
    p.add_argument("--grid", default=None, help="MIN:MAX:N[:log]")
    p.set_defaults(func=_cmd_cdf)

    p = sub.add_parser("moment", help="integer moments E[I_q^n]")
    common(p)
    p.add_argument("--n", required=True, help="comma-separated orders")
    p.set_defaults(func=_cmd_moment)

    p = sub.add_parser("price", help="Asian option prices E[(I_q - K)^+]")
    common(p)
    p.add_argument("--strikes", required=True, help="comma-separated strikes")
    p.set_defaults(func=_cmd_price)

    p = sub.add_parser("simulate", help="Monte Carlo samples of I_q")
    common(p)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--step", type=float, default=None,
                   help="diffusion step (default 0.005/max(1,q))")
    p.add_argument("--samples-out", default=None,
                   help="write samples to this .npy file")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("check", help="run the full invariant suite")
    common(p)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--step", type=float, default=None)
    p.set_defaults(func=_cmd_check)

    return top


def _diag(err: Exception, code: int):
    print(json.dumps({"error": type(err).__name__, "message": str(err),
                      "exit_code": code}), file=sys.stderr)


def run(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as e:
        if e.code in (0, None):
            return 0
        _diag(UsageError("bad command line arguments"), 3)
        return 3
    try:
        return args.func(args)
    except UsageError as e:
        _diag(e, 3)
        return 3
    except ValidationFailure as e:
        _diag(e, 1)
        return 1
    except NumericalFailure as e:
        _diag(e, 2)
        return 2
    except ExpoLevyError as e:
        _diag(e, 1)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
