"""``workbench`` command-line front end.

Every command prints (or writes) a JSON report with the fields
command, inputs, results, exact, timing, violations.  Exit status is 0 when
``violations`` is empty, 1 otherwise, and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import errors
from .chevalley import (
    basic_invariants,
    degree_in_last,
    discriminant,
    gradient_from_rewrite,
    gradient_system,
    jacobian_factorization,
    rewrite_invariant,
)
from .coxeter import build_group, classify
from .fields import coef_to_json, parse_scalar, tag_to_str
from .polyalg import SparsePoly, compose, default_names
from .selftest import SUITES, run_selftest
from .strata import intersection_lattice, minor_flatness_check, monotonicity_check
from .whitney import counterexample_probe, seminorm, taylor_field

DEFAULTS = {
    "backend": "auto",
    "seed": 0,
    "tol": 1e-9,
    "s": 1,
    "alpha": 0.2,
    "tmin": 1e-3,
    "tmax": 1e-1,
    "samples": 25,
    "check": "all",
    "format": "json",
}

# keys accepted in a config file (flags use the same names)
CONFIG_KEYS = {
    "group", "backend", "seed", "output", "tol", "poly", "verify", "check", "s", "alpha", "ray",
    "tmin", "tmax", "samples", "csv", "format", "points", "m", "r", "suite", "power_sum_top",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def read_config(path):
    """Parse a key=value file; blank lines and '#' comments are ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown config key '{key}'")
            out[key] = value
    return out


def build_parser():
    # shared options are accepted before or after the command name
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="key=value file; command-line flags take precedence")
    common.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    common.add_argument("--seed", type=int)
    common.add_argument("--backend", choices=["auto", "exact", "numeric"])
    common.add_argument("--tol", type=float)
    p = _Parser(prog="workbench", description="Finite reflection group invariant workbench.", parents=[common])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    def group_cmd(name, help_text):
        sp = add(name, help_text)
        sp.add_argument("group", nargs="?")
        return sp

    group_cmd("info", "group data: order, degrees, mirrors, Coxeter graph")
    sp = group_cmd("invariants", "integrity basis and degree bookkeeping")
    sp.add_argument("--power-sum-top", dest="power_sum_top", action="store_true", default=None)
    sp = group_cmd("jacobian", "Jacobian factorization J = c prod(lambda)")
    sp.add_argument("--verify", action="store_true", default=None)
    group_cmd("discriminant", "discriminant Delta with Delta(P) = J^2")
    for name in ("rewrite", "gradient"):
        sp = group_cmd(name, "rewrite f = F(P)" if name == "rewrite" else "Cramer gradient system")
        sp.add_argument("--poly", help="polynomial JSON file (or inline JSON)")
    sp = group_cmd("strata", "intersection lattice and isotropy checks")
    sp.add_argument("--check", choices=["flatness", "monotonicity", "all", "none"])
    sp = group_cmd("probe", "loss-of-differentiability probe")
    sp.add_argument("--s", type=int)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--ray", help="comma-separated direction")
    sp.add_argument("--tmin", type=float)
    sp.add_argument("--tmax", type=float)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--csv", help="also write the k,slope,residual,verdict table here")
    sp.add_argument("--format", choices=["json", "csv"])
    sp = add("jet", "Taylor fields and seminorms of a polynomial")
    sp.add_argument("action", choices=["taylor", "seminorm"])
    sp.add_argument("--poly")
    sp.add_argument("--points", help="points separated by ';', coordinates by ','")
    sp.add_argument("--m", type=int)
    sp.add_argument("--r", type=int)
    sp = add("selftest", "deterministic property suites")
    sp.add_argument("suite", nargs="?", choices=list(SUITES) + ["all"])
    return p


def _merge(args, config):
    """flags > WORKBENCH_SEED (seed only) > config file > defaults."""
    opts = dict(DEFAULTS)
    for key, value in config.items():
        opts[key] = value
    env_seed = os.environ.get("WORKBENCH_SEED")
    if env_seed is not None:
        opts["seed"] = env_seed
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command"):
            opts[key] = value
    conv = {"seed": int, "tol": float, "s": int, "alpha": float, "tmin": float, "tmax": float,
            "samples": int, "m": int, "r": int}
    for key, fn in conv.items():
        if key in opts and opts[key] is not None:
            try:
                opts[key] = fn(opts[key])
            except (TypeError, ValueError):
                raise UsageError(f"option {key} expects {fn.__name__}, got {opts[key]!r}")
    for key in ("verify", "power_sum_top"):
        if isinstance(opts.get(key), str):
            opts[key] = opts[key].lower() in ("1", "true", "yes", "on")
    return opts


def _poly_json(f):
    return {"str": f.to_str(), **f.to_json()}


def _u_json(F):
    return {"str": F.to_str(default_names(F.nvars, "u") if F.nvars > 1 else ["u"]), **F.to_json()}


def _load_poly(text):
    if text is None:
        raise UsageError("--poly is required")
    try:
        if text.lstrip().startswith("{"):
            obj = json.loads(text)
        else:
            with open(text, encoding="utf-8") as fh:
                obj = json.load(fh)
        return SparsePoly.from_json(obj)
    except OSError as exc:
        raise UsageError(f"cannot read {text}: {exc.strerror}")
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad polynomial JSON: {exc}")


def _parse_points(text):
    if not text:
        raise UsageError("--points is required")
    try:
        return [tuple(parse_scalar(c) for c in chunk.split(",")) for chunk in text.split(";") if chunk.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --points: {exc}")


def _group(opts):
    if not opts.get("group"):
        raise UsageError("a group spec such as B2 or I2(5) is required")
    return build_group(opts["group"], opts["backend"])


# -- commands -------------------------------------------------------------


def cmd_info(opts):
    G = _group(opts)
    spec = G.spec
    types = [str(t) for t in classify(G.coxeter_graph())]
    res = {
        "spec": str(spec),
        "canonical": str(spec.canonical()),
        "field": tag_to_str(G.field_tag),
        "order": len(G.elements()),
        "degrees": list(spec.degrees),
        "coxeter_number": spec.coxeter_number,
        "reflection_count": len(G.reflections),
        "involutions": len(G.involutions()),
        "classified_as": types,
        "group": G.to_json(),
    }
    viol = []
    if res["order"] != spec.order:
        viol.append(f"enumerated order {res['order']} != {spec.order}")
    if types != [str(spec.canonical())]:
        viol.append(f"Coxeter graph classifies as {types}")
    return res, viol, G.is_exact


def cmd_invariants(opts):
    G = _group(opts)
    C = basic_invariants(G, power_sum_top=bool(opts.get("power_sum_top")))
    res = {
        "p": [_poly_json(p) for p in C.p],
        "k": list(C.degrees),
        "d": C.d,
        "s_j": list(C.s_j),
        "s": C.s,
        "h": C.h,
    }
    return res, C.bookkeeping(), G.is_exact


def cmd_jacobian(opts):
    G = _group(opts)
    C = basic_invariants(G)
    fac = jacobian_factorization(C)
    res = {
        "J": _poly_json(fac.J),
        "c": coef_to_json(fac.c),
        "factors": [SparsePoly.linear(f).to_str() for f in fac.factors],
        "n_factors": len(fac.factors),
    }
    viol = []
    if opts.get("verify"):
        if fac.exact:
            prod = SparsePoly.const(fac.c, G.n)
            for f in fac.factors:
                prod = prod * SparsePoly.linear(f)
            ok = prod == fac.J
            res["verified"] = "exact product equals J" if ok else "mismatch"
        else:
            ok = fac.max_residual <= opts["tol"]
            res["max_residual"] = fac.max_residual
            res["n_points"] = fac.n_points
            res["verified"] = "pointwise" if ok else "mismatch"
        if not ok:
            viol.append("c * prod(lambda) != J")
        if len(fac.factors) != len(G.reflections):
            viol.append("factor count differs from the mirror count")
    return res, viol, fac.exact


def cmd_discriminant(opts):
    G = _group(opts)
    if not G.is_exact:
        raise UsageError("the discriminant needs an exact backend")
    C = basic_invariants(G)
    delta = discriminant(C)
    J = C.jacobian()
    ok = compose(delta, C.p) == J * J
    return {"delta": _u_json(delta), "round_trip": ok}, [] if ok else ["Delta(P) != J^2"], True


def cmd_rewrite(opts):
    G = _group(opts)
    C = basic_invariants(G)
    f = _load_poly(opts.get("poly"))
    R = rewrite_invariant(C, f)
    back = compose(R.F, C.p)
    exact = not (R.F.is_numeric() or f.is_numeric())
    ok = back == f if exact else back.almost_equal(f, opts["tol"])
    deg_un = degree_in_last(R.F)
    bound = max(f.degree, 0) // C.h
    res = {"F": _u_json(R.F), "weighted_degree": R.weighted_degree, "degree_in_u_n": deg_un,
           "bound_floor_deg_over_h": bound, "round_trip": ok}
    viol = []
    if not ok:
        viol.append("compose(F, p) != f")
    if deg_un > bound:
        viol.append(f"degree in u_n {deg_un} exceeds floor(deg f / h) = {bound}")
    return res, viol, exact


def cmd_gradient(opts):
    G = _group(opts)
    if not G.is_exact:
        raise UsageError("the gradient system needs an exact backend")
    C = basic_invariants(G)
    f = _load_poly(opts.get("poly"))
    g = gradient_system(C, f)
    F = rewrite_invariant(C, f).F
    g2 = gradient_from_rewrite(C, F)
    jac = C.jacobian_matrix()
    chain = all(
        sum((jac[j][i] * g[j] for j in range(C.n)), SparsePoly.zero(G.n)) == f.diff(i) for i in range(G.n)
    )
    viol = []
    if g != g2:
        viol.append("Cramer route differs from the rewrite route")
    if not chain:
        viol.append("chain rule identity fails")
    return {"g": [_poly_json(x) for x in g], "matches_rewrite": g == g2, "chain_rule": chain}, viol, True


def cmd_strata(opts):
    G = _group(opts)
    L = intersection_lattice(G)
    res = L.to_json()
    viol = []
    check = opts.get("check", "all")
    if check in ("flatness", "all"):
        if G.is_exact:
            rep = minor_flatness_check(basic_invariants(G), L)
            res["flatness"] = rep.to_json()
            viol.extend({"flatness": v} for v in rep.violations)
        else:
            res["flatness"] = "skipped: needs an exact backend"
    if check in ("monotonicity", "all"):
        rep = monotonicity_check(L)
        res["monotonicity"] = rep.to_json()
        viol.extend({"monotonicity": v} for v in rep.violations)
    return res, viol, G.is_exact


def cmd_probe(opts):
    import numpy as np

    G = _group(opts)
    C = basic_invariants(G, power_sum_top=True)
    ray = None
    if opts.get("ray"):
        try:
            ray = [float(x) for x in str(opts["ray"]).split(",")]
        except ValueError:
            raise UsageError(f"bad --ray {opts['ray']!r}")
        if len(ray) != G.n:
            raise UsageError(f"--ray needs {G.n} components")
    if opts["samples"] < 2 or not 0 < opts["tmin"] < opts["tmax"]:
        raise UsageError("need 0 < tmin < tmax and at least two samples")
    grid = list(np.logspace(np.log10(opts["tmin"]), np.log10(opts["tmax"]), opts["samples"]))
    rep = counterexample_probe(C, opts["s"], opts["alpha"], ray, grid)
    res = rep.to_json()
    res["verdict_ascii"] = _ascii(rep.verdict)
    viol = [] if rep.slope_law_ok else ["fitted slopes deviate from k_n(s+alpha) - k by more than 0.05"]
    csv_text = rep.to_csv()
    if opts.get("csv"):
        with open(opts["csv"], "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    return res, viol, False, csv_text


def _ascii(text):
    return text.translate(str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789"))


def cmd_jet(opts):
    f = _load_poly(opts.get("poly"))
    pts = _parse_points(opts.get("points"))
    if any(len(p) != f.nvars for p in pts):
        raise UsageError("point dimension differs from the polynomial")
    m = opts.get("m")
    m = max(f.degree, 0) if m is None else m
    A = taylor_field(f, pts, m)
    if opts["action"] == "taylor":
        res = {"m": m, "points": [[coef_to_json(c) for c in p] for p in pts],
               "coefficients": [{",".join(map(str, k)): coef_to_json(v) for k, v in c.items()} for c in A.coeffs]}
    else:
        r = opts.get("r")
        r = m if r is None else r
        if r > m:
            raise UsageError("need r <= m")
        res = {"m": m, "r": r, "seminorm": coef_to_json(seminorm(A, pts, r, m))}
    return res, [], not f.is_numeric()


def cmd_selftest(opts):
    suite = opts.get("suite") or "all"
    if suite not in SUITES and suite != "all":
        raise UsageError(f"unknown suite {suite}")
    results, viol = run_selftest(suite, opts["seed"])
    return results, viol, True


COMMANDS = {
    "info": cmd_info,
    "invariants": cmd_invariants,
    "jacobian": cmd_jacobian,
    "discriminant": cmd_discriminant,
    "rewrite": cmd_rewrite,
    "gradient": cmd_gradient,
    "strata": cmd_strata,
    "probe": cmd_probe,
    "jet": cmd_jet,
    "selftest": cmd_selftest,
}

# errors that mean "bad input" rather than "a check failed"
USAGE_ERRORS = (
    UsageError,
    errors.UnsupportedFamily,
    errors.UnsupportedRank,
    errors.UnsupportedFieldExact,
    errors.UnsupportedGroupForProbe,
    errors.RayOnMirror,
    errors.GroupTooLarge,
    errors.LatticeTooLarge,
    errors.ArityMismatch,
    errors.FieldMismatch,
)


def run(argv=None, stdout=None):
    """Execute one command; returns (report dict or None, exit code)."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    t0 = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        config = read_config(args.config) if getattr(args, "config", None) else {}
        opts = _merge(args, config)
        opts["command"] = args.command
        t0 = time.perf_counter()
        out = COMMANDS[args.command](opts)
        elapsed = time.perf_counter() - t0
    except USAGE_ERRORS as exc:
        print(f"workbench: error: {exc}", file=sys.stderr)
        return None, 2
    except OSError as exc:
        print(f"workbench: error: {exc}", file=sys.stderr)
        return None, 2
    except ValueError as exc:
        print(f"workbench: error: {exc}", file=sys.stderr)
        return None, 2
    except errors.WorkbenchError as exc:
        out = ({"error": type(exc).__name__, "message": str(exc)}, [f"{type(exc).__name__}: {exc}"], True)
        elapsed = time.perf_counter() - t0
    results, violations, exact = out[:3]
    relevant = (set(vars(args)) | {"backend", "tol"}) - {"command", "config", "output"}
    if args.command in ("jet", "selftest"):
        relevant -= {"backend", "tol"}
    inputs = {k: opts[k] for k in sorted(relevant | {"seed"}) if opts.get(k) is not None}
    report = {
        "command": args.command,
        "inputs": inputs,
        "results": results,
        "exact": bool(exact),
        "timing": {"seconds": round(elapsed, 6)},
        "violations": violations,
    }
    text = json.dumps(report, indent=2, default=str)
    if args.command == "probe" and opts.get("format") == "csv":
        stdout.write(out[3])
    elif opts.get("output"):
        with open(opts["output"], "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        stdout.write(text + "\n")
    return report, 0 if not violations else 1


def main(argv=None):
    _, code = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
