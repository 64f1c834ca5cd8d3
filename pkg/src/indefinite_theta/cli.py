"""Command-line front end.

Exit status: 0 on success, 2 for unreadable or malformed input, 3 when a
computation cannot be carried out (failed precondition, quadrature failure,
search budget exhausted).  Analyses whose *answer* is negative, such as a
configuration failing (I.3), still exit 0.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .completion import (NORMALIZATION, DegeneratePlaneError, QuadratureError, E2_quadrature,
                         completed_doubling, plane_frame)
from .cones import BudgetExhausted, compute_r_inf, enumerate_components
from .incidence import ConeConfig, GenerationError, IncidenceReport, check_all, random_valid_config
from .io import SchemaError, config_to_dict, dumps, load_config, to_jsonable
from .quadform import Lattice, QuadraticSpace, SignatureError, as_rational, as_vector, build_majorant
from .signwalk import (AuditError, InvalidConfigError, NotRegularError, PathLeavesNegativeConeError,
                       ReferenceSearchError, audit_constancy, path_constancy_check, reference_weight,
                       sign_vector, wall_lemma_audit, winding_audit)
from .theta import divergence_witness_scan, theta_coefficients, theta_evaluate

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE = 0, 2, 3

COMPUTE_ERRORS = (InvalidConfigError, NotRegularError, ReferenceSearchError, AuditError,
                  PathLeavesNegativeConeError, QuadratureError, DegeneratePlaneError,
                  BudgetExhausted, SignatureError, GenerationError)


class InputError(ValueError):
    pass


# --------------------------------------------------------------------------
# argument parsing helpers

def parse_tau(text: str) -> complex:
    try:
        tau = complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise InputError(f"cannot parse tau {text!r}") from None
    if tau.imag <= 0:
        raise InputError("tau must have positive imaginary part")
    return tau


def parse_vector(text: str) -> tuple[Fraction, ...]:
    try:
        return as_vector(t for t in text.split(","))
    except (TypeError, ValueError) as exc:
        raise InputError(f"cannot parse vector {text!r}: {exc}") from None


def parse_rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None


def _vec(v) -> list:
    return to_jsonable(list(v))


def _check_dim(x, n, what="vector"):
    if len(x) != n:
        raise InputError(f"{what} needs {n} entries, got {len(x)}")


# --------------------------------------------------------------------------
# report builders

def incidence_dict(rep: IncidenceReport) -> dict:
    def rows(items):
        return [{"j": v.index, "passed": v.passed, "value": v.value, "branch": v.branch} for v in items]

    return {"overall": rep.overall, "I.1": rows(rep.i1), "I.2": rows(rep.i2), "I.3": rows(rep.i3),
            "no_three_nulls": rep.no_three_nulls,
            "violations": [list(v) for v in rep.violations]}


def _reference(args, config, valid):
    if args.reference is not None:
        return args.reference, {"w_c": args.reference, "source": "explicit"}
    ref = reference_weight(config, audit_samples=args.samples, seed=args.seed, allow_invalid=not valid)
    return ref, {"w_c": ref.w_c, "source": "audited" if ref.audited else "unaudited witness",
                 "witness": _vec(ref.witness), "audit_samples": ref.audit_samples}


def cmd_check(args, loaded):
    return incidence_dict(check_all(loaded.config)), {}


def cmd_cones(args, loaded):
    config = loaded.config
    comps, complete = enumerate_components(config, seed=args.seed)
    cert = compute_r_inf(config, comps, seed=args.seed, validation_samples=args.samples)
    atlas = [{"signs": c.key(), "witness": _vec(c.witness), "w": c.w_value, "class": c.closure_class,
              "inf_ratio": c.inf_ratio, "exact_class": c.exact} for c in comps]
    certificate = {"r_inf": cert.r_inf, "finite": cert.finite, "method": cert.method,
                   "tolerance": cert.tolerance, "complete": complete,
                   "vertex_only": [c.key() for c in cert.vertex_only_cones],
                   "per_cone_inf": cert.per_cone_inf, "sample_validation": cert.sample_validation,
                   "notes": cert.notes}
    return {"components": atlas, "certificate": certificate}, {"validation_samples": args.samples}


def cmd_theta(args, loaded):
    config, lattice = loaded.config, loaded.lattice
    if args.mu is not None:
        mu = parse_vector(args.mu)
        _check_dim(mu, lattice.dim, "mu")
        lattice = Lattice(lattice.ambient, lattice.basis, mu)
    tau = parse_tau(args.tau)
    valid = check_all(config).overall
    ref = args.reference
    if ref is None and not valid:
        raise InvalidConfigError("configuration is invalid; the series diverges (pass --reference to "
                                 "expand the formal coefficients anyway)")
    exp = theta_coefficients(config, lattice, args.M, args.B, ref)
    value, tail = theta_evaluate(exp, tau, lattice, build_majorant(config.space))
    out = exp.to_json()
    out["value_at_tau"] = [value.real, value.imag]
    out["tail_bound"] = tail
    params = {"M": parse_rational(args.M), "B": args.B, "tau": [tau.real, tau.imag]}
    if args.completed:
        cb = args.completion_B if args.completion_B is not None else 4
        d = completed_doubling(config, lattice, tau, cb, exp.reference, args.tol)
        out["completed"] = {"value": d["S_B"], "value_2B": d["S_2B"], "difference": d["difference"],
                            "tail_estimate": d["tail_estimate"], "quadrature_error": d["quadrature_noise"],
                            "doubling_ratio": d["ratio"], "normalization": NORMALIZATION}
        params.update({"completion_B": cb, "tolerance": args.tol})
    return out, params


def cmd_verify(args, loaded):
    config = loaded.config
    rep = check_all(config)
    out = {"valid": rep.overall}
    vals = audit_constancy(config, args.samples, args.seed)
    seen = sorted({int(v) for v in vals})
    out["constancy"] = {"samples": int(len(vals)), "w_values": seen, "constant": len(seen) == 1}
    out["wall_lemma"] = {str(k): v for k, v in wall_lemma_audit(config, args.per_wall, args.seed).items()}
    out["winding"] = winding_audit(config, args.samples, args.seed)
    if args.path:
        pts = [parse_vector(p) for p in args.path.split(";")]
        for p in pts:
            _check_dim(p, config.space.dim, "path point")
        pv = path_constancy_check(config, pts, args.steps)
        out["path"] = {"constant": pv.constant, "w_values": sorted(set(pv.w_values)),
                       "samples": pv.samples, "violations": pv.violations}
    return out, {"samples": args.samples, "per_wall": args.per_wall}


def cmd_necessity(args, loaded):
    config, lattice = loaded.config, loaded.lattice
    rep = check_all(config)
    ref, refinfo = _reference(args, config, rep.overall)
    wit = divergence_witness_scan(config, lattice, args.radius, ref)
    holds = rep.holds("I.3")
    failing = [v.index for v in rep.i3 if not v.passed]
    verdict = "(I.3) holds" if holds else "(I.3) fails at j=" + ",".join(map(str, failing))
    out = {"I.3": verdict, "I.3_failures": [[v.index, v.value] for v in rep.i3 if not v.passed],
           "reference": refinfo, "witness_count": len(wit),
           "witnesses": [{"x": _vec(w["x"]), "norm": w["norm"], "phi": w["phi"]} for w in wit],
           "agreement": holds == (not wit)}
    return out, {"radius": args.radius}


def cmd_e2(args, loaded):
    config = loaded.config
    j = args.pair[0]
    k = args.pair[1] if len(args.pair) > 1 else j % config.N + 1
    for i in (j, k):
        if not 1 <= i <= config.N:
            raise InputError(f"cone index {i} out of range 1..{config.N}")
    x = parse_vector(args.x)
    _check_dim(x, config.space.dim, "x")
    c, c2 = config.vectors[j - 1], config.vectors[k - 1]
    frame = plane_frame(config.space, c, c2)
    xf = [float(t) for t in x]
    value, err = E2_quadrature(frame, xf, args.tol)
    s = sign_vector(ConeConfig(config.space, [c, c2]), x)
    out = {"pair": [j, k], "x": _vec(x), "value": value, "error_estimate": err,
           "sign_product": s[0] * s[1], "normalization": NORMALIZATION}
    return out, {"tolerance": args.tol}


def cmd_config_gen(args):
    gram = [[0] * (args.n + 2) for _ in range(args.n + 2)]
    for i in range(args.n + 2):
        gram[i][i] = -1 if i < 2 else 1
    config = random_valid_config(QuadraticSpace(gram), args.N, args.mode, args.seed)
    return config_to_dict(config)


# --------------------------------------------------------------------------
# text rendering

def render_text(report: dict) -> str:
    lines: list[str] = []

    def scalar(v):
        return "inf" if v == "inf" else str(v)

    def walk(obj, indent=0):
        pad = "  " * indent
        for key, val in obj.items():
            if isinstance(val, dict):
                lines.append(f"{pad}{key}:")
                walk(val, indent + 1)
            elif isinstance(val, list) and val and all(isinstance(r, dict) for r in val):
                cols = list(val[0])
                table = [cols] + [[scalar(r.get(c, "")) for c in cols] for r in val]
                widths = [max(len(str(row[i])) for row in table) for i in range(len(cols))]
                lines.append(f"{pad}{key}:")
                for row in table:
                    lines.append(pad + "  " + "  ".join(str(v).ljust(w) for v, w in zip(row, widths)).rstrip())
            else:
                lines.append(f"{pad}{key}: {scalar(val)}")

    walk(report)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="indefinite-theta",
                                description="Incidence checks, cone certificates and theta series "
                                            "for signature (n,2) cone configurations.")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    # the same options after the subcommand; SUPPRESS keeps the global value otherwise
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("--output", "-o", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(name, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.add_argument("config", help="configuration JSON file")
        sp.add_argument("--seed", type=int, default=0)
        return sp

    with_input("check", "incidence conditions (I.1)-(I.3)")
    sp = with_input("cones", "sign components and the convergence certificate")
    sp.add_argument("--samples", type=int, default=10_000, help="validation samples per cone")
    sp = with_input("theta", "q-expansion coefficients and evaluation")
    sp.add_argument("--M", default="13", help="largest exponent m (rational)")
    sp.add_argument("--B", type=parse_rational, default=None, help="majorant ball (default from the certificate)")
    sp.add_argument("--tau", default="i")
    sp.add_argument("--mu", help="coset offset in lattice coordinates, comma separated")
    sp.add_argument("--reference", type=int)
    sp.add_argument("--completed", action="store_true", help="add the completed partial sums")
    sp.add_argument("--completion-B", type=parse_rational, default=None)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp = with_input("verify", "constancy, wall and winding audits")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--per-wall", type=int, default=1000)
    sp.add_argument("--path", help="polygonal path 'x1,..;y1,..;...' to audit")
    sp.add_argument("--steps", type=int, default=1000)
    sp = with_input("necessity", "divergence witnesses against the (I.3) verdict")
    sp.add_argument("--radius", type=int, default=10)
    sp.add_argument("--reference", type=int)
    sp.add_argument("--samples", type=int, default=1000)
    sp = with_input("e2", "the generalized error function for one pair")
    sp.add_argument("--pair", type=int, nargs="+", required=True, metavar="J")
    sp.add_argument("--x", required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp = sub.add_parser("config-gen", help="random valid configuration", parents=[common])
    sp.add_argument("--n", type=int, default=1, help="number of positive directions")
    sp.add_argument("--N", type=int, default=3)
    sp.add_argument("--mode", choices=("planar", "perturbed"), default="planar")
    sp.add_argument("--seed", type=int, default=0)
    return p


COMMANDS = {"check": cmd_check, "cones": cmd_cones, "theta": cmd_theta, "verify": cmd_verify,
            "necessity": cmd_necessity, "e2": cmd_e2}


def run(argv=None) -> tuple[int, str, str | None]:
    """Parse ``argv`` and execute; returns ``(exit_code, text, output_path)``."""
    args = build_parser().parse_args(argv)
    try:
        if args.command == "config-gen":
            if args.n < 1 or args.N < 2:
                raise InputError("need --n >= 1 and --N >= 2")
            report = cmd_config_gen(args)
        else:
            loaded = load_config(args.config)
            result, params = COMMANDS[args.command](args, loaded)
            params = {"seed": args.seed, **params}
            report = {"command": args.command, "version": __version__, "input_digest": loaded.digest,
                      "parameters": params, "result": result}
    except (SchemaError, InputError, OSError) as exc:
        return EXIT_INPUT, f"input error: {exc}\n", None
    except COMPUTE_ERRORS as exc:
        return EXIT_COMPUTE, f"computation failed: {type(exc).__name__}: {exc}\n", None
    text = render_text(to_jsonable(report)) if args.format == "text" else dumps(report)
    return EXIT_OK, text, args.output


def main(argv=None) -> int:
    code, text, path = run(argv)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        (sys.stdout if code == EXIT_OK else sys.stderr).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
