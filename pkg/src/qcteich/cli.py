"""Command-line entry point.

Exit codes: 0 success, 1 a verification failed, 2 classification needs
annotations, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from . import __version__
from .deformation import (RationalVectorField, aut_rank, delta_f, in_tangent_orbit, in_tf,
                          rank_invariance_check, teich_dim)
from .dynamics import Annotations, DynamicsConfig, portrait
from .errors import ClassificationIndeterminate, InputError, QCTeichError
from .sphere import MoebiusTransform, RationalMap

EXIT_OK, EXIT_FAILED, EXIT_INDETERMINATE, EXIT_INPUT = 0, 1, 2, 3

Pair = tuple[float, float]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)


class FateOverrideModel(_Strict):
    critical_point: int = Field(ge=0)
    fate: Literal["preperiodic", "attracted", "captured", "julia"]
    cycle: Optional[int] = Field(default=None, ge=0)
    preperiod: Optional[int] = Field(default=None, ge=0)
    level: Optional[float] = None


class CycleHintModel(_Strict):
    cycle: int = Field(ge=0)
    kind: Literal["siegel", "cremer"]


class AnnotationsModel(_Strict):
    version: Literal[1] = 1
    n_H: int = Field(default=0, ge=0)
    n_J: int = Field(default=0, ge=0)
    fate_overrides: list[FateOverrideModel] = []
    cycle_hints: list[CycleHintModel] = []

    def build(self) -> Annotations:
        fo = {}
        for o in self.fate_overrides:
            if o.critical_point in fo:
                raise InputError(f"duplicate fate override for critical point {o.critical_point}")
            fo[o.critical_point] = {"fate": o.fate, "cycle": o.cycle, "preperiod": o.preperiod,
                                    "level": o.level}
        hints = {}
        for h in self.cycle_hints:
            if h.cycle in hints:
                raise InputError(f"duplicate hint for cycle {h.cycle}")
            hints[h.cycle] = h.kind
        return Annotations(self.n_H, self.n_J, fo, hints)


class RationalModel(_Strict):
    version: Literal[1] = 1
    numerator: list[Pair] = Field(min_length=1)
    denominator: list[Pair] = Field(min_length=1)

    def coeffs(self):
        return ([complex(a, b) for a, b in self.numerator],
                [complex(a, b) for a, b in self.denominator])


class MapFileModel(RationalModel):
    annotations: Optional[AnnotationsModel] = None


class ConfigModel(_Strict):
    grid: Optional[tuple[int, int]] = None
    tol: Optional[float] = Field(default=None, gt=0)
    max_period: Optional[int] = Field(default=None, ge=1)
    max_iter: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None
    format: Optional[Literal["json", "text"]] = None


DEFAULTS = {"grid": None, "tol": None, "max_period": 4, "max_iter": 20000, "seed": 0,
            "format": "json"}


def _load_json(path, model, what: str):
    try:
        raw = Path(path).read_text()
    except FileNotFoundError:
        raise InputError(f"{what} file not found: {path}") from None
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read {what} file {path}: {e}") from None
    try:
        return model.model_validate_json(raw)
    except ValidationError as e:
        msgs = ["/".join(str(p) for p in err["loc"]) + ": " + err["msg"] for err in e.errors()]
        raise InputError(f"{what} file {path}: " + "; ".join(msgs)) from None


def parse_map_file(path, min_degree: int = 2):
    """Strictly parse a map file into ``(RationalMap, Annotations | None)``."""
    m = _load_json(path, MapFileModel, "map")
    num, den = m.coeffs()
    f = RationalMap(num, den)
    if f.degree < min_degree:
        raise InputError(f"map has degree {f.degree}; this command needs degree >= {min_degree}")
    ann = m.annotations.build() if m.annotations is not None else None
    return f, ann


def parse_field_file(path) -> RationalVectorField:
    m = _load_json(path, RationalModel, "vector field")
    num, den = m.coeffs()
    return RationalVectorField.of(num, den)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _grid(text: str):
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected N_r,N_t") from None
    return (a, b)


def _int_list(text: str):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--grid", type=_grid, help="polar grid N_r,N_t")
    g.add_argument("--tol", type=float, help="tolerance for the check being run")
    g.add_argument("--max-period", type=int, dest="max_period")
    g.add_argument("--max-iter", type=int, dest="max_iter")
    g.add_argument("--annotations", help="annotation JSON overriding the map file's")
    g.add_argument("--output", help="write the report here instead of stdout")
    g.add_argument("--format", choices=["json", "text"])
    g.add_argument("--seed", type=int)
    g.add_argument("--config", help="JSON config; flags take precedence")

    p = _Parser(prog="qcteich", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in [("portrait", "cycles, critical fates and counters"),
                           ("dim", "Teichmueller dimension n_f + n_H + n_J - n_p"),
                           ("aut-rank", "rank of Delta_f on the Moebius vector fields")]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("map")

    sp = sub.add_parser("delta", parents=[common], help="Delta_f of a rational vector field")
    sp.add_argument("map")
    sp.add_argument("field")

    sp = sub.add_parser("rank-invariance", parents=[common], help="dimension under random Moebius conjugation")
    sp.add_argument("map")
    sp.add_argument("--count", type=int, default=10)

    sp = sub.add_parser("bers-demo", parents=[common], help="simple-pole approximation experiment")
    sp.add_argument("--poles", type=_int_list, default=[4, 8, 16, 32])
    sp.add_argument("--target", choices=["smooth", "rational"], default="smooth")

    vp = sub.add_parser("verify", help="numerical identity and inequality checks")
    vsub = vp.add_subparsers(dest="check", required=True, parser_class=_Parser)
    sp = vsub.add_parser("theorem-a", parents=[common])
    sp.add_argument("--domain", choices=["disk", "annulus"], default="annulus")
    sp.add_argument("--r0", type=float, default=0.3)
    sp.add_argument("--count", type=int, default=20)
    sp = vsub.add_parser("stokes", parents=[common])
    sp.add_argument("--domain", choices=["disk", "annulus"], default="disk")
    sp.add_argument("--r0", type=float, default=0.3)
    sp.add_argument("--count", type=int, default=5)
    sp = vsub.add_parser("pompeiu", parents=[common])
    sp.add_argument("--field", choices=["zbar+1", "zbar", "z", "random"], default="zbar+1")
    sp.add_argument("--refine", action="store_true", help="also report the defect on the doubled grid")
    sp = vsub.add_parser("residue", parents=[common])
    sp.add_argument("--domain", choices=["disk", "annulus"], default="annulus")
    sp.add_argument("--r0", type=float, default=0.3)
    sp.add_argument("--count", type=int, default=5)
    sp = vsub.add_parser("rotation", parents=[common])
    sp.add_argument("--domain", choices=["disk", "annulus"], default="annulus")
    sp.add_argument("--r0", type=float, default=0.3)
    sp.add_argument("--samples", type=int, default=64)
    sp = vsub.add_parser("annulus-form", parents=[common])
    sp.add_argument("--r0", type=float, default=0.5)
    sp.add_argument("--profile", default="linear")
    return p


def _merge_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        file_cfg = _load_json(args.config, ConfigModel, "config").model_dump(exclude_none=True)
        cfg.update(file_cfg)
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if cfg["grid"] is not None:
        cfg["grid"] = list(cfg["grid"])
    return cfg


def _dyn_config(cfg) -> DynamicsConfig:
    return DynamicsConfig(max_period=cfg["max_period"], max_iter=cfg["max_iter"])


def _load_map(args, min_degree=2):
    f, ann = parse_map_file(args.map, min_degree)
    if getattr(args, "annotations", None):
        ann = _load_json(args.annotations, AnnotationsModel, "annotations").build()
    return f, ann


def _map_echo(f: RationalMap):
    return {"numerator": [[c.real, c.imag] for c in f.num.coeffs],
            "denominator": [[c.real, c.imag] for c in f.den.coeffs]}


def _domain(kind: str, r0: float, grid, default):
    from .qc import ModelDomain

    n_r, n_t = grid or default
    return ModelDomain.annulus(r0, n_r, n_t) if kind == "annulus" else ModelDomain.disk(n_r, n_t)


# each command returns (results, warnings, verdict)

def cmd_portrait(args, cfg):
    f, ann = _load_map(args)
    p = portrait(f, _dyn_config(cfg), ann)
    return p.to_dict(), list(p.warnings), True


def cmd_dim(args, cfg):
    f, ann = _load_map(args)
    p = portrait(f, _dyn_config(cfg), ann)
    res = {"dim": teich_dim(p), "n_f": p.n_f, "n_H": p.n_H, "n_J": p.n_J, "n_p": p.n_p,
           "degree": p.degree, "bound": 2 * p.degree - 2}
    return res, list(p.warnings), True


def cmd_aut_rank(args, cfg):
    f, _ = _load_map(args, 1)
    return {"aut_rank": aut_rank(f)}, [], True


def cmd_delta(args, cfg):
    f, _ = _load_map(args, 1)
    xi = parse_field_file(args.field)
    d = delta_f(f, xi)
    ok, res = in_tf(f, d)
    return {"delta": d.to_dict(), "in_tf": bool(ok), "tf_residual": res,
            "in_tangent_orbit": in_tangent_orbit(f, d)}, [], True


def cmd_rank_invariance(args, cfg):
    f, ann = _load_map(args)
    rng = np.random.default_rng(cfg["seed"])
    rows = []
    for _ in range(args.count):
        M = MoebiusTransform.random(rng)
        eq, a, b = rank_invariance_check(f, M, _dyn_config(cfg), ann)
        rows.append({"moebius": [[z.real, z.imag] for z in (M.a, M.b, M.c, M.d)],
                     "dim_f": a, "dim_conjugate": b, "equal": eq})
    ok = all(r["equal"] for r in rows)
    return {"all_equal": ok, "trials": rows}, [], ok


def cmd_bers(args, cfg):
    from .qc.bers import CauchyTarget, RationalTarget, bers_density_experiment
    from .sphere import RationalFunction

    target = (CauchyTarget.smooth() if args.target == "smooth"
              else RationalTarget(RationalFunction([4.0], [-1, 0, 0, 0, 1])))
    kw = {}
    if cfg["grid"]:
        kw = {"n_r": cfg["grid"][0], "n_t": cfg["grid"][1]}
    r = bers_density_experiment(target, args.poles, **kw)
    warn = [f"IRLS stagnated at {n} poles" for n, s in zip(r.pole_counts, r.stagnated) if s]
    return r.to_dict(), warn, r.non_increasing


def cmd_verify(args, cfg):
    from .qc import checks

    rng = np.random.default_rng(cfg["seed"])
    tol = cfg["tol"]
    grid = cfg["grid"]
    c = args.check
    if c == "theorem-a":
        dom = _domain(args.domain, args.r0, grid, (256, 256))
        reps = [checks.theorem_a_check(dom, checks.random_vanishing_field(dom, rng),
                                       slack=tol if tol is not None else checks.INEQ_SLACK)
                for _ in range(args.count)]
        ok = all(r.passed for r in reps)
        return {"domain": dom.to_dict(), "max_ratio": max(r.ratio for r in reps),
                "reports": [r.to_dict() for r in reps], "passed": ok}, [], ok
    if c == "stokes":
        dom = _domain(args.domain, args.r0, grid, (256, 256))
        reps = []
        for _ in range(args.count):
            q = checks.random_smooth_field(dom, rng, 2)
            xi = checks.random_smooth_field(dom, rng, -1)
            reps.append(checks.stokes_check(dom, q, xi, tol or checks.QUAD_TOL))
        ok = all(r.passed for r in reps)
        return {"domain": dom.to_dict(), "reports": [r.to_dict() for r in reps], "passed": ok}, [], ok
    if c == "pompeiu":
        from .qc import GridField, ModelDomain

        fns = {"zbar+1": lambda z: np.conj(z) + 1, "zbar": np.conj, "z": lambda z: z + 0j,
               "random": None}
        fn = fns[args.field]
        n_r, n_t = grid or (1024, 1024)

        def run(nr, nt):
            dom = ModelDomain.disk(nr, nt)
            xi = (checks.random_smooth_field(dom, np.random.default_rng(cfg["seed"]), -1)
                  if fn is None else GridField.sample(dom, fn, -1, 0))
            return checks.cauchy_pompeiu_check(xi, tol or 1e-6)

        rep = run(n_r, n_t)
        res = rep.to_dict()
        ok = rep.passed
        if args.refine:
            fine = run(2 * n_r, 2 * n_t)
            res["refined_defect"] = fine.defect
            res["refinement_ratio"] = rep.defect / fine.defect if fine.defect > 0 else None
        return res, [], ok
    if c == "residue":
        dom = _domain(args.domain, args.r0, grid, (256, 256))
        reps = []
        for _ in range(args.count):
            xi = checks.random_smooth_field(dom, rng, -1)
            k = int(rng.integers(1, 4))
            lo = (dom.r_inner if dom.log_radial else 0.0) + 0.1
            radii = rng.uniform(lo, 0.85, size=k)
            poles = [(r * np.exp(2j * np.pi * rng.uniform()), complex(rng.normal(), rng.normal()))
                     for r in radii]
            h = complex(rng.normal(), rng.normal())
            reps.append(checks.residue_check(dom, lambda z, h=h: h * z, poles, xi, tol or checks.QUAD_TOL))
        ok = all(r.passed for r in reps)
        return {"domain": dom.to_dict(), "reports": [r.to_dict() for r in reps], "passed": ok}, [], ok
    if c == "rotation":
        dom = _domain(args.domain, args.r0, grid, (128, 256))
        mu = checks.random_band_limited(dom, rng)
        avg = checks.rotation_average(mu, args.samples)
        rep = checks.rotation_fourier_check(avg, "rotation", alpha=1.0 / args.samples,
                                            mode_tol=tol or checks.MODE_TOL)
        return rep.to_dict(), [], rep.passed
    if c == "annulus-form":
        prof = checks.named_profile(args.profile, args.r0)
        v = checks.annulus_triviality_form(prof)
        return {"profile": args.profile, "r0": args.r0, "value": [v.real, v.imag],
                "trivial": abs(v) <= (tol or 1e-12)}, [], True
    raise InputError(f"unknown check {c}")


COMMANDS = {"portrait": cmd_portrait, "dim": cmd_dim, "aut-rank": cmd_aut_rank, "delta": cmd_delta,
            "rank-invariance": cmd_rank_invariance, "bers-demo": cmd_bers, "verify": cmd_verify}


def _inputs_echo(args):
    skip = {"command", "check", "output", "format", "config", "grid", "tol", "max_period",
            "max_iter", "seed"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _to_text(obj, prefix="") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            lines += _to_text(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            lines += _to_text(v, f"{prefix}{i}.")
    else:
        lines.append(f"{prefix[:-1]}: {json.dumps(obj)}")
    return lines


def _emit(report: dict, fmt: str, output):
    if fmt == "text":
        text = "\n".join(_to_text(report)) + "\n"
    else:
        text = json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serialisable: {type(o).__name__}")


def run(argv=None) -> int:
    t0 = time.perf_counter()
    report = {"version": __version__, "warnings": []}
    fmt, output = "json", None
    try:
        args = build_parser().parse_args(argv)
        fmt, output = args.format or "json", getattr(args, "output", None)
        cfg = _merge_config(args)
        fmt = cfg["format"]
        command = args.command + (f" {args.check}" if args.command == "verify" else "")
        report.update(command=command, inputs=_inputs_echo(args), config=cfg)
        results, warnings, verdict = COMMANDS[args.command](args, cfg)
        report["results"] = results
        report["warnings"] = warnings
        code = EXIT_OK if verdict else EXIT_FAILED
        report["status"] = "ok" if verdict else "verification_failed"
    except ClassificationIndeterminate as e:
        report.update(status="classification_indeterminate", error=str(e))
        code = EXIT_INDETERMINATE
    except InputError as e:
        report.update(status="input_error", error=str(e))
        code = EXIT_INPUT
    except QCTeichError as e:
        report.update(status="failed", error=f"{type(e).__name__}: {e}")
        dump = getattr(e, "dump", None)
        if dump:
            report["dump"] = dump
        code = EXIT_FAILED
    except SystemExit as e:  # --help and --version
        return int(e.code or 0)
    except Exception as e:  # noqa: BLE001
        traceback.print_exc(file=sys.stderr)
        report.update(status="internal_error", error=f"{type(e).__name__}: {e}")
        code = EXIT_FAILED
    report["exit_code"] = code
    report["timings"] = {"total_s": round(time.perf_counter() - t0, 6)}
    try:
        _emit(report, fmt, output)
    except OSError as e:
        sys.stderr.write(f"cannot write report: {e}\n")
        return EXIT_INPUT
    if "error" in report:
        sys.stderr.write(report["error"] + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
