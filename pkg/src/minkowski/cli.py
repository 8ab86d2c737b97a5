"""Command-line front end.

Every subcommand reads its inputs from flags or from a JSON scenario file
(``--scenario``), prints one JSON document (CSV for ``levelset``) and exits
with 0 on success, 2 on malformed input, 3 when a numerical result could
not be certified and 1 when an invariant fails.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .birkhoff import birkhoff_vv, birkhoff_vh
from .bodies import ConvexBody, body_from_json
from .core import (DEFAULT_TOL, Functional, Hyperplane, Tolerances, as_vector, make_rng,
                   vector_to_json)
from .errors import ConvergenceError, MinkowskiError, MonotonicityError
from .legendre import dual_norm, legendre, legendre_inverse
from .norms import Norm, norm_from_json
from .projection import project
from .subdifferential import (ConvexFunction, MonotoneData, cyclic_monotone_check,
                              function_from_json, norm_gradient, rockafellar_potential,
                              subgradient_construct, subgradient_member)
from .verify import SUITES, VerifyConfig, run_suite

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_PARSE = 2
EXIT_UNCERTIFIED = 3

LEVELSET_RAYS = 720


class ScenarioError(ValueError):
    """Malformed scenario input; the message names the offending field."""


@dataclass
class Scenario:
    """Parsed inputs shared by the subcommands."""

    norm: Norm | None = None
    body: ConvexBody | None = None
    function: ConvexFunction | None = None
    vectors: dict = field(default_factory=dict)
    seed: int = 0
    tol: Tolerances = DEFAULT_TOL
    data: MonotoneData | None = None
    raw: dict = field(default_factory=dict)

    def vector(self, name: str, required: bool = True):
        if name not in self.vectors:
            if required:
                raise ScenarioError(f"missing vector field {name!r}")
            return None
        return self.vectors[name]


# -- parsing ------------------------------------------------------------------------

def _load_json(text: str, what: str):
    """JSON from a literal, or from a file when given as ``@path``."""
    try:
        if text.startswith("@"):
            with open(text[1:]) as fh:
                return json.load(fh)
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"{what}: {exc}") from None


def _spec(text: str, what: str):
    # bare words such as "euclidean" are accepted without JSON quoting
    t = text.strip()
    if t and t[0] not in "{[\"@" and not t[0].isdigit():
        return t
    return _load_json(t, what)


def parse_vector(text, what: str = "vector") -> np.ndarray:
    """``"3,4"``, ``"[3, 4]"`` or a list of numbers."""
    try:
        if isinstance(text, str):
            t = text.strip()
            vals = json.loads(t) if t.startswith("[") else [float(c) for c in t.split(",")]
        else:
            vals = text
        return as_vector(vals)
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"{what}: cannot parse vector ({exc})") from None


VECTOR_FIELDS = ("x", "y", "v", "u", "phi", "normal", "center")


def build_scenario(args) -> Scenario:
    """Merge ``--scenario`` with the command-line flags (flags win)."""
    raw = {}
    if getattr(args, "scenario", None):
        raw = _load_json("@" + args.scenario, "scenario")
        if not isinstance(raw, dict):
            raise ScenarioError("scenario: top level must be a JSON object")
    for key in ("norm", "body", "function", "data"):
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = _spec(val, key)

    vectors = {}
    for k, v in raw.get("points", {}).items():
        vectors[k] = parse_vector(v, f"points.{k}")
    for k, v in raw.get("vectors", {}).items():
        vectors[k] = parse_vector(v, f"vectors.{k}")
    for k in VECTOR_FIELDS:
        if k in raw:
            vectors[k] = parse_vector(raw[k], k)
        val = getattr(args, k, None)
        if val is not None:
            vectors[k] = parse_vector(val, f"--{k}")

    seed = getattr(args, "seed", None)
    seed = int(raw.get("seed", 0)) if seed is None else seed
    tol = DEFAULT_TOL
    if "tolerances" in raw:
        try:
            tol = DEFAULT_TOL.replace(**raw["tolerances"])
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"tolerances: {exc}") from None

    sc = Scenario(vectors=vectors, seed=seed, tol=tol, raw=raw)
    dim = next((v.size for v in vectors.values()), None)
    if "data" in raw:
        try:
            sc.data = MonotoneData.from_json(raw["data"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"data: {exc}") from None
        dim = sc.data.dim
    if "body" in raw:
        try:
            sc.body = body_from_json(raw["body"], dim, tol)
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"body: {exc}") from None
        dim = sc.body.dim
    if "norm" in raw:
        try:
            sc.norm = norm_from_json(raw["norm"], dim)
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"norm: {exc}") from None
    if "function" in raw:
        try:
            sc.function = function_from_json(raw["function"], sc.norm, tol)
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"function: {exc}") from None
        if sc.norm is None and hasattr(sc.function, "norm"):
            sc.norm = sc.function.norm
    return sc


def _need(obj, what: str):
    if obj is None:
        raise ScenarioError(f"missing {what}")
    return obj


# -- commands -------------------------------------------------------------------------

def cmd_norm(sc: Scenario, args) -> tuple[int, dict]:
    N = _need(sc.norm, "norm")
    x = as_vector(sc.vector("x"), N.dim)
    value = float(N.evaluate(x))
    grad = None if value == 0 else vector_to_json(N.grad_array(x, sc.tol))
    return EXIT_OK, {"norm": N.to_json(), "value": value, "gradient": grad}


def cmd_legendre(sc: Scenario, args) -> tuple[int, dict]:
    N = _need(sc.norm, "norm")
    phi = sc.vector("phi", required=False)
    if phi is not None:
        phi = as_vector(phi, N.dim)
        x = legendre_inverse(N, Functional(phi), sc.tol, seed=sc.seed)
        return EXIT_OK, {"x": vector_to_json(x), "norm": float(N.evaluate(x)),
                         "dual_norm": float(dual_norm(N, phi, sc.tol))}
    x = as_vector(sc.vector("x"), N.dim)
    L = legendre(N, x, sc.tol)
    return EXIT_OK, {"L": vector_to_json(L.coeffs), "dual_norm": float(dual_norm(N, L, sc.tol))}


def cmd_birkhoff(sc: Scenario, args) -> tuple[int, dict]:
    N = _need(sc.norm, "norm")
    x = as_vector(sc.vector("x"), N.dim)
    normal = sc.vector("normal", required=False)
    if normal is not None:
        rep = birkhoff_vh(N, x, Hyperplane(Functional(as_vector(normal, N.dim)), 0.0), sc.tol)
    else:
        rep = birkhoff_vv(N, x, as_vector(sc.vector("y"), N.dim), sc.tol)
    return EXIT_OK, rep.to_json()


def _norm_body(sc: Scenario):
    N = _need(sc.norm, "norm")
    K = _need(sc.body, "body")
    if K.dim != N.dim:
        raise ScenarioError("body and norm dimensions differ")
    return N, K


def cmd_project(sc: Scenario, args) -> tuple[int, dict]:
    N, K = _norm_body(sc)
    res = project(N, K, as_vector(sc.vector("x"), N.dim), sc.tol)
    return (EXIT_OK if res.certified else EXIT_UNCERTIFIED), res.to_json()


def cmd_distance(sc: Scenario, args) -> tuple[int, dict]:
    N, K = _norm_body(sc)
    res = project(N, K, as_vector(sc.vector("x"), N.dim), sc.tol)
    out = {"distance": res.distance, "certified": res.certified, "in_band": res.in_band}
    return (EXIT_OK if res.certified else EXIT_UNCERTIFIED), out


def _ray_directions(n: int, rays: int, seed: int) -> np.ndarray:
    if n == 2:
        theta = 2 * np.pi * np.arange(rays) / rays
        return np.column_stack([np.cos(theta), np.sin(theta)])
    D = make_rng(seed).standard_normal((rays, n))
    return D / np.linalg.norm(D, axis=1, keepdims=True)


def _level_point(N, K, c, u, level, tol) -> np.ndarray:
    """The point c + t u with d_K(c + t u) = level, by bisection on t.

    Along a ray from a point of K the distance is convex and zero at t = 0,
    hence increasing once positive, so the crossing is unique.
    """
    def d(t):
        return project(N, K, c + t * u, tol).distance

    hi = 1.0
    while d(hi) < level:
        hi *= 2.0
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if d(mid) < level:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return c + 0.5 * (lo + hi) * u


def levelset_rows(N: Norm, K: ConvexBody | None, levels, rays: int = LEVELSET_RAYS,
                  seed: int = 0, tol: Tolerances = DEFAULT_TOL) -> list[list[float]]:
    """Rows (level, ray_index, x_1..x_n) on the level sets of d_K (of the norm without K).

    In the plane ray k points at angle 2 pi k / rays; in higher dimensions
    the rays are seeded Gaussian directions.
    """
    D = _ray_directions(N.dim, rays, seed)
    rows = []
    for level in levels:
        if K is None:
            pts = level * D / np.asarray(N.evaluate(D)).reshape(-1, 1)
        else:
            c = K.interior_point()
            pts = np.array([_level_point(N, K, c, u, level, tol) for u in D])
        for k, p in enumerate(pts):
            rows.append([float(level), k] + [float(v) for v in p])
    return rows


def cmd_levelset(sc: Scenario, args):
    N = _need(sc.norm, "norm")
    try:
        levels = [float(s) for s in args.levels.split(",")]
    except ValueError:
        raise ScenarioError(f"--levels: cannot parse {args.levels!r}") from None
    if any(not lv > 0 for lv in levels):
        raise ScenarioError("--levels must be positive")
    if args.samples < 1:
        raise ScenarioError("--samples must be positive")
    return EXIT_OK, levelset_rows(N, sc.body, levels, args.samples, sc.seed, sc.tol)


def cmd_subdiff(sc: Scenario, args) -> tuple[int, dict]:
    f = _need(sc.function, "function")
    N = _need(sc.norm, "norm")
    x = as_vector(sc.vector("x"), f.dim)
    if args.action == "check":
        cert = subgradient_member(f, x, as_vector(sc.vector("v"), f.dim), N, tol=sc.tol,
                                  seed=sc.seed)
        return (EXIT_OK if cert.member else EXIT_INVARIANT), cert.to_json()
    if args.action == "construct":
        u = as_vector(sc.vector("u"), f.dim)
        w = subgradient_construct(f, x, u, N, sc.tol, seed=sc.seed)
        return EXIT_OK, {"w": vector_to_json(w), "f_plus": f.dir_deriv_plus(x, u),
                         "L_w_u": float(legendre(N, w, sc.tol)(u))}
    g = norm_gradient(f, x, N, sc.tol)
    return EXIT_OK, {"gradient": vector_to_json(g)}


def cmd_rockafellar(sc: Scenario, args) -> tuple[int, dict]:
    S = _need(sc.data, "data (pairs of x and w)")
    N = _need(sc.norm, "norm")
    if N.dim != S.dim:
        raise ScenarioError("data and norm dimensions differ")
    ok, cycle, slack = cyclic_monotone_check(S, N, sc.tol)
    if not ok:
        return EXIT_INVARIANT, {"monotone": False, "cycle": cycle, "slack": slack}
    f = rockafellar_potential(S, N, sc.tol)
    return EXIT_OK, {"monotone": True, "slack": slack, "potential": f.to_json()}


def cmd_verify(sc: Scenario, args) -> tuple[int, dict]:
    cfg = VerifyConfig(seed=sc.seed)
    if args.scale != 1.0:
        cfg = cfg.scaled(args.scale)
    total, parts = run_suite(args.suite, cfg)
    out = total.to_json()
    out["criteria"] = [p.to_json() for p in parts]
    if not args.timing:
        # wall times vary run to run; drop them so output is reproducible
        out.pop("wall_time")
        for p in out["criteria"]:
            p.pop("wall_time")
    return (EXIT_OK if total.ok else EXIT_INVARIANT), out


COMMANDS = {
    "norm": cmd_norm,
    "legendre": cmd_legendre,
    "birkhoff": cmd_birkhoff,
    "project": cmd_project,
    "distance": cmd_distance,
    "levelset": cmd_levelset,
    "subdiff": cmd_subdiff,
    "rockafellar": cmd_rockafellar,
    "verify": cmd_verify,
}


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minkowski",
                                description="Convex analysis in smooth, strictly convex normed spaces")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help, *fields):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--scenario", help="JSON scenario file")
        sp.add_argument("--norm", help="norm: a name or JSON, e.g. '{\"type\":\"p\",\"p\":4}'")
        sp.add_argument("--seed", type=int, default=None)
        for f in fields:
            sp.add_argument(f"--{f}")
        return sp

    add("norm", "evaluate the norm and its gradient", "x")
    add("legendre", "Legendre transform (--x) or its inverse (--phi)", "x", "phi")
    add("birkhoff", "test x against y, or against the hyperplane ker(normal)", "x", "y", "normal")
    add("project", "nearest point of a body", "x", "body")
    add("distance", "distance to a body", "x", "body")
    sp = add("levelset", "CSV points on level sets of the distance (or norm)", "body")
    sp.add_argument("--levels", default="1")
    sp.add_argument("--samples", type=int, default=LEVELSET_RAYS)
    sp = add("subdiff", "sub-differential tools", "x", "v", "u", "function")
    sp.add_argument("action", choices=["check", "construct", "gradient"])
    add("rockafellar", "convex potential of cyclically monotone data", "data")
    sp = sub.add_parser("verify", help="run the invariant suites")
    sp.add_argument("--suite", default="all", choices=sorted(SUITES))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--scale", type=float, default=1.0, help="multiply every case count")
    sp.add_argument("--timing", action="store_true", help="include wall times")
    return p


def _emit(payload, out) -> None:
    if isinstance(payload, list):
        w = csv.writer(out, lineterminator="\n")
        n = len(payload[0]) - 2 if payload else 0
        w.writerow(["level", "ray_index"] + [f"x{i + 1}" for i in range(n)])
        w.writerows(payload)
    else:
        out.write(json.dumps(payload, sort_keys=True) + "\n")


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        sc = build_scenario(args) if args.command != "verify" else Scenario(seed=args.seed)
        code, payload = COMMANDS[args.command](sc, args)
    except ScenarioError as exc:
        err.write(json.dumps({"error": "parse", "message": str(exc)}) + "\n")
        return EXIT_PARSE
    except ConvergenceError as exc:
        err.write(json.dumps({"error": "not certified", "message": str(exc),
                              "diagnostics": {k: str(v) for k, v in exc.diagnostics.items()}}) + "\n")
        return EXIT_UNCERTIFIED
    except MonotonicityError as exc:
        err.write(json.dumps({"error": "not monotone", "message": str(exc),
                              "cycle": exc.cycle}) + "\n")
        return EXIT_INVARIANT
    except (MinkowskiError, ValueError) as exc:
        # domain errors on the given input (zero vector, wrong dimension, ...)
        err.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_PARSE
    _emit(payload, out)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
