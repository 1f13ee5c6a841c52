"""Command-line front end.

Every subcommand emits a report record ``{check, verdict, residual,
certificates}`` and exits 0 on pass, 1 on a failed verdict and 2 on an input
error.
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import coaction as co
from . import csalg, errors, examples, fqgroup, io, morita
from ._linalg import DEFAULT_TOL

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
MAX_TOL = 1e-2


@dataclass(frozen=True)
class RunConfig:
    tol: float = DEFAULT_TOL
    seed: int = 0
    output: object = None
    format: str = "json"
    jobs: int = 1

    def __post_init__(self):
        if not (0 < self.tol <= MAX_TOL):
            raise errors.InputError(f"tolerance in (0, {MAX_TOL}]", detail=str(self.tol))
        if self.format not in ("json", "text"):
            raise errors.InputError("format is json or text", detail=self.format)
        if self.jobs < 1:
            raise errors.InputError("jobs >= 1", detail=str(self.jobs))

    @property
    def threshold(self):
        return self.tol * morita.CHECK_FACTOR


def record(check, verdict, residual=None, /, **certificates):
    return {"check": check, "verdict": bool(verdict), "residual": residual, "certificates": certificates}


def failure_record(check, exc):
    return record(check, False, exc.residual, error=type(exc).__name__, identity=exc.identity, detail=exc.detail)


# ---------------------------------------------------------------------------
# subcommand bodies: each takes (path or None, args, cfg) and returns a record


def _max_residual(res):
    vals = [v for v in res.values() if isinstance(v, (int, float))]
    return max(vals) if vals else None


def do_validate(path, args, cfg):
    kind = args.kind
    obj = io.load(path, kind, cfg.tol, cfg.seed)
    if kind == "algebra":
        w = obj.wedderburn
        return record("validate-algebra", True, w.residual, dim=obj.dim, blocks=list(obj.blocks), seed=w.seed)
    if kind == "hopf":
        return record("validate-hopf", True, _max_residual(obj.residuals), dim=obj.dim,
                      residuals=obj.residuals, is_kac=obj.is_kac)
    if kind == "coaction":
        return record("validate-coaction", True, _max_residual(obj.residuals), side=obj.side,
                      residuals=obj.residuals, fixed_dim=obj.fixed_basis.shape[1])
    return record("validate-biaction", True, obj.commutation_residual, dim=obj.A.dim,
                  left=obj.left.residuals, right=obj.right.residuals)


def do_haar(path, args, cfg):
    G = io.load(path, "hopf", cfg.tol, cfg.seed)
    r = G.residuals.get("haar", fqgroup._haar_residual(G.H, G.comul, np.asarray(G.haar.coeffs)))
    return record("haar", r <= cfg.threshold, r, haar=np.asarray(G.haar.coeffs),
                  faithful=G.haar.faithful)


def do_freeness(path, args, cfg):
    c = io.load(path, "coaction", cfg.tol, cfg.seed)
    o = co.freeness_oracles(c)
    g = o.galois
    return record("freeness", g.free, None, free=g.free, rank=g.rank, expected_rank=g.expected_rank,
                  localized_free=o.localized_free, spectral_free=o.spectral_free, oracles_agree=o.agree,
                  note="equivariant modules checked on the generating family H_U (x) A")


def do_spectral(path, args, cfg):
    c = io.load(path, "coaction", cfg.tol, cfg.seed)
    idx = range(len(c.G.irreps)) if args.irrep is None else [args.irrep]
    subs = [co.spectral_subspace(c, i).to_dict() for i in idx]
    worst = max(s["defect"] for s in subs)
    return record("spectral", worst <= cfg.threshold, worst, subspaces=subs)


def do_canonical_state(path, args, cfg):
    c = io.load(path, "coaction", cfg.tol, cfg.seed)
    s = co.canonical_state(c)
    return record("canonical-state", True, s.invariance_residual, state=np.asarray(s.coeffs), dim_q=s.dim_q,
                  q_scalar=s.q_scalar, frobenius=s.frobenius.to_dict())


def do_frobenius(path, args, cfg):
    A = io.load(path, "algebra", cfg.tol, cfg.seed)
    if args.functional:
        obj = io.read_json(args.functional)
        phi = io._vector(io._field(obj, "coeffs", io.Source(args.functional)), A.dim,
                         io.Source(args.functional), "coeffs")
    else:
        tr = np.asarray(A.regular_trace_vector)
        phi = tr / (tr @ A.unit)
    f = csalg.check_functional(A, phi)
    if not f.faithful:
        return record("frobenius", False, f.min_eigenvalue, faithful=False)
    fr = csalg.frobenius_report(A, f)
    return record("frobenius", fr.frobenius_residual <= cfg.threshold, fr.frobenius_residual,
                  q_system=fr.q_scalar is not None, **fr.to_dict())


def do_kms(path, args, cfg):
    c = io.load(path, "coaction", cfg.tol, cfg.seed)
    s = co.canonical_state(c)
    r = co.kms_residual(c, s.coeffs)
    return record("kms", r <= cfg.threshold, r, state=np.asarray(s.coeffs))


def do_morita(path, args, cfg):
    b = io.load(path, "biaction", cfg.tol, cfg.seed)
    rep = morita.mkey_report(b)
    return record("morita", rep.verdict, max(rep.mkey_residuals), **rep.to_dict())


def do_exchange(path, args, cfg):
    b = io.load(path, "biaction", cfg.tol, cfg.seed)
    e = morita.exchange_map(b)
    return record("exchange", e.defect <= cfg.threshold * max(1.0, e.lam), e.defect, **e.to_dict())


def do_onesided(path, args, cfg):
    if args.bundle:
        b = io.load(args.bundle, "biaction", cfg.tol, cfg.seed)
        rep = morita.onesided_report(b.right, b.fixed1)
    else:
        c = io.load(path, "coaction", cfg.tol, cfg.seed)
        if args.subalgebra:
            B = io.vectors_from_dict(io.read_json(args.subalgebra), c.A.dim, io.Source(args.subalgebra))
        else:
            B = c.A.unit[:, None]
        rep = morita.onesided_report(c, B)
    return record("onesided", rep.verdict, max(rep.identity_residuals), **rep.to_dict())


def do_cotensor(path, args, cfg):
    b1 = io.load(args.bundle, "biaction", cfg.tol, cfg.seed)
    b2 = io.load(args.bundle2, "biaction", cfg.tol, cfg.seed)
    ct = morita.cotensor(b1, b2)
    rep = morita.mkey_report(ct.bi)
    dA, dB, dH = ct.dims
    if args.emit:
        with open(args.emit, "w") as fh:
            fh.write(io.dumps(io.biaction_to_dict(ct.bi)) + "\n")
    return record("cotensor", rep.verdict, max(rep.mkey_residuals), dim=ct.bi.A.dim,
                  expected_dim=dA * dB / dH, report=rep.to_dict())


def do_examples(path, args, cfg):
    which = args.example
    if which == "crossed-product":
        G = examples.group(args.group, cfg.tol)
        out = io.biaction_to_dict(examples.crossed_product(G, cfg.tol))
    elif which == "projective":
        sigma = examples.trivial_cocycle(examples.group_table(f"Z{args.n}xZ{args.n}")) if args.trivial \
            else examples.heisenberg_cocycle(args.n)
        out = io.biaction_to_dict(examples.projective_cocycle_algebra(sigma, cfg.tol))
    else:
        out = io.cocycle_to_dict(examples.heisenberg_cocycle(args.n))
    return out


COMMANDS = {
    "validate": do_validate, "haar": do_haar, "freeness": do_freeness, "spectral": do_spectral,
    "canonical-state": do_canonical_state, "frobenius": do_frobenius, "kms": do_kms,
    "morita": do_morita, "exchange": do_exchange, "onesided": do_onesided, "cotensor": do_cotensor,
    "examples": do_examples,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    env_tol = os.environ.get("QGALOIS_TOL")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=float(env_tol) if env_tol else DEFAULT_TOL,
                        help="numerical tolerance (default 1e-9, or $QGALOIS_TOL)")
    common.add_argument("--seed", type=int, default=0, help="seed for the Wedderburn decomposition")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for multiple inputs")

    p = argparse.ArgumentParser(prog="qgalois", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="validate an input file")
    g = v.add_mutually_exclusive_group(required=True)
    for kind in ("algebra", "hopf", "coaction", "biaction"):
        g.add_argument(f"--{kind}", nargs="+", dest=f"in_{kind}")

    for name, kind in (("haar", "hopf"), ("freeness", "coaction"), ("spectral", "coaction"),
                       ("canonical-state", "coaction"), ("frobenius", "algebra"), ("kms", "coaction"),
                       ("morita", "bundle"), ("exchange", "bundle")):
        s = sub.add_parser(name, parents=[common])
        s.add_argument(f"--{kind}", nargs="+", required=True, dest="inputs")
        if name == "spectral":
            s.add_argument("--irrep", type=int)
        if name == "frobenius":
            s.add_argument("--functional", help='JSON {"coeffs": [[re, im], ...]}; default normalized trace')

    s = sub.add_parser("onesided", parents=[common])
    s.add_argument("--coaction", help="right coaction; B defaults to C1")
    s.add_argument("--subalgebra", help='JSON {"vectors": [...]} spanning B')
    s.add_argument("--bundle", help="bi-action bundle; B is the first fixed point algebra")

    s = sub.add_parser("cotensor", parents=[common])
    s.add_argument("--bundle", required=True)
    s.add_argument("--bundle2", required=True)
    s.add_argument("--emit", help="also write the cotensor bundle here")

    s = sub.add_parser("examples", parents=[common])
    s.add_argument("example", choices=("crossed-product", "projective", "cocycle"))
    s.add_argument("--group", default="Z2", help="Z<n>, S3 or products like Z2xZ2")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--trivial", action="store_true", help="projective: trivial cocycle instead")
    return p


def _inputs(args):
    if args.command == "validate":
        for kind in ("algebra", "hopf", "coaction", "biaction"):
            files = getattr(args, f"in_{kind}")
            if files:
                args.kind = kind
                return files
    if args.command == "onesided":
        if not (args.coaction or args.bundle):
            raise errors.InputError("--coaction or --bundle given")
        return [args.coaction]
    return getattr(args, "inputs", None) or [None]


def _run_one(fn, path, args, cfg):
    check = args.command
    try:
        rec = fn(path, args, cfg)
    except errors.InputError as exc:
        return failure_record(check, exc), EXIT_INPUT
    except errors.QGaloisError as exc:
        return failure_record(check, exc), EXIT_FAIL
    if args.command == "examples":
        return rec, EXIT_PASS
    if path is not None:
        rec["input"] = str(path)
    rec["tolerance"] = cfg.tol
    rec["seed"] = cfg.seed
    return rec, EXIT_PASS if rec["verdict"] else EXIT_FAIL


def render_text(rec):
    lines = []

    def walk(prefix, x):
        if isinstance(x, dict):
            for k in sorted(x):
                walk(f"{prefix}.{k}" if prefix else str(k), x[k])
        else:
            lines.append(f"{prefix}: {x}")

    walk("", io.jsonable(rec))
    return "\n".join(lines)


def run(argv=None):
    """Parse ``argv`` and run the subcommand; returns ``(exit code, text, output path)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_INPUT if exc.code else EXIT_PASS), "", None
    try:
        cfg = RunConfig(args.tol, args.seed, args.output, args.format, args.jobs)
        paths = _inputs(args)
    except errors.InputError as exc:
        return EXIT_INPUT, io.dumps(failure_record(args.command, exc)), args.output
    fn = COMMANDS[args.command]
    if cfg.jobs > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(lambda p: _run_one(fn, p, args, cfg), paths))
    else:
        results = [_run_one(fn, p, args, cfg) for p in paths]
    recs = [r for r, _ in results]
    code = max(c for _, c in results)
    body = recs[0] if len(recs) == 1 else recs
    if cfg.format == "text":
        text = "\n\n".join(render_text(r) for r in recs)
    else:
        text = io.dumps(body)
    return code, text, cfg.output


def main(argv=None):
    code, text, out = run(argv)
    if text:
        if out:
            with open(out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
