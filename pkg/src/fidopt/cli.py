"""Command-line interface: ``fidopt analyze|construct|verify|random|sample|oracle``.

Exit codes: 0 success (or optimal, for ``verify``), 1 valid input but the
POVM is not optimal, 2 invalid input. Errors go to stderr as
``error [<invariant>]: <message>``.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import io as fio
from .config import ENV_PROFILE, PROFILES, ToleranceConfig, get_profile
from .divergences import divergence_report
from .errors import FidoptError, InvalidPovmError, OptimalityDiagnosticWarning
from .instances import PRNG, STRUCTURES, InstanceSpec
from .optimal import (build_canonical_pvm, classify_dichotomy, mixing_family,
                      restrict_to_joint_support, verify_f_optimal, weakly_commute)
from .oracle import qubit_grid_oracle, random_povm_oracle
from .pencil import is_sum_singular, pencil_eigensystem
from .pure import arc_sweep
from .sampling import CSV_HEADER, sample_report
from .states import DensityOperator, Povm, equivalent
from .trace import jordan_split, minimal_t_optimal, verify_t_optimal

EXIT_OK, EXIT_SUBOPTIMAL, EXIT_INVALID = 0, 1, 2

ARC_CSV_HEADER = ("lambda", "x", "y", "z", "kappa")
ARC_LAMBDAS = (0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 5.0, 10.0, float("inf"))


class UsageError(FidoptError):
    invariant = "usage"


def _meta(args, **extra) -> dict:
    meta = {"version": __version__, "tol_profile": args.tol_profile, "seed": args.seed,
            "prng": PRNG}
    meta.update(extra)
    return meta


def _load_pair(args, tol: ToleranceConfig) -> tuple[DensityOperator, DensityOperator]:
    rho = fio.state_from_json(fio.read_json(args.rho), tol)
    sigma = fio.state_from_json(fio.read_json(args.sigma), tol)
    return rho, sigma


def _dichotomy_dict(rep) -> dict:
    return {"weak_commutativity": rep.weak_commutativity,
            "commuting_flag": rep.commuting_flag,
            "compatible_flag": rep.compatible_flag,
            "equivalent_flag": rep.equivalent_flag,
            "unique_minimal": rep.unique_minimal,
            "consistent": rep.consistent,
            "M_rho_sigma": fio.povm_to_json(rep.M_rho_sigma),
            "M_sigma_rho": fio.povm_to_json(rep.M_sigma_rho)}


def cmd_analyze(args, tol: ToleranceConfig) -> int:
    rho, sigma = _load_pair(args, tol)
    restricted = is_sum_singular(rho, sigma, tol)
    if restricted:
        _, R = restrict_to_joint_support(Povm.from_elements([np.eye(rho.dim)], ["I"], tol),
                                         rho, sigma, tol)
        rep = classify_dichotomy(R.rho, R.sigma, tol)
        pencil = pencil_eigensystem(R.rho, R.sigma, tol=tol)
        weights = np.eye(len(rep.M_rho_sigma))[0]
        M_rs = R.extend(rep.M_rho_sigma, weights)
        M_sr = R.extend(rep.M_sigma_rho, np.eye(len(rep.M_sigma_rho))[0])
    else:
        rep = classify_dichotomy(rho, sigma, tol)
        pencil = pencil_eigensystem(rho, sigma, tol=tol)
        M_rs, M_sr = rep.M_rho_sigma, rep.M_sigma_rho
    div = divergence_report(rho, sigma, {"M_rho_sigma": M_rs, "M_sigma_rho": M_sr})
    out = {"divergences": div.to_dict(),
           "dichotomy": _dichotomy_dict(rep),
           "pencil": pencil.to_json(),
           "restricted_to_joint_support": restricted,
           "meta": _meta(args)}
    if restricted:
        out["dichotomy"]["M_rho_sigma"] = fio.povm_to_json(M_rs)
        out["dichotomy"]["M_sigma_rho"] = fio.povm_to_json(M_sr)
    fio.write_json(out, args.out)
    if args.arc_csv:
        rows = arc_sweep(rho, sigma, ARC_LAMBDAS, tol)
        fio.write_text(fio.csv_text(ARC_CSV_HEADER, rows), args.arc_csv)
    return EXIT_OK


def _parse_q0(spec: str, rho, sigma, tol) -> np.ndarray | None:
    if spec == "zero":
        return None
    try:
        lam = float(spec)
    except ValueError:
        return fio.matrix_from_json(fio.read_json(spec))
    if not 0.0 <= lam <= 1.0:
        raise InvalidPovmError(f"Q0 scale {lam} outside [0, 1]", "q0-interval")
    return lam * jordan_split(rho, sigma, tol).P_zero


def construct(method: str, rho, sigma, tol: ToleranceConfig) -> tuple[Povm, list[str]]:
    """Build the POVM named by ``method``; returns it with informational notes."""
    notes: list[str] = []
    if method == "m-rho-sigma":
        return build_canonical_pvm(rho, sigma, tol, allow_singular_sum=True), notes
    if method == "m-sigma-rho":
        return build_canonical_pvm(sigma, rho, tol, allow_singular_sum=True), notes
    if method.startswith("mix:"):
        try:
            p = float(method[4:])
        except ValueError:
            raise UsageError(f"bad mixing weight in {method!r}") from None
        E1 = build_canonical_pvm(rho, sigma, tol, allow_singular_sum=True)
        E2 = build_canonical_pvm(sigma, rho, tol, allow_singular_sum=True)
        E = mixing_family(E1, E2, p, rho, sigma, tol)
        if weakly_commute(rho, sigma) or equivalent(E, E1, tol):
            notes.append("supports commute: the mixture collapses to the unique minimal PVM")
        return E, notes
    if method.startswith("t-optimal:"):
        Q0 = _parse_q0(method[len("t-optimal:"):], rho, sigma, tol)
        return minimal_t_optimal(rho, sigma, Q0, tol), notes
    raise UsageError(f"unknown method {method!r}")


def cmd_construct(args, tol: ToleranceConfig) -> int:
    rho, sigma = _load_pair(args, tol)
    E, notes = construct(args.method, rho, sigma, tol)
    for n in notes:
        print(f"note: {n}", file=sys.stderr)
    out = fio.povm_to_json(E)
    out["meta"] = _meta(args, method=args.method, notes=notes)
    fio.write_json(out, args.out)
    return EXIT_OK


def cmd_verify(args, tol: ToleranceConfig) -> int:
    rho, sigma = _load_pair(args, tol)
    E = fio.povm_from_json(fio.read_json(args.povm), tol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OptimalityDiagnosticWarning)
        if args.criterion == "fidelity":
            v = verify_f_optimal(E, rho, sigma, tol)
            ok = v.is_f_optimal
        else:
            v = verify_t_optimal(E, rho, sigma, tol)
            ok = v.is_t_optimal
    out = v.to_dict()
    out["meta"] = _meta(args)
    fio.write_json(out, args.out)
    return EXIT_OK if ok else EXIT_SUBOPTIMAL


def cmd_random(args, tol: ToleranceConfig) -> int:
    spec = InstanceSpec(args.dim, args.rank_rho, args.rank_sigma, args.seed, args.structure)
    rho, sigma = spec.generate()
    meta = {"prng": PRNG, "seed": args.seed, "spec": spec.to_dict(), "version": __version__}
    docs = {}
    for name, M in (("rho", rho), ("sigma", sigma)):
        DensityOperator(M, tol)  # files must re-validate on read
        docs[name] = dict(fio.matrix_to_json(M), meta=dict(meta, role=name))
    if args.out is None:
        fio.write_json(docs, None)
    else:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, doc in docs.items():
            fio.write_json(doc, outdir / f"{name}.json")
    return EXIT_OK


def cmd_sample(args, tol: ToleranceConfig) -> int:
    rho, sigma = _load_pair(args, tol)
    E = fio.povm_from_json(fio.read_json(args.povm), tol)
    rep = sample_report(E, rho, sigma, args.shots, args.seed)
    fio.write_text(fio.csv_text(CSV_HEADER, [rep.csv_row()]), args.out)
    return EXIT_OK


def cmd_oracle(args, tol: ToleranceConfig) -> int:
    rho, sigma = _load_pair(args, tol)
    kind, _, n = args.mode.partition(":")
    try:
        n = int(n)
    except ValueError:
        raise UsageError(f"bad oracle size in {args.mode!r}") from None
    if kind == "qubit-grid":
        rep = qubit_grid_oracle(rho, sigma, n)
    elif kind == "random-povm":
        rep = random_povm_oracle(rho, sigma, n, args.seed)
    else:
        raise UsageError(f"unknown oracle mode {args.mode!r}")
    out = rep.to_dict()
    out["meta"] = _meta(args)
    fio.write_json(out, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-profile", choices=sorted(PROFILES), default=None,
                        help="tolerance profile (default: $FIDOPT_TOL_PROFILE or 'default')")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path (stdout if omitted)")

    p = argparse.ArgumentParser(prog="fidopt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"fidopt {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def pair(name, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("rho")
        s.add_argument("sigma")
        return s

    s = pair("analyze", "divergences, dichotomy and pencil eigenstructure")
    s.add_argument("--arc-csv", default=None,
                   help="for pure qubit pairs, write the arc sweep (lambda,x,y,z,kappa)")
    s.set_defaults(func=cmd_analyze)

    s = pair("construct", "build an optimal POVM")
    s.add_argument("--method", required=True,
                   help="m-rho-sigma | m-sigma-rho | mix:<p> | t-optimal:<zero|lam|Q0.json>")
    s.set_defaults(func=cmd_construct)

    s = pair("verify", "check optimality of a POVM")
    s.add_argument("povm")
    s.add_argument("--criterion", choices=("fidelity", "trace"), default="fidelity")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("random", parents=[common], help="seeded random state pair")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--rank-rho", type=int, required=True)
    s.add_argument("--rank-sigma", type=int, required=True)
    s.add_argument("--structure", choices=STRUCTURES, default="generic")
    s.set_defaults(func=cmd_random)

    s = pair("sample", "Monte-Carlo estimates of induced BC and TV (CSV)")
    s.add_argument("povm")
    s.add_argument("--shots", type=int, default=100_000)
    s.set_defaults(func=cmd_sample)

    s = pair("oracle", "brute-force bounds (qubit-grid:<n> or random-povm:<k>)")
    s.add_argument("--mode", required=True)
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.tol_profile = args.tol_profile or os.environ.get(ENV_PROFILE, "default")
        tol = get_profile(args.tol_profile)
        return args.func(args, tol)
    except FidoptError as exc:
        print(f"error [{exc.invariant}]: {exc}", file=sys.stderr)
    except (OSError, ValueError) as exc:
        print(f"error [input]: {exc}", file=sys.stderr)
    return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
