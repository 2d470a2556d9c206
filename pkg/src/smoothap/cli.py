"""Command-line experiment runner.

Subcommands: psi, delta, bv-average, large-sieve, exceptional,
verify-identities.  Reports are written as CSV and/or JSON with the
resolved configuration embedded; fixed seeds give byte-identical reports
across runs and across --threads settings.  Exit codes: 0 success,
1 computation/verification failure, 2 usage error, 3 cache integrity error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

import numpy as np

from . import multfn
from .cache import CharacterSumCache
from .characters import family_A, trivial_character
from .discrepancy import (ExceptionalSet, bv_average, delta_record,
                          u_kernel_chardef, u_kernel_moebius,
                          verify_transfer_identity)
from .errors import (CacheIntegrityError, DomainError, OracleError, RangeError,
                     SizingError)
from .large_sieve import (context_bound, detect_exceptional, exceptional_counts,
                          ls_primal, modulus_range_Q)
from .multfn import dirichlet_inverse, get_values
from .reports import (DECAY_COLUMNS, DISCREPANCY_COLUMNS, EXCEPTIONAL_COLUMNS,
                      IDENTITY_COLUMNS, PSI_COLUMNS, SIEVE_COLUMNS,
                      discrepancy_row, emit_report, fmt_number)
from .sieve import build_sieve, psi, psi_coprime, psi_progression
from .util import ordered_map


def _parse_function(name: str, y: int, f_seed: int, families=None):
    if name == "smooth-indicator":
        return multfn.smooth_indicator(y)
    if name == "moebius-smooth":
        return multfn.moebius_smooth(y)
    if name == "random-unit":
        return multfn.random_unit_circle(f_seed, smooth_bound=y)
    if name.startswith("twist:"):
        _, r, rank = name.split(":")
        fam = families if families is not None else family_A(int(r))
        for chi in fam.members:
            if chi.q == int(r) and chi.rank == int(rank):
                return multfn.character_twist(chi, y)
        raise DomainError(f"no primitive character mod {r} with rank {rank}")
    raise DomainError(f"unknown function spec {name!r}")


def _parse_xi(spec: str):
    if spec == "none":
        return ExceptionalSet(members=[])
    if spec == "trivial":
        return ExceptionalSet.from_characters([trivial_character()])
    if spec.startswith("A:"):
        return ExceptionalSet.from_characters(family_A(int(spec[2:])).members)
    raise DomainError(f"unknown Xi spec {spec!r}")


def _emit(args, name: str, columns, rows, config, summary=None):
    os.makedirs(args.out, exist_ok=True)
    paths = []
    if args.format in ("csv", "both"):
        paths.append(emit_report(os.path.join(args.out, f"{name}.csv"),
                                 "csv", columns, rows, config))
    if args.format in ("json", "both"):
        paths.append(emit_report(os.path.join(args.out, f"{name}.json"),
                                 "json", columns, rows, config, summary))
    for p in paths:
        print(f"wrote {p}")


def cmd_psi(args):
    table = build_sieve(args.x)
    rows = []
    if args.q is None:
        rows.append({"kind": "psi", "x": args.x, "y": args.y, "q": "", "a": "",
                     "count": psi(table, args.x, args.y)})
    elif args.a is None:
        rows.append({"kind": "psi_coprime", "x": args.x, "y": args.y,
                     "q": args.q, "a": "",
                     "count": psi_coprime(table, args.x, args.y, args.q)})
    else:
        rows.append({"kind": "psi_progression", "x": args.x, "y": args.y,
                     "q": args.q, "a": args.a,
                     "count": psi_progression(table, args.x, args.y, args.a, args.q)})
    config = {"command": "psi", "x": args.x, "y": args.y, "q": args.q, "a": args.a}
    for row in rows:
        print(f"{row['kind']} = {row['count']}")
    _emit(args, "psi", PSI_COLUMNS, rows, config)
    return 0


def cmd_delta(args):
    table = build_sieve(args.x)
    f = _parse_function(args.f, args.y, args.f_seed)
    rec = delta_record(f, args.x, args.q, args.a, table)
    config = {"command": "delta", "x": args.x, "y": args.y, "q": args.q,
              "a": args.a, "f": args.f, "f_seed": args.f_seed}
    print(f"delta = {fmt_number(rec.delta.real)} + {fmt_number(rec.delta.imag)}i")
    _emit(args, "delta", DISCREPANCY_COLUMNS, [discrepancy_row(rec)], config)
    return 0


def cmd_bv_average(args):
    xs = [int(v) for v in args.xs.split(",")] if args.xs else [args.x]
    if any(v is None for v in xs):
        raise DomainError("bv-average needs --x or --xs")
    xi = _parse_xi(args.xi)
    table = build_sieve(max(xs))
    decay_rows = []
    records_rows = []
    config = {"command": "bv-average", "x": args.x, "xs": args.xs, "y": args.y,
              "Q": args.Q, "a1": args.a1, "a2": args.a2, "xi": args.xi,
              "f": args.f, "f_seed": args.f_seed,
              "y_rule": args.y_rule, "Q_exp": args.Q_exp}
    for x in xs:
        y = args.y if args.y_rule == "fixed" else max(2, round(x ** (1.0 / 3)))
        Q = args.Q if args.Q is not None else int(x**args.Q_exp)
        f = _parse_function(args.f, y, args.f_seed)
        total, records = bv_average(f, x, Q, args.a1, args.a2, xi, table,
                                    threads=args.threads)
        psi_x = psi(table, x, y)
        normalized = total / psi_x
        print(f"x={x} y={y} Q={Q} total={fmt_number(total)} "
              f"psi={psi_x} normalized={fmt_number(normalized)}")
        decay_rows.append({"x": x, "y": y, "Q": Q, "total": total,
                           "psi": psi_x, "normalized": normalized})
        if len(xs) == 1:
            records_rows = [discrepancy_row(r) for r in records]
    if len(xs) == 1:
        summary = {k: v for k, v in decay_rows[0].items()}
        _emit(args, "bv-average", DISCREPANCY_COLUMNS, records_rows, config, summary)
    else:
        _emit(args, "bv-average-decay", DECAY_COLUMNS, decay_rows, config)
    return 0


def cmd_large_sieve(args):
    if args.Q is None:  # pick the range the inequality is stated for
        args.Q = modulus_range_Q(args.x, args.y, args.c,
                                 weighted=args.weight_mode == "sqrt")
    table = build_sieve(args.x)
    families = family_A(args.Q)
    mask = table.smooth_mask(args.x, args.y)
    smooth_n = np.nonzero(mask)[0]
    rows = []
    best = 0.0
    for trial in range(args.trials):
        a = np.zeros(args.x + 1, dtype=np.complex128)
        if args.coeffs == "ones":
            a[smooth_n] = 1.0
        elif args.coeffs == "pm1":
            rng = random.Random(args.seed * 100003 + trial)
            signs = [1.0 if rng.random() < 0.5 else -1.0 for _ in range(smooth_n.size)]
            a[smooth_n] = signs
        else:
            raise DomainError(f"unknown coefficient family {args.coeffs!r}")
        exp = ls_primal(args.x, args.y, args.Q, a, args.weight_mode, table,
                        families, threads=args.threads)
        exp.trial = trial
        best = max(best, exp.ratio)
        rows.append({"trial": trial, "x": exp.x, "y": exp.y, "Q": exp.Q,
                     "weight_mode": exp.weight_mode, "lhs": exp.lhs,
                     "rhs": exp.rhs, "ratio": exp.ratio})
    config = {"command": "large-sieve", "x": args.x, "y": args.y, "Q": args.Q,
              "coeffs": args.coeffs, "trials": args.trials,
              "weight_mode": args.weight_mode, "seed": args.seed, "c": args.c}
    print(f"max ratio = {fmt_number(best)}")
    _emit(args, "large-sieve", SIEVE_COLUMNS, rows, config,
          summary={"max_ratio": best})
    return 0


def cmd_exceptional(args):
    table = build_sieve(args.x)
    families = family_A(args.Q)
    f = _parse_function(args.f, args.y, args.f_seed, families)
    cache = None
    cache_path = args.cache
    if cache_path is None and os.environ.get("SMOOTHAP_CACHE_DIR"):
        cache_path = os.path.join(os.environ["SMOOTHAP_CACHE_DIR"],
                                  "character_sums.cache")
    if cache_path:
        if os.path.isdir(cache_path) or cache_path.endswith(os.sep):
            cache_path = os.path.join(cache_path, "character_sums.cache")
        os.makedirs(os.path.dirname(os.path.abspath(cache_path)), exist_ok=True)
        cache = CharacterSumCache(cache_path)
    found = detect_exceptional(f, args.x, args.y, args.Q, args.B, args.eps,
                               table, families, threads=args.threads, cache=cache)
    count, weighted = exceptional_counts(found)
    bound = context_bound(args.x, args.B)
    rows = []
    for kind, wits in (("member", found.members), ("near_miss", found.near_misses)):
        for w in wits:
            rows.append({"conductor": w.character.q, "chi_rank": w.character.rank,
                         "witness_X": w.X, "witness_value": w.value,
                         "threshold": w.threshold, "kind": kind})
    config = {"command": "exceptional", "x": args.x, "y": args.y, "Q": args.Q,
              "B": args.B, "eps": args.eps, "f": args.f, "f_seed": args.f_seed,
              "f_record": f.to_record()}
    print(f"|Xi(B)| = {count}, weighted = {fmt_number(weighted)}, "
          f"(log x)^(3B+13) = {fmt_number(bound)} [context only]")
    if cache is not None:
        print(f"cache: {cache.hits} hits, {cache.misses} misses, "
              f"{cache.audits} audited", file=sys.stderr)
        cache.close()
    _emit(args, "exceptional", EXCEPTIONAL_COLUMNS, rows, config,
          summary={"count": count, "weighted": weighted, "context_bound": bound})
    if args.format in ("json", "both"):
        import json as _json
        path = os.path.join(args.out, "exceptional-characters.json")
        doc = {"config": config,
               "members": [w.character.to_record() for w in found.members]}
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(_json.dumps(doc, sort_keys=True, indent=1) + "\n")
        print(f"wrote {path}")
    return 0


def cmd_verify_identities(args):
    table = build_sieve(args.xmax)
    rng = random.Random(args.seed)
    rows = []

    def add(check, params, residual, tol):
        rows.append({"check": check, "params": params, "residual": residual,
                     "tolerance": tol, "ok": residual <= tol})

    # kernel identity: definition route vs divisor-sum route
    fam = family_A(max(args.Dset))
    for D in args.Dset:
        def kernel_worst(q, D=D):
            worst = 0.0
            for n in range(q):
                mo = float(u_kernel_moebius(n, q, D))
                ch = u_kernel_chardef(n, q, D, fam)
                worst = max(worst, abs(ch - mo))
            return worst
        worsts = ordered_map(kernel_worst, range(1, args.qmax + 1), args.threads)
        add("kernel-identity", f"q<={args.qmax},D={D}", max(worsts), 1e-10)

    # transfer identity on random tuples
    xi_triv = ExceptionalSet.from_characters([trivial_character()])
    worst = 0.0
    for trial in range(args.tuples):
        q = rng.randrange(2, 31)
        x = rng.randrange(50, args.xmax + 1)
        D = rng.randrange(1, 11)
        f = multfn.random_unit_circle(seed=args.seed * 1009 + trial,
                                      smooth_bound=50)
        chk = verify_transfer_identity(f, x, q, 1, 1, xi_triv, D, table)
        worst = max(worst, chk.residual / (1 + abs(chk.lhs)))
    add("transfer-identity", f"tuples={args.tuples}", worst, 1e-8)

    # convolution inverse exactness
    worst = 0.0
    for trial in range(5):
        f = multfn.random_unit_circle(seed=1000 + trial)
        g = dirichlet_inverse(f, args.xmax)
        fv = get_values(f, table, args.xmax)
        gv = get_values(g, table, args.xmax)
        conv = np.zeros(args.xmax + 1, dtype=np.complex128)
        for d in range(1, args.xmax + 1):
            conv[d::d] += fv[d] * gv[1 : args.xmax // d + 1]
        worst = max(worst, float(np.max(np.abs(conv[2:]))))
    add("dirichlet-inverse", f"n<={args.xmax}", worst, 1e-10)

    config = {"command": "verify-identities", "qmax": args.qmax,
              "tuples": args.tuples, "xmax": args.xmax,
              "Dset": list(args.Dset), "seed": args.seed}
    ok = all(r["ok"] for r in rows)
    for r in rows:
        status = "ok" if r["ok"] else "FAIL"
        print(f"{r['check']:20s} {r['params']:20s} residual={fmt_number(r['residual'])} "
              f"tol={fmt_number(r['tolerance'])} {status}")
    _emit(args, "verify-identities", IDENTITY_COLUMNS, rows, config,
          summary={"all_ok": ok})
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smoothap",
                                 description="Smooth-number / character-sum experiment runner")
    ap.add_argument("--out", default="reports", help="output directory")
    ap.add_argument("--format", choices=["csv", "json", "both"], default="both")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--cache", default=None, help="character-sum cache file or dir")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("psi", help="smooth counting queries")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--a", type=int, default=None)
    p.set_defaults(fn=cmd_psi)

    p = sub.add_parser("delta", help="one progression discrepancy")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--f", default="smooth-indicator")
    p.add_argument("--f-seed", type=int, default=0)
    p.set_defaults(fn=cmd_delta)

    p = sub.add_parser("bv-average", help="sum of |Delta_Xi| over moduli")
    p.add_argument("--x", type=int, default=None)
    p.add_argument("--xs", default=None, help="comma list of x for a decay curve")
    p.add_argument("--y", type=int, default=None)
    p.add_argument("--y-rule", choices=["fixed", "cuberoot"], default="fixed")
    p.add_argument("--Q", type=int, default=None)
    p.add_argument("--Q-exp", type=float, default=0.55)
    p.add_argument("--a1", type=int, default=1)
    p.add_argument("--a2", type=int, default=1)
    p.add_argument("--xi", default="trivial")
    p.add_argument("--f", default="smooth-indicator")
    p.add_argument("--f-seed", type=int, default=0)
    p.set_defaults(fn=cmd_bv_average)

    p = sub.add_parser("large-sieve", help="evaluate the smooth large-sieve ratio")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--Q", type=int, default=None,
                   help="modulus range; omit to derive it from --c")
    p.add_argument("--coeffs", choices=["ones", "pm1"], default="ones")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--weight-mode", choices=["unweighted", "sqrt"], default="unweighted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c", type=float, default=0.2,
                   help="inequality-range exponent c, recorded in reports")
    p.set_defaults(fn=cmd_large_sieve)

    p = sub.add_parser("exceptional", help="dyadic scan for exceptional characters")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--f", default="smooth-indicator")
    p.add_argument("--f-seed", type=int, default=0)
    p.set_defaults(fn=cmd_exceptional)

    p = sub.add_parser("verify-identities", help="exact-identity verification suite")
    p.add_argument("--qmax", type=int, default=60)
    p.add_argument("--tuples", type=int, default=25)
    p.add_argument("--xmax", type=int, default=2000)
    p.add_argument("--Dset", type=lambda s: tuple(int(v) for v in s.split(",")),
                   default=(1, 2, 3, 5, 10))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify_identities)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (DomainError, SizingError, RangeError, OracleError) as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}),
              file=sys.stderr)
        return 2
    except CacheIntegrityError as exc:
        print(json.dumps({"error": str(exc), "type": "CacheIntegrityError"}),
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
