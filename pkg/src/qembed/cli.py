"""Command-line surface: embed, audit, strat, decompose, net.

Exit codes: 0 success, 2 invariant failure (a machine-readable witness is
written), 3 input error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import audit as audit_mod
from . import holonomy as holonomy_mod
from . import lattices as lattices_mod
from . import pipelines
from .quotient import EnumerationCapError, build_net
from .spaces import construct_space

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_INPUT = 3


class InputError(Exception):
    pass


class InvariantFailure(Exception):
    def __init__(self, witness: dict):
        super().__init__(json.dumps(witness, sort_keys=True))
        self.witness = witness


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if isinstance(payload, str):
            fh.write(payload)
        else:
            json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def _cmd_embed(args) -> int:
    spec = _load_json(args.space)
    try:
        _, emb = pipelines.embed_space(spec, method=args.method)
    except (ValueError, EnumerationCapError) as exc:
        raise InputError(str(exc)) from exc
    with open(args.out, "wb") as fh:
        fh.write(audit_mod.serialize_embedding(emb))
        fh.write(b"\n")
    print(f"embedded: target_dim={emb.target_dim} claimed={emb.claimed_distortion}")
    return EXIT_OK


def _cmd_audit(args) -> int:
    spec = _load_json(args.space)
    space = construct_space(spec)
    with open(args.embedding, "rb") as fh:
        emb = audit_mod.deserialize_embedding(fh.read(), space)
    report = audit_mod.empirical_distortion(space, emb, args.pairs, args.seed)
    _write_json(args.report, report.to_json())
    print(f"distortion={report.distortion:.6g} claimed={report.claimed_bound} "
          f"pass={report.passed}")
    if report.passed is False:
        raise InvariantFailure({"kind": "distortion-exceeds-claim",
                                "report": json.loads(report.to_json())})
    return EXIT_OK


def _cmd_strat(args) -> int:
    data = _load_json(args.lattice)
    try:
        basis = lattices_mod.lattice_from_json(data)
        report = lattices_mod.strat_report(basis)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _write_json(args.report, report)
    if report["empirical_diam"] > report["analytic_diam"]:
        raise InvariantFailure({"kind": "diameter-bound-violated", "report": report})
    print(f"scales={report['scales']} diam<={report['analytic_diam']:.6g}")
    return EXIT_OK


def _cmd_decompose(args) -> int:
    data = _load_json(args.holonomy)
    try:
        mats = holonomy_mod.holonomy_from_json(data)
        dec = holonomy_mod.canonical_decomposition(mats)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    report = dec.to_report()
    _write_json(args.report, report)
    err = dec.reconstruction_error(mats)
    if err > 1e-8:
        raise InvariantFailure({"kind": "reconstruction-error", "error": err})
    print(f"blocks={[(b['kind'], b['dim']) for b in report['blocks']]}")
    return EXIT_OK


def _cmd_net(args) -> int:
    spec = _load_json(args.space)
    space = construct_space(spec)
    rng = np.random.default_rng(args.seed)
    samples = space.sampler(args.samples, rng)
    try:
        net = build_net(space, samples, args.eps)
    except (ValueError, EnumerationCapError) as exc:
        raise InputError(str(exc)) from exc
    cover = max(float(np.min(space.distances_to_many(s, net.points))) for s in samples)
    if cover > args.eps + 1e-9:
        raise InvariantFailure({"kind": "net-covering-failed", "radius": cover})
    _write_json(args.out, {"eps": args.eps, "points": net.points.tolist(),
                           "covering_radius": cover})
    print(f"net: {len(net)} points, covering radius {cover:.6g}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qembed",
                                 description="bi-Lipschitz embeddings of flat quotients")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="construct an embedding for a space spec")
    p.add_argument("--space", required=True)
    p.add_argument("--method", default="auto",
                   choices=["auto", "doubling", "annulus", "cone", "product",
                            "patch", "torus2", "ellipsoid"])
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_embed)

    p = sub.add_parser("audit", help="audit an embedding's empirical distortion")
    p.add_argument("--space", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True)
    p.set_defaults(fn=_cmd_audit)

    p = sub.add_parser("strat", help="short basis, scales and diameter report")
    p.add_argument("--lattice", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(fn=_cmd_strat)

    p = sub.add_parser("decompose", help="canonical decomposition of holonomy matrices")
    p.add_argument("--holonomy", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(fn=_cmd_decompose)

    p = sub.add_parser("net", help="greedy epsilon-net of a space")
    p.add_argument("--space", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_net)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(json.dumps({"error": "input", "detail": str(exc)}), file=sys.stderr)
        return EXIT_INPUT
    except audit_mod.DeserializeError as exc:
        print(json.dumps({"error": "input", "detail": str(exc)}), file=sys.stderr)
        return EXIT_INPUT
    except InvariantFailure as exc:
        print(json.dumps(exc.witness, sort_keys=True), file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
