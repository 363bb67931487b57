"""Command-line front end: classify, construct, verify and lab probes.

Every command prints a JSON run report. Exit codes: 0 success, 1 failure
(verification FAIL, no construction, probe violation), 2 usage or input
errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path

from .builder import ConstructionError, CoverageError, construct
from .exterior import KForm
from .mesh import BoxDomain, PAField
from .problab import ProbeViolation, isotropy_probe, vector_probe, form_probe
from .rational import format_rational, parse_rational, parse_vector
from .setlab import FormSet, classify, validate_hint
from .verifier import verify

INSTANCE_KEYS = {"n", "elements", "partition_hint", "domain", "epsilon"}


class UsageError(ValueError):
    pass


@dataclass
class Instance:
    E: FormSet
    partition_hint: tuple | None
    domain: BoxDomain
    epsilon: Fraction

    def to_json(self) -> dict:
        return {
            "n": self.E.n,
            "elements": [e.to_json() for e in self.E],
            "partition_hint": None if self.partition_hint is None else [list(p) for p in self.partition_hint],
            "domain": self.domain.to_json(),
            "epsilon": format_rational(self.epsilon),
        }


def _parse_element(n: int, obj) -> KForm:
    if isinstance(obj, list):
        coeffs = parse_vector(obj)
        if len(coeffs) != comb(n, 2):
            raise ValueError(f"element has {len(coeffs)} coefficients, expected {comb(n, 2)}")
        return KForm(n, 2, coeffs)
    w = KForm.from_json(obj)
    if w.n != n or w.k != 2:
        raise ValueError("element is not a 2-form on R^n")
    return w


def parse_instance(text: str) -> Instance:
    """Strict instance parser. Elements are coefficient lists or k-form objects."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ValueError("instance must be a JSON object")
    unknown = set(obj) - INSTANCE_KEYS
    if unknown:
        raise ValueError(f"unknown fields: {sorted(unknown)}")
    if "n" not in obj or "elements" not in obj:
        raise ValueError("instance needs n and elements")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError("n must be an integer")
    if not isinstance(obj["elements"], list):
        raise ValueError("elements must be a list")
    E = FormSet(n, tuple(_parse_element(n, e) for e in obj["elements"]))
    hint = obj.get("partition_hint")
    if hint is not None:
        hint = validate_hint(E, hint)
    domain = BoxDomain.unit_cube(n) if obj.get("domain") is None else BoxDomain.from_json(obj["domain"])
    if domain.n != n:
        raise ValueError("domain dimension does not match n")
    eps = Fraction(1, 100) if obj.get("epsilon") is None else parse_rational(obj["epsilon"])
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    return Instance(E, hint, domain, eps)


@dataclass
class RunReport:
    subcommand: str
    input_digest: str
    result: dict
    wall_time: float
    exit_code: int = 0

    def to_json(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "input_digest": self.input_digest,
            "result": self.result,
            "wall_time": self.wall_time,
            "exit_code": self.exit_code,
        }

    @classmethod
    def from_json(cls, obj) -> "RunReport":
        return cls(obj["subcommand"], obj["input_digest"], obj["result"], obj["wall_time"], obj["exit_code"])


def _digest(*chunks: bytes) -> str:
    h = hashlib.sha256()
    for c in chunks:
        h.update(c)
    return h.hexdigest()


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_instance(path: str) -> tuple[Instance, bytes]:
    raw = _read(path)
    try:
        return parse_instance(raw.decode()), raw
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_classify(args) -> tuple[int, dict, bytes]:
    inst, raw = _load_instance(args.instance)
    report = classify(inst.E, inst.partition_hint)
    return 0, report.to_json(), raw


def cmd_construct(args) -> tuple[int, dict, bytes]:
    inst, raw = _load_instance(args.instance)
    try:
        sol = construct(inst.E, inst.domain, inst.epsilon, inst.partition_hint, args.method)
    except CoverageError as exc:
        return 1, {"error": str(exc), "covered": format_rational(exc.report.covered)}, raw
    except ConstructionError as exc:
        result = {"error": str(exc)}
        if exc.certificate is not None:
            result["certificate"] = exc.certificate.to_json()
        return 1, result, raw
    Path(args.output).write_text(json.dumps(sol.field.to_json()))
    result = {"mesh": args.output, "cells": len(sol.field.cells), "covered_volume": format_rational(sol.field.covered_volume), "notes": sol.field.notes}
    code = 0
    if not args.no_verify:
        rep = verify(sol.field, inst.E, require_nonzero_integral=True)
        result["verification"] = rep.to_json()
        code = 0 if rep.passed else 1
    return code, result, raw


def cmd_verify(args) -> tuple[int, dict, bytes]:
    inst, raw_e = _load_instance(args.instance)
    raw_s = _read(args.solution)
    try:
        mesh = PAField.from_json(json.loads(raw_s))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{args.solution}: {exc}") from None
    rep = verify(mesh, inst.E, require_nonzero_integral=args.require_nonzero_integral)
    return (0 if rep.passed else 1), rep.to_json(), raw_s + raw_e


def cmd_lab(args) -> tuple[int, dict, bytes]:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "report")}
    raw = json.dumps(params, sort_keys=True).encode()
    try:
        if args.probe == "lemma31":
            out = vector_probe(args.n, args.trials, args.seed, args.batch, args.max_batches)
        elif args.probe == "thm61":
            out = form_probe(args.n, args.k, args.trials, args.seed, args.batch, args.max_batches)
        else:
            out = isotropy_probe(args.trials, args.seed, args.n)
    except ProbeViolation as exc:
        return 1, {"error": str(exc), "spec": exc.spec.to_json()}, raw
    except AssertionError as exc:
        return 1, {"error": str(exc)}, raw
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return 0, out, raw


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curlset", description="Finite curl inclusions: classify, construct, verify.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify an instance")
    c.add_argument("-i", "--instance", required=True)
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("construct", help="build a piecewise-affine solution")
    c.add_argument("-i", "--instance", required=True)
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--method", choices=["auto", "tiling", "greedy"], default="auto")
    c.add_argument("--no-verify", action="store_true")
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("verify", help="audit a mesh against an instance")
    c.add_argument("-s", "--solution", required=True)
    c.add_argument("-i", "--instance", required=True)
    c.add_argument("--require-nonzero-integral", action="store_true")
    c.set_defaults(func=cmd_verify)

    lab = sub.add_parser("lab", help="sampling probes")
    probes = lab.add_subparsers(dest="probe", required=True)
    for name in ("lemma31", "thm61", "isotropy"):
        q = probes.add_parser(name)
        q.add_argument("--n", type=int, default=4 if name != "thm61" else 6)
        if name == "thm61":
            q.add_argument("--k", type=int, default=2)
        q.add_argument("--trials", type=int, default=100)
        q.add_argument("--seed", type=int, default=0)
        if name != "isotropy":
            q.add_argument("--batch", type=int, default=64)
            q.add_argument("--max-batches", type=int, default=20)
        q.set_defaults(func=cmd_lab)

    for q in [sub.choices[k] for k in ("classify", "construct", "verify")] + list(probes.choices.values()):
        q.add_argument("--report", help="also write the run report here")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on usage errors
    t0 = time.perf_counter()
    try:
        code, result, raw = args.func(args)
    except UsageError as exc:
        print(f"curlset: error: {exc}", file=sys.stderr)
        return 2
    subcommand = args.command if args.command != "lab" else f"lab {args.probe}"
    report = RunReport(subcommand, _digest(raw), result, round(time.perf_counter() - t0, 6), code)
    text = json.dumps(report.to_json(), indent=2, sort_keys=True)
    print(text)
    if getattr(args, "report", None):
        Path(args.report).write_text(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
