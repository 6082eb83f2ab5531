"""``gitkit`` command line: stability tests, walls, corpus runs and envelope checks.

Every report carries a run manifest (subcommand, parameters, seed, version,
sha256 of each input file) so a run can be repeated byte for byte.

Exit codes: 0 completed, 1 input error, 2 some result is undecided.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .envelope import (
    NilpotentRep,
    ThetaSpec,
    check_psi_equivariance,
    derived_flag,
    sl2_complete,
    wm_descriptor,
)
from .groebner import UndecidedError
from .moment import CompactRepresentation, ProjectivePoint, compare_flow_exact, kempf_ness_flow
from .nonreductive import (
    HLinearisation,
    HUndecided,
    classify_corpus,
    h_oracle,
    h_test,
    h_walls,
    uhat_oracle,
    uhat_test,
)
from .poly import as_fraction, format_fraction
from .torus import (
    P12Point,
    TorusLinearisation,
    product_torus_test,
    rank_stratum,
    torus_test,
    vgit_chambers,
)
from .weighted import (
    PolynomialSyntaxError,
    WeightedPolynomial,
    monomial_basis,
    monomial_str,
    parse_polynomial,
    u_action_matrix,
)


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict[str, Any]
    seed: int
    tool_version: str = __version__
    input_digests: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "input_digests": dict(sorted(self.input_digests.items())),
        }


class _Inputs:
    """Reads input files and records their digests for the manifest."""

    def __init__(self):
        self.digests: dict[str, str] = {}

    def read(self, path: str) -> str:
        p = Path(path)
        try:
            data = p.read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        self.digests[str(path)] = hashlib.sha256(data).hexdigest()
        return data.decode()

    def json(self, path: str):
        text = self.read(path)
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None


# -- report emission ---------------------------------------------------------------


def _flatten(row: dict) -> dict:
    # nested values (certificates, traces) become compact JSON cells
    return {
        k: json.dumps(v, sort_keys=True, separators=(",", ":")) if isinstance(v, (dict, list)) else v
        for k, v in row.items()
    }


def emit_report(results: Any, manifest: RunManifest, fmt: str = "json") -> str:
    """JSON or CSV (one row per result, manifest as a comment line, nested values as JSON cells)."""
    if fmt == "json":
        doc = {"manifest": manifest.to_json(), "results": results}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise InputError(f"unknown format {fmt!r}")
    rows = results if isinstance(results, list) else [results]
    rows = [_flatten(r) if isinstance(r, dict) else {"value": r} for r in rows]
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(manifest.to_json(), sort_keys=True) + "\n")
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    if cols:
        writer.writeheader()
        for r in rows:
            writer.writerow(r)
    return buf.getvalue()


# -- argument helpers --------------------------------------------------------------


def _rationals(text: str) -> list:
    try:
        return [as_fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"bad rational list {text!r}: {exc}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"bad integer list {text!r}") from None


def _load_poly(arg: str, d: int | None, inputs: _Inputs) -> WeightedPolynomial:
    """A polynomial from a JSON file, a text file, or inline text."""
    if os.path.exists(arg):
        text = inputs.read(arg)
        stripped = text.strip()
        if stripped.startswith("{"):
            try:
                p = WeightedPolynomial.from_json(json.loads(stripped))
            except (KeyError, TypeError, json.JSONDecodeError) as exc:
                raise InputError(f"{arg}: not a polynomial object ({exc})") from None
            if d is not None and p.d != d:
                raise InputError(f"{arg}: polynomial has d={p.d}, expected {d}")
            return p
        return parse_polynomial(stripped, d)
    return parse_polynomial(arg, d)


def _load_corpus(path: str, d: int | None, inputs: _Inputs) -> list[WeightedPolynomial]:
    p = Path(path)
    files = sorted(p.glob("*.json")) if p.is_dir() else [p]
    polys = []
    for f in files:
        data = inputs.json(str(f))
        items = data if isinstance(data, list) else [data]
        for item in items:
            try:
                if isinstance(item, str):
                    polys.append(parse_polynomial(item, d))
                else:
                    polys.append(WeightedPolynomial.from_json(item))
            except (KeyError, TypeError) as exc:
                raise InputError(f"{f}: bad polynomial entry ({exc})") from None
    return polys


def _lin_from_args(args, inputs: _Inputs) -> TorusLinearisation:
    if args.lin:
        try:
            return TorusLinearisation.from_json(inputs.json(args.lin))
        except (KeyError, TypeError) as exc:
            raise InputError(f"{args.lin}: bad linearisation ({exc})") from None
    if args.weights is None:
        raise InputError("give --weights or --lin")
    flat = _rationals(args.weights)
    r = args.rank
    if len(flat) % r:
        raise InputError(f"{len(flat)} weight entries do not split into rank-{r} vectors")
    weights = [flat[i : i + r] for i in range(0, len(flat), r)]
    twist = _rationals(args.twist) if args.twist is not None else [0] * r
    if len(twist) == 1 and r > 1:
        twist = twist * r
    return TorusLinearisation(r, weights, twist)


def _budget(args) -> int | None:
    return getattr(args, "budget", None)


def _verdict_row(v, **extra) -> dict:
    row = dict(extra)
    row.update(v.to_json())
    return row


# -- subcommands -------------------------------------------------------------------


def cmd_torus_test(args, inputs):
    lin = _lin_from_args(args, inputs)
    support = _ints(args.support) if args.support else list(range(len(lin.weights)))
    for i in support:
        if not 0 <= i < len(lin.weights):
            raise InputError(f"support index {i} out of range")
    v = torus_test(lin.support_points(support), lin)
    return _verdict_row(v, support=support), False


def cmd_vgit(args, inputs):
    lin = _lin_from_args(args, inputs)
    return vgit_chambers(lin).to_json(), False


def cmd_product(args, inputs):
    data = inputs.json(args.a)
    try:
        a = P12Point(data["a0"], data["a"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"{args.a}: expected {{a0, a}} ({exc})") from None
    ysup = []
    for chunk in args.ysupport.split(";"):
        if chunk.strip():
            m = _ints(chunk)
            if len(m) != 4:
                raise InputError(f"Y-monomial {chunk!r} needs four exponents")
            ysup.append(tuple(m))
    v = product_torus_test(a, ysup, args.N, as_fraction(args.delta))
    return _verdict_row(v, rank_stratum=rank_stratum(a)), False


def _h_common(args, inputs):
    p = _load_poly(args.poly, args.d, inputs)
    lin = HLinearisation(args.d if args.d else p.d, as_fraction(args.delta))
    return p, lin


def cmd_uhat(args, inputs):
    p, lin = _h_common(args, inputs)
    row = _verdict_row(uhat_test(p, lin, _budget(args)), polynomial=p.to_str(), delta=format_fraction(lin.delta))
    if args.oracle:
        row["oracle"] = uhat_oracle(p, lin, seed=args.seed).to_json()
    return row, False


def cmd_h(args, inputs):
    p, lin = _h_common(args, inputs)
    try:
        v = h_test(p, lin, _budget(args), seed=args.seed)
    except HUndecided as exc:
        return {"polynomial": p.to_str(), "status": "Undecided", "partial": exc.partial}, True
    row = _verdict_row(v, polynomial=p.to_str(), delta=format_fraction(lin.delta))
    if args.oracle_samples:
        row["oracle"] = h_oracle(p, lin, args.oracle_samples, args.seed).to_json()
    return row, False


def cmd_walls(args, inputs):
    return h_walls(args.d).to_json(), False


def cmd_classify(args, inputs):
    polys = _load_corpus(args.corpus, args.d, inputs)
    deltas = _rationals(args.deltas)
    rep = classify_corpus(polys, deltas, args.test, _budget(args), args.seed, args.jobs)
    if args.format == "csv":
        rows = []
        for i, (p, row) in enumerate(zip(polys, rep.cells)):
            for cell in row:
                rows.append({"index": i, "polynomial": p.to_str(), "delta": cell["delta"],
                             "status": cell["status"], "certificate": cell.get("certificate"),
                             "endpoint_caveat": cell["endpoint_caveat"]})
        return rows, rep.undecided > 0
    out = rep.to_json()
    out["polynomials"] = [p.to_str() for p in polys]
    return out, rep.undecided > 0


def cmd_flow(args, inputs):
    rep_data = inputs.json(args.rep)
    try:
        rep = CompactRepresentation.from_json(rep_data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{args.rep}: bad representation ({exc})") from None
    if os.path.exists(args.point):
        coords = inputs.json(args.point)
        if isinstance(coords, dict):
            coords = coords["coords"]
    else:
        coords = [c for c in args.point.split(",")]
    point = ProjectivePoint(coords)
    if len(point.coords) != rep.dim:
        raise InputError(f"point has {len(point.coords)} coordinates, rep has dim {rep.dim}")
    twist = [float(as_fraction(t)) for t in args.twist.split(",")]
    res = kempf_ness_flow(rep, point, twist if len(twist) > 1 else twist[0],
                          step=args.step, tol=args.tol, max_iter=args.max_iter)
    return res.to_json(with_trace=args.trace), False


def cmd_compare_flow(args, inputs):
    flat = _rationals(args.weights)
    r = args.rank
    if len(flat) % r:
        raise InputError("weights do not split into rank-sized vectors")
    weights = [tuple(int(x) for x in flat[i : i + r]) for i in range(0, len(flat), r)]
    twist = _rationals(args.twist)
    rep = compare_flow_exact(weights, twist if r > 1 else twist[0], args.samples, args.seed,
                             args.margin, args.tol, args.max_iter, args.count_filtered)
    return rep.to_json(), False


def _nilrep(args, inputs) -> NilpotentRep:
    try:
        return NilpotentRep.from_json(inputs.json(args.rep))
    except (KeyError, TypeError) as exc:
        raise InputError(f"{args.rep}: bad representation ({exc})") from None


def cmd_envelope(args, inputs):
    rep = _nilrep(args, inputs)
    if args.action == "dims":
        out = wm_descriptor(rep).to_json()
        out["flag_dims"] = list(derived_flag(rep).dims)
        return out, False
    report = check_psi_equivariance(rep, args.trials, args.seed)
    out = report.to_json()
    out["passed"] = report.passed
    return out, False


def cmd_sl2(args, inputs):
    data = inputs.json(args.matrix)
    if isinstance(data, dict):
        data = data["matrix"]
    return sl2_complete(data).to_json(), False


def cmd_matrix(args, inputs):
    basis = monomial_basis(args.d)
    mat = u_action_matrix(args.d)
    names = ("lambda", "mu", "nu")
    return {
        "basis": [monomial_str(m) for m in basis],
        "matrix": [[e.to_str(names) for e in row] for row in mat],
    }, False


# -- parser ------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, seed=True, jobs=False) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if jobs:
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)


def _add_lin(p: argparse.ArgumentParser) -> None:
    p.add_argument("--weights", help="comma-separated weight entries, grouped by --rank")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--twist", help="comma-separated twist (one entry per rank)")
    p.add_argument("--lin", help="linearisation JSON {rank, weights, twist}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gitkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gitkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("torus-test", help="Hilbert-Mumford test for a torus action on projective space",
                       description="Torus Hilbert-Mumford test: is 0 in the (interior of the) hull of the twisted support weights.")
    _add_lin(p)
    p.add_argument("--support", help="comma-separated indices of nonzero coordinates (default: all)")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_torus_test)

    p = sub.add_parser("vgit-chambers", help="walls and chambers of a rank-1 twist",
                       description="Variation of GIT for a C* action: walls in the twist line and the semistable set in each chamber.")
    _add_lin(p)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_vgit)

    p = sub.add_parser("product-test", help="T_c test on P^12 x Y_d",
                       description="Torus test on the product P^12 x Y_d with linearisation O(N) x O(1), including the a0 = 0 criterion.")
    p.add_argument("--a", required=True, help="JSON {a0, a: 3x4 matrix}")
    p.add_argument("--ysupport", required=True, help="Y-monomial exponents i,j,k,l separated by ';'")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--delta", default="0")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_product)

    for name, func, desc in (
        ("uhat-test", cmd_uhat, "Stability for U x| C* on X_d via the section multiplicity M and the top z-degree."),
        ("h-test", cmd_h, "Stability for U x| GL(2) on X_d via exact parabolic reduction to small polynomial systems."),
    ):
        p = sub.add_parser(name, help=desc.split(" via ")[0], description=desc)
        p.add_argument("--d", type=int, help="weighted degree (checked against the polynomial)")
        p.add_argument("--delta", default="0", help="rational twist")
        p.add_argument("--poly", required=True, help="polynomial text, or a file with text or JSON {d, terms}")
        p.add_argument("--budget", type=int, help="Groebner step budget (env GITKIT_GROEBNER_BUDGET)")
        if name == "uhat-test":
            p.add_argument("--oracle", action="store_true", help="also run the sampling oracle")
        else:
            p.add_argument("--oracle-samples", type=int, default=0)
        _add_common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("walls", help="candidate twist walls for X_d",
                       description="Candidate walls 2m - d/2 and the endpoints +-d/2 for the twist on X_d.")
    p.add_argument("--d", type=int, required=True)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_walls)

    p = sub.add_parser("classify", help="verdict matrix for a corpus over twists",
                       description="Classify every polynomial of a corpus at every twist; per-cell failures are reported, not raised.")
    p.add_argument("--corpus", required=True, help="JSON file or directory of *.json (arrays of polynomials)")
    p.add_argument("--deltas", required=True, help="comma-separated rationals")
    p.add_argument("--d", type=int)
    p.add_argument("--test", choices=("h", "uhat"), default="h")
    p.add_argument("--budget", type=int)
    _add_common(p, jobs=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("flow", help="moment-map norm-square flow",
                       description="Kempf-Ness flow: descend |mu|^2 along the complexified group and classify the limit.")
    p.add_argument("--rep", required=True, help="JSON {dim, mode: diagonal, weights} or {dim, generators}")
    p.add_argument("--point", required=True, help="comma-separated coordinates or a JSON file")
    p.add_argument("--twist", default="0")
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--trace", action="store_true", help="attach the residual series")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("compare-flow", help="flow classification against the exact torus test",
                       description="Sample points of a diagonal representation and compare the flow with the exact hull verdict.")
    p.add_argument("--weights", required=True)
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--twist", default="0")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--margin", type=float, default=0.25)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--count-filtered", action="store_true",
                   help="--samples counts points that pass the margin filter")
    _add_common(p)
    p.set_defaults(func=cmd_compare_flow)

    p = sub.add_parser("envelope", help="reductive envelope data for a nilpotent representation",
                       description="Derived flag and W_m dimensions (dims), or exact checks of the U-equivariance of psi (check).")
    p.add_argument("action", choices=("check", "dims"))
    p.add_argument("--rep", required=True, help="JSON {r, dimV, generators}")
    p.add_argument("--trials", type=int, default=50)
    _add_common(p)
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("sl2", help="complete a nilpotent matrix to an sl2 triple",
                       description="Jordan blocks of a nilpotent e and the triple (e, h, f) built from the Sym^k model.")
    p.add_argument("--matrix", required=True, help="JSON matrix (rationals as strings or ints)")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_sl2)

    p = sub.add_parser("matrix", help="the U-action matrix on the monomial basis of X_d",
                       description="Matrix of z -> z + lambda x^2 + mu xy + nu y^2 on the degree-d monomial basis (columns are images).")
    p.add_argument("--d", type=int, required=True)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_matrix)
    return parser


def _parameters(args) -> dict:
    skip = {"func", "command", "output", "format", "seed"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and k != "jobs"}


_VALUE_OPTS = {"--deltas", "--delta", "--twist", "--weights", "--point", "--support"}
_NUMERIC = re.compile(r"^-[0-9./]")


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    """Let ``--deltas -2,0,1/2`` through: argparse would read the value as an option."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_OPTS:
            nxt = next(it, None)
            if nxt is not None and _NUMERIC.match(nxt):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative_values(argv))
    inputs = _Inputs()
    try:
        results, undecided = args.func(args, inputs)
    except (InputError, PolynomialSyntaxError, ValueError, ZeroDivisionError) as exc:
        print(f"gitkit {args.command}: {exc}", file=sys.stderr)
        return 1
    except UndecidedError as exc:
        results, undecided = {"status": "Undecided", "reason": str(exc)}, True
    manifest = RunManifest(args.command, _parameters(args), getattr(args, "seed", 0),
                           input_digests=inputs.digests)
    doc = emit_report(results, manifest, args.format)
    if args.output:
        Path(args.output).write_text(doc)
    else:
        sys.stdout.write(doc)
    return 2 if undecided else 0


def dispatch(argv: Sequence[str]) -> int:
    try:
        return main(argv)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
