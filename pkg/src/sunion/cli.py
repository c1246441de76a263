"""Command-line front end and verification campaigns.

A campaign is a JSON file with a list of items.  Each item is either a
construction (its size is compared with the closed form and its defining
predicate is checked) or a search problem (its maximum is compared with the
closed form and, when listed, its witnesses with named families up to
isomorphism).  Expected values come from the formula evaluators; a literal
``expected`` integer is accepted only so that the harness can be tested
against a deliberately wrong value.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .constructions import (
    NamedFamily,
    build,
    closed_form_size,
    cross_pair_shapes,
    defining_property,
    nonempty_cross_shapes,
)
from .core import Family, FormatError, ParameterError, dumps_family, loads_family, mask_of
from .iso import canonicalize, canonicalize_pair, is_isomorphic, is_subfamily_up_to_iso
from .properties import CHECKERS
from .search import SEARCH_KINDS, SearchProblem, SearchResult, solve
from .shiftlex import is_left_shifted, left_shift_fixpoint, lex_initial, lex_rank, lex_unrank, shift

SCHEMA_VERSION = 1
STATUSES = ("match", "mismatch", "over-budget")
FORMATS = ("json", "csv", "markdown")


class CampaignError(ValueError):
    """A campaign file that does not parse or names illegal parameters."""


# -- named families from short names ------------------------------------------

_INDEXED = re.compile(r"^(J|G)_?(\d+)$")


def named(name: str, n: int, s: int | None = None, k: int | None = None) -> NamedFamily:
    """``K``, ``H``, ``Hstar4``, ``EKR``, ``HM``, ``G2``, ``J_2`` and so on."""
    m = _INDEXED.match(name)
    if m:
        return NamedFamily.make(m.group(1), n, k=k, i=int(m.group(2)))
    if s is not None:
        return NamedFamily.make(name, n, s=s)
    return NamedFamily.make(name, n, k=k)


def _family_spec(spec: dict) -> NamedFamily:
    spec = dict(spec)
    kind = spec.pop("kind")
    n = spec.pop("n")
    return NamedFamily.make(kind, n, **spec)


def _problem(spec: dict) -> SearchProblem:
    spec = dict(spec)
    kind = spec.pop("kind")
    n = spec["n"]
    excl = []
    for e in spec.pop("exclude", []):
        if isinstance(e, str):
            excl.append(named(e, n, s=spec.get("s") if kind == "S_UNION_MAX" else None, k=spec.get("k")))
        else:
            excl.append(_family_spec({"n": n, **e}))
    return SearchProblem(kind, exclusions=tuple(excl), **spec)


# -- campaigns ----------------------------------------------------------------


@dataclass
class Row:
    id: str
    claim: str
    instance: str
    expected: int | None
    computed: int | None
    status: str
    witnesses: list = field(default_factory=list)
    witness_check: bool | None = None
    runtime: float = 0.0

    def to_dict(self, timing: bool) -> dict:
        out = {
            "id": self.id,
            "claim": self.claim,
            "instance": self.instance,
            "expected": self.expected,
            "computed": self.computed,
            "status": self.status,
            "witness_count": len(self.witnesses),
            "witness_check": self.witness_check,
            "witnesses": self.witnesses,
        }
        if timing:
            out["runtime"] = round(self.runtime, 3)
        return out


@dataclass
class Report:
    name: str
    rows: list[Row]

    @property
    def ok(self) -> bool:
        return all(r.status == "match" for r in self.rows)

    def to_dict(self, timing: bool = False) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "campaign": self.name,
            "ok": self.ok,
            "rows": [r.to_dict(timing) for r in self.rows],
        }


def _expected_witness_keys(spec: dict | list, n: int) -> set:
    if isinstance(spec, dict):
        if "cross_shapes" in spec:
            pairs = cross_pair_shapes(n, spec["cross_shapes"])
        else:
            a, b = spec["nonempty_shapes"]
            pairs = nonempty_cross_shapes(n, a, b)
        return {canonicalize_pair(*p).key() for p in pairs}
    return {canonicalize(build(_family_spec({"n": n, **w}))).key() for w in spec}


def _witness_keys(res: SearchResult) -> set:
    out = set()
    for w in res.witnesses:
        out.add(canonicalize_pair(*w).key() if isinstance(w, tuple) else canonicalize(w).key())
    return out


def run_item(item: dict) -> Row:
    start = time.monotonic()
    item_id = str(item.get("id", ""))
    claim = str(item.get("claim", ""))
    if "construction" in item:
        nf = _family_spec(item["construction"])
        expected = item.get("expected", closed_form_size(nf))
        fam = build(nf)
        prop, param = defining_property(nf)
        holds = bool(CHECKERS[prop](fam, param))
        status = "match" if expected == len(fam) and holds else "mismatch"
        return Row(item_id, claim, nf.label, expected, len(fam), status, [], holds, time.monotonic() - start)
    if "search" not in item:
        raise CampaignError(f"item {item_id!r}: needs 'construction' or 'search'")
    spec = dict(item["search"])
    if "budget" in item:
        spec["budget"] = item["budget"]
    p = _problem(spec)
    res = solve(p, shards=int(item.get("shards", 1)))
    expected = item.get("expected", res.closed_form_expected)
    witness_check = None
    if "witnesses" in item:
        witness_check = _witness_keys(res) == _expected_witness_keys(item["witnesses"], p.n)
    if "witness_count" in item:
        count_ok = len(res.witnesses) == item["witness_count"]
        witness_check = count_ok if witness_check is None else witness_check and count_ok
    if not res.stats.complete:
        status = "over-budget"
    elif expected is not None and expected == res.maximum and witness_check is not False:
        status = "match"
    else:
        status = "mismatch"
    instance = json.dumps(p.to_dict(), sort_keys=True)
    return Row(item_id, claim, instance, expected, res.maximum, status, res.witness_texts(), witness_check, time.monotonic() - start)


def load_campaign(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CampaignError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict) or not isinstance(data.get("items", []), list):
        raise CampaignError("line 1: a campaign is an object with an 'items' list")
    if data.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise CampaignError(f"unsupported schema_version {data.get('schema_version')}")
    return data


def run_campaign(data: dict, workers: int = 1) -> Report:
    items = data.get("items", [])
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_item, items))
    else:
        rows = [run_item(it) for it in items]
    return Report(str(data.get("name", "")), rows)


def emit(report: Report, fmt: str = "json", timing: bool = False) -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(timing), indent=2, sort_keys=False) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        cols = ["id", "claim", "instance", "expected", "computed", "status", "witness_count", "witness_check"]
        if timing:
            cols.append("runtime")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in report.rows:
            d = row.to_dict(timing)
            w.writerow(["" if d[c] is None else d[c] for c in cols])
        return buf.getvalue().encode()
    if fmt == "markdown":
        lines = [
            f"### {report.name}",
            "",
            "| claim | instance | expected | computed | witnesses | status |",
            "|---|---|---|---|---|---|",
        ]
        for row in report.rows:
            check = "" if row.witness_check is None else (" (as listed)" if row.witness_check else " (differ)")
            inst = row.instance.replace("|", "\\|")
            lines.append(f"| {row.claim} | `{inst}` | {row.expected} | {row.computed} | {len(row.witnesses)}{check} | {row.status} |")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def bundled_campaigns() -> dict[str, str]:
    out = {}
    for entry in resources.files("sunion").joinpath("campaigns").iterdir():
        if entry.name.endswith(".json"):
            out[entry.name[:-5]] = entry.read_text()
    return dict(sorted(out.items()))


def _campaign_text(ref: str) -> str:
    path = Path(ref)
    if path.exists():
        return path.read_text()
    bundled = bundled_campaigns()
    name = ref[:-5] if ref.endswith(".json") else ref
    if name in bundled:
        return bundled[name]
    raise CampaignError(f"no campaign file or bundled campaign named {ref!r}")


# -- commands -----------------------------------------------------------------


def _read_family(path: str) -> Family:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return loads_family(text)


def _out(text: str | bytes, path: str | None = None) -> None:
    data = text.encode() if isinstance(text, str) else text
    if path:
        Path(path).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _nf_from_args(args) -> NamedFamily:
    anchors = {}
    for name in ("y", "x0", "D", "D1", "D2", "E", "J"):
        v = getattr(args, f"anchor_{name}", None)
        if v:
            anchors[name] = tuple(int(x) for x in v.split(","))
    kw = {key: getattr(args, key) for key in ("s", "k", "t", "i", "m") if getattr(args, key) is not None}
    return NamedFamily.make(args.kind, args.n, **kw, **anchors)


def cmd_build(args) -> int:
    nf = _nf_from_args(args)
    _out(dumps_family(build(nf), args.form), args.out)
    return 0


def cmd_size(args) -> int:
    nf = _nf_from_args(args)
    built, closed = len(build(nf)), closed_form_size(nf)
    _out(json.dumps({"family": nf.label, "built": built, "closed_form": closed, "match": built == closed}) + "\n")
    return 0 if built == closed else 1


def cmd_check(args) -> int:
    f = _read_family(args.file)
    if args.property == "left_shifted":
        rep = is_left_shifted(f)
    else:
        if args.param is None and args.property not in ("hereditary",):
            raise ParameterError(f"--param is required for {args.property}")
        rep = CHECKERS[args.property](f, args.param)
    _out(json.dumps(rep.to_dict()) + "\n")
    return 0 if rep.holds else 1


def cmd_shift(args) -> int:
    f = _read_family(args.file)
    g = left_shift_fixpoint(f) if args.i is None else shift(f, (args.i, args.j))
    _out(dumps_family(g, args.form), args.out)
    return 0


def cmd_lex(args) -> int:
    if args.rank is not None:
        bits = mask_of(int(x) for x in args.rank.split(","))
        _out(f"{lex_rank(args.n, bits)}\n")
    elif args.unrank is not None:
        bits = lex_unrank(args.n, args.k, args.unrank)
        _out(",".join(str(x + 1) for x in range(args.n) if bits >> x & 1) + "\n")
    else:
        _out(dumps_family(lex_initial(args.n, args.k, args.initial)))
    return 0


def cmd_iso(args) -> int:
    a = _read_family(args.a)
    if args.b is None:
        c = canonicalize(a)
        _out(dumps_family(c.family))
        return 0
    b = _read_family(args.b)
    value = is_subfamily_up_to_iso(a, b) if args.subfamily else is_isomorphic(a, b)
    _out(json.dumps({"relation": "subfamily" if args.subfamily else "isomorphic", "holds": value}) + "\n")
    return 0 if value else 1


def cmd_search(args) -> int:
    kind = args.kind.upper()
    if kind not in SEARCH_KINDS:
        kind = {"S_UNION": "S_UNION_MAX", "UNIFORM": "UNIFORM_INTERSECTING_MAX", "CROSS": "CROSS_PAIR_MAX", "DIAMETER": "DIAMETER_MAX"}.get(kind, kind)
    spec = {"kind": kind, "n": args.n}
    for key in ("s", "k", "a", "b"):
        if getattr(args, key) is not None:
            spec[key] = getattr(args, key)
    if args.t is not None:
        spec["t"] = args.t
    if args.a_t is not None:
        spec["a_t"] = args.a_t
    if args.min_a is not None:
        spec["min_a"] = args.min_a
    if args.nonempty_b:
        spec["nonempty_b"] = True
    if args.exclude:
        spec["exclude"] = [e.strip() for e in args.exclude.split(",") if e.strip()]
    spec["mode"] = args.mode
    if args.budget is not None:
        spec["budget"] = args.budget
    if args.no_pruning:
        spec["pruning"] = False
    p = _problem(spec)
    res = solve(p, shards=args.shards, workers=args.workers)
    payload = {"schema_version": SCHEMA_VERSION, **res.to_dict(timing=args.timing)}
    _out(json.dumps(payload, indent=2) + "\n", args.report)
    return 0


def cmd_campaign(args) -> int:
    if args.action == "list":
        for name, text in bundled_campaigns().items():
            data = json.loads(text)
            count = len(data.get("items", []))
            _out(f"{name}\t{count} item{'' if count == 1 else 's'}\t{data.get('description', '')}\n")
        return 0
    if not args.file:
        raise CampaignError("campaign run needs a file or bundled campaign name")
    data = load_campaign(_campaign_text(args.file))
    report = run_campaign(data, workers=args.workers)
    _out(emit(report, args.format, timing=args.timing), args.out)
    return 0 if report.ok else 1


def _add_family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("kind")
    p.add_argument("--n", type=int, required=True)
    for key in ("s", "k", "t", "i", "m"):
        p.add_argument(f"--{key}", type=int)
    for name in ("y", "x0", "D", "D1", "D2", "E", "J"):
        p.add_argument(f"--{name}", dest=f"anchor_{name}", metavar="ELEMS", help="comma-separated anchor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sunion", description="Extremal set-family toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="print a named family")
    _add_family_args(p)
    p.add_argument("--form", choices=("text", "hex"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("size", help="built size against the closed form")
    _add_family_args(p)
    p.set_defaults(func=cmd_size)

    p = sub.add_parser("check", help="test a predicate on a family file")
    p.add_argument("file")
    p.add_argument("--property", required=True, choices=sorted(CHECKERS) + ["left_shifted"])
    p.add_argument("--param", type=int)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("shift", help="apply S_ij, or shift to a fixpoint without --i/--j")
    p.add_argument("file")
    p.add_argument("--i", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--form", choices=("text", "hex"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("lex", help="lexicographic rank, unrank or initial segment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--rank", metavar="ELEMS")
    g.add_argument("--unrank", type=int)
    g.add_argument("--initial", type=int, metavar="M")
    p.set_defaults(func=cmd_lex)

    p = sub.add_parser("iso", help="canonical form, isomorphism or subfamily test")
    p.add_argument("--a", required=True)
    p.add_argument("--b")
    p.add_argument("--subfamily", action="store_true")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("search", help="exact maximization")
    p.add_argument("--kind", required=True)
    p.add_argument("--n", type=int, required=True)
    for key in ("s", "k", "t", "a", "b"):
        p.add_argument(f"--{key}", type=int)
    p.add_argument("--a-t", dest="a_t", type=int, help="A must be a_t-intersecting")
    p.add_argument("--min-a", dest="min_a", type=int)
    p.add_argument("--nonempty-b", action="store_true")
    p.add_argument("--exclude", help="comma-separated names, e.g. K,H,Hstar4 or EKR,HM,G2")
    p.add_argument("--mode", choices=("full", "shifted"), default="full")
    p.add_argument("--budget", type=float, help="seconds")
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-pruning", action="store_true")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    p.add_argument("--report")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("campaign", help="run or list verification campaigns")
    p.add_argument("action", choices=("run", "list"))
    p.add_argument("file", nargs="?")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_campaign)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, FormatError, CampaignError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
