"""Batch command-line interface.

All inputs are UTF-8 JSON documents; reports are plain text tables by
default or structured JSON with ``--json``.  Exit codes: 0 when every
requested check passes, 1 when a mathematical check fails, 2 for schema
errors, 3 for invariant violations (e.g. delta o delta != 0), 4 for
unparseable files.
"""

from __future__ import annotations

import argparse
import json
import sys

from .abelian import FGAbelianGroup, resolve_injective
from .complexes import IntegerCochainComplex, cohomology_all, validate_complex
from .coverings import CoveringPair, FiniteCoveredSpace, dowker_check
from .errors import (
    InvariantError,
    NormhomError,
    NotAComplex,
    ParseError,
    SchemaError,
)
from .intlinalg import IntMatrix
from .les import GroupSES, coefficient_les
from .normal_homology import (
    dimension_check,
    homology,
    pair_sequence_check,
    ucf_check_all,
)
from .towers import Tower, milnor_check, tower_report


# ---------------------------------------------------------------------------
# parsing and canonical serialization


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"no such file: {path}")
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _require(doc: dict, field: str, path: str):
    if field not in doc:
        raise SchemaError(f"{path}: missing field {field!r}")
    return doc[field]


def parse_complex(doc: dict, path: str = "<complex>") -> IntegerCochainComplex:
    ranks_doc = _require(doc, "ranks", path)
    deltas_doc = doc.get("deltas", {})
    try:
        degrees = sorted(int(k) for k in ranks_doc)
    except ValueError:
        raise SchemaError(f"{path}: rank keys must be integers")
    if not degrees:
        raise SchemaError(f"{path}: empty ranks")
    lo, hi = degrees[0], degrees[-1]
    ranks = {int(k): int(v) for k, v in ranks_doc.items()}
    deltas = {}
    for k, rows in deltas_doc.items():
        n = int(k)
        r_out = ranks.get(n + 1, 0)
        r_in = ranks.get(n, 0)
        if len(rows) != r_out or any(len(r) != r_in for r in rows):
            raise SchemaError(f"{path}: delta at degree {n} has the wrong shape")
        deltas[n] = IntMatrix.from_rows([[int(x) for x in r] for r in rows], r_in)
    try:
        c = IntegerCochainComplex.from_dict(lo, hi, ranks, deltas)
    except NormhomError as e:
        raise SchemaError(f"{path}: {e}")
    try:
        validate_complex(c)
    except NotAComplex as e:
        raise InvariantError(f"{path}: {e}")
    return c


def serialize_complex(c: IntegerCochainComplex) -> str:
    doc = {
        "ranks": {str(n): c.rank(n) for n in c.degrees() if c.rank(n) or n in (c.lo, c.hi)},
        "deltas": {str(n): [list(r) for r in c.delta(n).entries]
                   for n in range(c.lo, c.hi) if c.delta(n).rows and c.delta(n).cols},
    }
    return canonical_json(doc)


def parse_space(doc: dict, path: str = "<space>") -> FiniteCoveredSpace:
    points = _require(doc, "points", path)
    closed = doc.get("closed", [])
    covers = doc.get("covers", {})
    try:
        return FiniteCoveredSpace(
            points=tuple(points),
            closed=tuple(closed),
            coverings={name: [tuple(m) for m in members] for name, members in covers.items()},
        )
    except SchemaError as e:
        raise SchemaError(f"{path}: {e}")


def serialize_space(s: FiniteCoveredSpace) -> str:
    doc = {
        "points": list(s.points),
        "closed": list(s.closed),
        "covers": {name: [list(m) for m in members] for name, members in s.coverings.items()},
    }
    return canonical_json(doc)


def parse_group(doc, path: str = "<group>") -> FGAbelianGroup:
    if isinstance(doc, str):
        return FGAbelianGroup.parse(doc)
    try:
        return FGAbelianGroup.from_factors(int(doc.get("rank", 0)),
                                           [int(d) for d in doc.get("torsion", [])])
    except (ValueError, AttributeError) as e:
        raise SchemaError(f"{path}: bad group descriptor: {e}")


def _group_doc(g: FGAbelianGroup):
    return {"rank": g.rank, "torsion": list(g.torsion)}


def parse_tower(doc: dict, path: str = "<tower>") -> Tower:
    kind = _require(doc, "kind", path)
    try:
        if kind == "finite":
            groups = [parse_group(g, path) for g in _require(doc, "groups", path)]
            maps = []
            for i, rows in enumerate(doc.get("maps", [])):
                tgt, src = groups[i], groups[i + 1]
                maps.append(IntMatrix.from_rows(
                    [[int(x) for x in r] for r in rows], src.num_generators)
                    if rows or tgt.num_generators else IntMatrix.zeros(
                        tgt.num_generators, src.num_generators))
            return Tower.finite(groups, maps)
        if kind == "periodic":
            group = parse_group(_require(doc, "group", path), path)
            rows = _require(doc, "map", path)
            pmap = IntMatrix.from_rows([[int(x) for x in r] for r in rows],
                                       group.num_generators) if rows else \
                IntMatrix.zeros(group.num_generators, group.num_generators)
            prefix_groups = []
            prefix_maps = []
            for entry in doc.get("prefix", []):
                pg = parse_group(_require(entry, "group", path), path)
                prefix_groups.append(pg)
            for i, entry in enumerate(doc.get("prefix", [])):
                rows = _require(entry, "map", path)
                src = prefix_groups[i + 1] if i + 1 < len(prefix_groups) else group
                prefix_maps.append(IntMatrix.from_rows(
                    [[int(x) for x in r] for r in rows], src.num_generators) if rows
                    else IntMatrix.zeros(prefix_groups[i].num_generators, src.num_generators))
            return Tower.periodic(group, pmap, prefix_groups, prefix_maps)
    except (ValueError, IndexError) as e:
        raise SchemaError(f"{path}: bad tower: {e}")
    raise SchemaError(f"{path}: unknown tower kind {kind!r}")


def serialize_tower(t: Tower) -> str:
    if t.is_finite:
        doc = {
            "kind": "finite",
            "groups": [_group_doc(g) for g in t.prefix_groups],
            "maps": [[list(r) for r in m.entries] for m in t.prefix_maps],
        }
    else:
        doc = {
            "kind": "periodic",
            "group": _group_doc(t.period),
            "map": [list(r) for r in t.period_map.entries],
            "prefix": [
                {"group": _group_doc(g), "map": [list(r) for r in m.entries]}
                for g, m in zip(t.prefix_groups, t.prefix_maps)
            ],
        }
    return canonical_json(doc)


def parse_pair_file(doc: dict, path: str = "<pair>"):
    space = parse_space(doc, path)
    alpha = _require(doc, "alpha", path)
    beta = tuple(tuple(m) for m in doc.get("beta", []))
    witness = tuple(int(w) for w in doc.get("witness", []))
    pair = CoveringPair(alpha=alpha, beta=beta, witness=witness)
    pair.validate(space)
    return space, pair


def parse_ses_descriptor(text: str, path_hint: str = "--ses") -> GroupSES:
    if text.startswith("bockstein:"):
        d = int(text.split(":", 1)[1])
        if d < 2:
            raise SchemaError(f"{path_hint}: bockstein modulus must be >= 2")
        return GroupSES(
            g=FGAbelianGroup.free(1), g1=FGAbelianGroup.free(1),
            g2=FGAbelianGroup.cyclic(d),
            inj=IntMatrix.from_rows([[d]], 1),
            surj=IntMatrix.from_rows([[1]], 1),
        )
    doc = _load_json(text)
    g = parse_group(_require(doc, "left", text), text)
    g1 = parse_group(_require(doc, "mid", text), text)
    g2 = parse_group(_require(doc, "right", text), text)

    def mat(rows, tgt_n, src_n):
        if rows:
            return IntMatrix.from_rows([[int(x) for x in r] for r in rows], src_n)
        return IntMatrix.zeros(tgt_n, src_n)

    inj = mat(_require(doc, "inj", text), g1.num_generators, g.num_generators)
    surj = mat(_require(doc, "surj", text), g2.num_generators, g1.num_generators)
    return GroupSES(g=g, g1=g1, g2=g2, inj=inj, surj=surj)


def parse_degrees(text: str):
    if ".." in text:
        a, b = text.split("..", 1)
        return list(range(int(a), int(b) + 1))
    return [int(text)]


# ---------------------------------------------------------------------------
# command implementations


def _emit(args, payload: dict, lines: list[str]):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for ln in lines:
            print(ln)


def cmd_cohomology(args) -> int:
    c = parse_complex(_load_json(args.input), args.input)
    degrees = parse_degrees(args.degree) if args.degree else list(c.degrees())
    forms = cohomology_all(c)
    results = {n: str(forms.get(n, FGAbelianGroup.trivial())) for n in degrees}
    _emit(args, {"command": "cohomology", "input": args.input, "groups": {str(n): v for n, v in results.items()}, "pass": True},
          [f"H^{n} = {v}" for n, v in results.items()])
    return 0


def cmd_homology(args) -> int:
    c = parse_complex(_load_json(args.input), args.input)
    g = FGAbelianGroup.parse(args.coeff)
    degrees = parse_degrees(args.degree) if args.degree else list(range(c.lo - 1, c.hi + 1))
    lines = []
    groups = {}
    for n in degrees:
        res = homology(c, g, n, base_modulus=args.modulus_cap)
        groups[str(n)] = str(res.group)
        lines.append(f"H_{n}(-;{g}) = {res.group}")
    _emit(args, {"command": "homology", "input": args.input, "coefficient": str(g),
                 "groups": groups, "pass": True}, lines)
    return 0


def cmd_ucf_check(args) -> int:
    c = parse_complex(_load_json(args.input), args.input)
    g = FGAbelianGroup.parse(args.coeff)
    degrees = parse_degrees(args.degree) if args.degree else list(range(c.lo - 1, c.hi + 2))
    reports = ucf_check_all(c, g, degrees, base_modulus=args.modulus_cap)
    lines = []
    ok = True
    results = []
    for rep in reports:
        status = "pass" if rep.passed else "FAIL"
        ok = ok and rep.passed
        lines.append(
            f"degree {rep.degree}: Hom={rep.hom_part}  Ext={rep.ext_part}  "
            f"H_{rep.degree}={rep.homology_group}  rho-onto={rep.rho_surjective}  "
            f"ker=Ext={rep.kernel_iso_to_ext}  [{status}]")
        results.append({
            "degree": rep.degree, "hom": str(rep.hom_part), "ext": str(rep.ext_part),
            "homology": str(rep.homology_group), "rho_surjective": rep.rho_surjective,
            "kernel_iso_to_ext": rep.kernel_iso_to_ext, "pass": rep.passed})
    _emit(args, {"command": "ucf-check", "input": args.input, "coefficient": str(g),
                 "results": results, "pass": ok}, lines)
    return 0 if ok else 1


def cmd_dowker_check(args) -> int:
    space = parse_space(_load_json(args.input), args.input)
    cover = args.cover
    if cover is None:
        names = sorted(space.coverings)
        if len(names) != 1:
            raise SchemaError("--cover required when the space has several coverings")
        cover = names[0]
    degrees = parse_degrees(args.degree) if args.degree else [0, 1, 2]
    ok = True
    lines = []
    results = []
    for n in degrees:
        verdict = dowker_check(space, cover, n)
        ok = ok and verdict
        lines.append(f"degree {n}: Vietoris vs nerve: {'isomorphic' if verdict else 'MISMATCH'}")
        results.append({"degree": n, "isomorphic": verdict})
    _emit(args, {"command": "dowker-check", "input": args.input, "cover": cover,
                 "results": results, "pass": ok}, lines)
    return 0 if ok else 1


def cmd_pair_check(args) -> int:
    space, pair = parse_pair_file(_load_json(args.input), args.input)
    g = FGAbelianGroup.parse(args.coeff)
    rep = pair_sequence_check(space, pair, g, base_modulus=args.modulus_cap)
    lines = rep.summary_lines()
    lines.append(f"exact at every junction: {rep.all_exact}")
    _emit(args, {"command": "pair-check", "input": args.input, "coefficient": str(g),
                 "nodes": [{"label": n.label, "degree": n.degree, "group": str(n.group)}
                           for n in rep.nodes],
                 "exact_at": list(rep.exact_at), "pass": rep.all_exact}, lines)
    return 0 if rep.all_exact else 1


def cmd_dimension_check(args) -> int:
    g = FGAbelianGroup.parse(args.coeff)
    rep = dimension_check(g)
    lines = [f"H_{n}(point;{g}) = {rep.values[n]}" for n in sorted(rep.values)]
    lines.append("dimension axiom: " + ("pass" if rep.passed else "FAIL"))
    _emit(args, {"command": "dimension-check", "coefficient": str(g),
                 "values": {str(n): str(v) for n, v in rep.values.items()},
                 "pass": rep.passed}, lines)
    return 0 if rep.passed else 1


def cmd_tower_lim(args) -> int:
    t = parse_tower(_load_json(args.input), args.input)
    rep = tower_report(t)
    lines = [f"lim = {rep.lim}",
             f"Mittag-Leffler: {str(rep.mittag_leffler).lower()}",
             f"stabilization stage: {rep.stabilization_stage}"]
    _emit(args, {"command": "tower-lim", "input": args.input, "lim": str(rep.lim),
                 "mittag_leffler": rep.mittag_leffler,
                 "stabilization_stage": rep.stabilization_stage, "pass": True}, lines)
    return 0


def cmd_tower_lim1(args) -> int:
    t = parse_tower(_load_json(args.input), args.input)
    rep = tower_report(t)
    if rep.lim1_vanishes:
        msg = "Mittag-Leffler: true; lim¹ = 0"
    else:
        msg = "Mittag-Leffler: false; lim¹ nonzero (not finitely generated)"
    _emit(args, {"command": "tower-lim1", "input": args.input,
                 "mittag_leffler": rep.mittag_leffler,
                 "lim1_vanishes": rep.lim1_vanishes, "pass": True}, [msg])
    return 0


def cmd_milnor_check(args) -> int:
    doc = _load_json(args.input)
    towers = {int(k): parse_tower(v, args.input) for k, v in _require(doc, "towers", args.input).items()}
    limits = {int(k): parse_group(v, args.input) for k, v in _require(doc, "limits", args.input).items()}
    reports = milnor_check(towers, limits)
    ok = all(r.verdict != "fail" for r in reports)
    lines = [f"degree {r.degree}: {r.verdict} ({r.detail})" for r in reports]
    _emit(args, {"command": "milnor-check", "input": args.input,
                 "results": [{"degree": r.degree, "verdict": r.verdict, "detail": r.detail}
                             for r in reports], "pass": ok}, lines)
    return 0 if ok else 1


def cmd_coefficient_les(args) -> int:
    c = parse_complex(_load_json(args.input), args.input)
    ses = parse_ses_descriptor(args.ses)
    rep = coefficient_les(c, ses, base_modulus=args.modulus_cap)
    lines = rep.summary_lines()
    lines.append(f"exact at every junction: {rep.all_exact}")
    _emit(args, {"command": "coefficient-les", "input": args.input,
                 "nodes": [{"label": n.label, "degree": n.degree, "group": str(n.group)}
                           for n in rep.nodes],
                 "exact_at": list(rep.exact_at), "pass": rep.all_exact}, lines)
    return 0 if rep.all_exact else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="normhom",
        description="Exact cochain-complex, cone-homology, covering and tower computations.")
    p.add_argument("--json", action="store_true", help="emit a structured JSON report")
    p.add_argument("--modulus-cap", type=int, default=None,
                   help="raise the saturation base modulus (lcm with the automatic choice)")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized sweeps")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("cohomology", cmd_cohomology, help="integer cohomology of a complex")
    sp.add_argument("input")
    sp.add_argument("--degree", default=None)

    sp = add("homology", cmd_homology, help="cone homology with coefficients")
    sp.add_argument("input")
    sp.add_argument("--coeff", required=True)
    sp.add_argument("--degree", default=None)

    sp = add("ucf-check", cmd_ucf_check, help="universal coefficient sequence check")
    sp.add_argument("input")
    sp.add_argument("--coeff", required=True)
    sp.add_argument("--degree", default=None)

    sp = add("dowker-check", cmd_dowker_check, help="Vietoris vs nerve cohomology")
    sp.add_argument("input")
    sp.add_argument("--cover", default=None)
    sp.add_argument("--degree", default=None)

    sp = add("pair-check", cmd_pair_check, help="long exact pair sequence check")
    sp.add_argument("input")
    sp.add_argument("--coeff", required=True)

    sp = add("dimension-check", cmd_dimension_check, help="point-space homology table")
    sp.add_argument("--coeff", required=True)

    sp = add("tower-lim", cmd_tower_lim, help="inverse limit of a tower")
    sp.add_argument("input")

    sp = add("tower-lim1", cmd_tower_lim1, help="Mittag-Leffler / lim^1 verdict")
    sp.add_argument("input")

    sp = add("milnor-check", cmd_milnor_check, help="Milnor sequence shape check")
    sp.add_argument("input")

    sp = add("coefficient-les", cmd_coefficient_les, help="coefficient long exact sequence")
    sp.add_argument("input")
    sp.add_argument("--ses", required=True,
                    help="JSON file or bockstein:<d> for 0 -> Z -> Z -> Z/d -> 0")

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 4
    except InvariantError as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return 3
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 2
    except NormhomError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
