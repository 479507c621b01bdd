"""Text formats for streams, node types, structures and timeline exports.

Stream files are comma-separated ``src,dst,t_start,t_end,weight`` records;
``t_end`` and ``weight`` may be left empty.  Lines starting with ``#`` are
comments, except ``# key=value`` directives written by :func:`write_stream`
(``modality``, ``time``, ``directed``, ``horizon``, ``base_m``), which serve
as defaults when reading.  Structures are JSON lines
``{"community", "node", "t_start", "t_end"}``.
"""

from __future__ import annotations

import csv
import json
import math
import xml.etree.ElementTree as ET
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .community import DynamicCommunityStructure, MembershipSegment
from .errors import StreamError, StructureError
from .stream import Interaction, LinkStream, Modality, NodeTable, TimeDomain, TimeKind

HEADER_NAMES = {"src", "source", "u"}


@dataclass(frozen=True)
class StreamOptions:
    """Reading options; ``None`` falls back to file directives, then to
    timestamped, discrete, undirected."""

    modality: Optional[str] = None
    time: Optional[str] = None
    directed: Optional[bool] = None
    types_path: Optional[str] = None
    horizon: Optional[tuple] = None


def _parse_time(text: str, kind: TimeKind, where: str):
    text = text.strip()
    try:
        value = float(text)
    except ValueError:
        raise StreamError(f"{where}: non-numeric time {text!r}") from None
    if not math.isfinite(value):
        raise StreamError(f"{where}: time must be finite, got {text!r}")
    if kind is TimeKind.DISCRETE:
        if not value.is_integer():
            raise StreamError(f"{where}: discrete time must be an integer, got {text!r}")
        return int(value)
    return value


def _is_header(row: list[str]) -> bool:
    if row[0].strip().lower() not in HEADER_NAMES or len(row) < 3:
        return False
    try:
        float(row[2])
    except ValueError:
        return True
    return False


def _format_time(t) -> str:
    return str(t) if isinstance(t, int) else repr(float(t))


def _read_directives(lines: list[str]) -> dict:
    out = {}
    for line in lines:
        body = line.lstrip("#").strip()
        if "=" in body:
            key, value = body.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def read_node_types(path) -> dict:
    types = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if lineno == 1 and row[0].strip().lower() == "node":
                continue
            if len(row) < 2:
                raise StreamError(f"{path}:{lineno}: expected 'node,type'")
            node, kind = row[0].strip(), row[1].strip()
            if node in types and types[node] != kind:
                raise StreamError(f"{path}:{lineno}: node {node!r} given two types")
            types[node] = kind
    return types


def read_stream(path, options: StreamOptions = StreamOptions()) -> LinkStream:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    directives = _read_directives([ln for ln in raw if ln.lstrip().startswith("#")])

    modality = Modality(options.modality or directives.get("modality", "timestamped"))
    kind = TimeKind(options.time or directives.get("time", "discrete"))
    directed = options.directed
    if directed is None:
        directed = directives.get("directed", "false").lower() == "true"

    records = []
    times = []
    for lineno, row in enumerate(csv.reader(raw), 1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if not records and _is_header(row):
            continue
        where = f"{path}:{lineno}"
        if len(row) < 3 or len(row) > 5:
            raise StreamError(f"{where}: expected src,dst,t_start[,t_end[,weight]]")
        row = row + [""] * (5 - len(row))
        src, dst = row[0].strip(), row[1].strip()
        if not src or not dst:
            raise StreamError(f"{where}: empty node id")
        ts = _parse_time(row[2], kind, where)
        te = _parse_time(row[3], kind, where) if row[3].strip() else ts
        if te < ts:
            raise StreamError(f"{where}: t_end {te} before t_start {ts}")
        weight = 1.0
        if row[4].strip():
            try:
                weight = float(row[4])
            except ValueError:
                raise StreamError(f"{where}: non-numeric weight {row[4]!r}") from None
        records.append((lineno, Interaction(src, dst, ts, te, weight, directed)))
        times.extend((ts, te))

    if options.horizon is not None:
        lo, hi = options.horizon
        domain = TimeDomain(kind, lo, hi)
    elif "horizon" in directives:
        lo, hi = directives["horizon"].split(",")
        domain = TimeDomain(kind, _parse_time(lo, kind, str(path)), _parse_time(hi, kind, str(path)))
    else:
        domain = TimeDomain.spanning(times, kind)

    nodes = None
    if options.types_path:
        type_of = read_node_types(options.types_path)
        seen = dict.fromkeys(u for _, it in records for u in (it.src, it.dst))
        missing = [u for u in seen if u not in type_of]
        if missing:
            raise StreamError(f"nodes without a type: {missing[:5]}")
        for lineno, it in records:
            if type_of[it.src] == type_of[it.dst]:
                raise StreamError(
                    f"{path}:{lineno}: same-type interaction {it.src!r} -> {it.dst!r} "
                    f"(type {type_of[it.src]!r})"
                )
        nodes = NodeTable(tuple(type_of), type_of)

    base_m = int(directives["base_m"]) if "base_m" in directives else None
    try:
        return LinkStream(domain, [it for _, it in records], modality, nodes, base_m)
    except StreamError as exc:
        raise StreamError(f"{path}: {exc}") from None


def write_stream(stream: LinkStream, path, types_path=None) -> None:
    flags = {it.directed for it in stream.interactions}
    if len(flags) > 1:
        raise StreamError("cannot write a stream mixing directed and undirected records")
    dom = stream.domain
    lines = [
        f"# modality={stream.modality.value}",
        f"# time={dom.kind.value}",
        f"# directed={'true' if flags == {True} else 'false'}",
        f"# horizon={_format_time(dom.t_min)},{_format_time(dom.t_max)}",
    ]
    if stream.base_m is not None:
        lines.append(f"# base_m={stream.base_m}")
    lines.append("src,dst,t_start,t_end,weight")
    for it in stream.interactions:
        lines.append(
            f"{it.src},{it.dst},{_format_time(it.t_start)},{_format_time(it.t_second)},"
            f"{it.weight!r}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if types_path is not None and stream.nodes.multipartite:
        rows = ["node,type"] + [f"{u},{t}" for u, t in stream.nodes.type_of.items()]
        Path(types_path).write_text("\n".join(rows) + "\n", encoding="utf-8")


def read_events(path) -> list[tuple]:
    """Posts as ``user,t,tags`` lines, tags separated by spaces or ``;``."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if lineno == 1 and row[0].strip().lower() == "user":
                continue
            if len(row) != 3:
                raise StreamError(f"{path}:{lineno}: expected user,t,tags")
            t = _parse_time(row[1], TimeKind.CONTINUOUS, f"{path}:{lineno}")
            if t.is_integer():
                t = int(t)
            tags = [h for h in row[2].replace(";", " ").split() if h]
            out.append((row[0].strip(), tags, t))
    return out


# ----------------------------------------------------------------------
# structures
# ----------------------------------------------------------------------


def write_structure(struct: DynamicCommunityStructure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in struct.segments:
            fh.write(json.dumps(
                {"community": s.community, "node": s.node, "t_start": s.start, "t_end": s.end}
            ) + "\n")


def read_structure(path, discrete: bool = False) -> DynamicCommunityStructure:
    segs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                rec = json.loads(line)
                segs.append(MembershipSegment(
                    str(rec["node"]), rec["t_start"], rec["t_end"], rec["community"]
                ))
            except (ValueError, KeyError, TypeError) as exc:
                if isinstance(exc, StructureError):
                    raise StructureError(f"{path}:{lineno}: {exc}") from None
                raise StructureError(f"{path}:{lineno}: malformed membership record") from None
    try:
        return DynamicCommunityStructure(segs, discrete=discrete)
    except StructureError as exc:
        raise StructureError(f"{path}: {exc}") from None


# ----------------------------------------------------------------------
# timeline export
# ----------------------------------------------------------------------

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#17becf", "#bcbd22", "#393b79", "#637939", "#843c39",
)
OTHER = "#9e9e9e"
UNASSIGNED = "#ececec"


def community_colors(struct: DynamicCommunityStructure) -> dict[int, str]:
    """Palette colors for the 12 communities with the largest total
    membership measure (ties by id); all others share one grey."""
    presence = {
        c: math.fsum(ts.measure for ts in struct.membership_times(c).values())
        for c in struct.communities()
    }
    ranked = sorted(presence, key=lambda c: (-presence[c], c))
    return {c: PALETTE[k] if k < len(PALETTE) else OTHER for k, c in enumerate(ranked)}


def _timeline_rows(struct: DynamicCommunityStructure, stream: LinkStream):
    colors = community_colors(struct)
    dom = stream.domain
    rows = []
    for node in struct.nodes():
        cursor = dom.t_min
        for s in struct.node_segments(node):
            if s.start > cursor:
                rows.append((node, None, cursor, s.start, UNASSIGNED))
            rows.append((node, s.community, s.start, s.end, colors[s.community]))
            cursor = max(cursor, s.end)
        if cursor < dom.t_max:
            rows.append((node, None, cursor, dom.t_max, UNASSIGNED))
    return rows


def export_timeline(struct: DynamicCommunityStructure, stream: LinkStream, path,
                    fmt: str = "csv") -> None:
    """Node-versus-time layout of a structure as CSV rows or an SVG picture."""
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node", "community", "t_start", "t_end", "color"])
            for node, c, a, b, color in _timeline_rows(struct, stream):
                writer.writerow([node, "" if c is None else c, _format_time(a),
                                 _format_time(b), color])
    elif fmt == "svg":
        _write_svg(struct, stream, path)
    else:
        raise ValueError(f"unknown timeline format {fmt!r}")


def _write_svg(struct, stream, path) -> None:
    dom = stream.domain
    nodes = struct.nodes()
    lane, left, top, width = 14, 80, 10, 720
    height = top + lane * len(nodes) + 30
    span = dom.t_max - dom.t_min

    def x(t):
        return left + width * (t - dom.t_min) / span

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                     width=str(left + width + 20), height=str(height))
    axis_y = top + lane * len(nodes) + 4
    ET.SubElement(svg, "line", x1=str(left), y1=str(axis_y), x2=str(left + width),
                  y2=str(axis_y), stroke="black")
    ET.SubElement(svg, "line", x1=str(left), y1=str(top), x2=str(left), y2=str(axis_y),
                  stroke="black")
    for t, anchor in ((dom.t_min, "start"), (dom.t_max, "end")):
        label = ET.SubElement(svg, "text", x=f"{x(t):.2f}", y=str(axis_y + 16),
                              **{"font-size": "10", "text-anchor": anchor})
        label.text = _format_time(t)
    lane_of = {u: k for k, u in enumerate(nodes)}
    for u in nodes:
        label = ET.SubElement(svg, "text", x=str(left - 4), y=str(top + lane * lane_of[u] + 10),
                              **{"font-size": "10", "text-anchor": "end"})
        label.text = str(u)
    for node, c, a, b, color in _timeline_rows(struct, stream):
        w = max(x(b) - x(a), 1.0)
        rect = ET.SubElement(svg, "rect", x=f"{x(a):.2f}", y=str(top + lane * lane_of[node] + 1),
                             width=f"{w:.2f}", height=str(lane - 2), fill=color)
        if c is not None:
            ET.SubElement(rect, "title").text = f"{node} in {c}: [{a}, {b})"
    ET.ElementTree(svg).write(path, encoding="utf-8", xml_declaration=True)
