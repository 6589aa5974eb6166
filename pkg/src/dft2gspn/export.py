"""Serialisation of nets and marking graphs for external tools.

PNML output follows the place/transition skeleton of the standard; the
attributes the standard cannot express (timed/immediate kind, rates and
weights, priorities, partitions, inhibitor arcs) ride in <toolspecific>
elements under the tool id "dft2gspn".  Element order is fixed by index, so
identical nets serialise to identical bytes.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional

from .gspn import Gspn, IMMEDIATE, MarkingGraph, TIMED

PNML_NS = "http://www.pnml.org/version-2009/grammar/pnml"
NET_TYPE = "http://www.pnml.org/version-2009/grammar/ptnet"
TOOL_ID = "dft2gspn"
TOOL_VERSION = "1"


class PnmlImportError(ValueError):
    def __init__(self, message: str, element: Optional[str] = None):
        super().__init__(message if element is None else f"{element}: {message}")
        self.element = element


def _text_child(parent, tag, text):
    el = ET.SubElement(parent, tag)
    inner = ET.SubElement(el, "text")
    inner.text = str(text)
    return el


def _toolspecific(parent, **entries):
    el = ET.SubElement(parent, "toolspecific", tool=TOOL_ID, version=TOOL_VERSION)
    for key, value in entries.items():
        sub = ET.SubElement(el, key)
        sub.text = str(value)
    return el


def export_pnml(net: Gspn) -> str:
    root = ET.Element("pnml", xmlns=PNML_NS)
    net_el = ET.SubElement(root, "net", id="net0", type=NET_TYPE)
    page = ET.SubElement(net_el, "page", id="page0")

    for i, name in enumerate(net.place_names):
        place = ET.SubElement(page, "place", id=f"p{i}")
        _text_child(place, "name", name)
        tokens = net.initial_marking[i]
        if tokens:
            _text_child(place, "initialMarking", tokens)

    for t in net.transitions:
        el = ET.SubElement(page, "transition", id=f"t{t.index}")
        _text_child(el, "name", t.name)
        entries = {"kind": t.kind, "weight": repr(t.weight), "priority": t.priority}
        if t.partition is not None:
            entries["partition"] = t.partition
        _toolspecific(el, **entries)

    arc_id = 0
    for t in net.transitions:
        for p, mult in t.inputs:
            arc = ET.SubElement(
                page, "arc", id=f"a{arc_id}", source=f"p{p}", target=f"t{t.index}"
            )
            if mult != 1:
                _text_child(arc, "inscription", mult)
            arc_id += 1
        for p, mult in t.outputs:
            arc = ET.SubElement(
                page, "arc", id=f"a{arc_id}", source=f"t{t.index}", target=f"p{p}"
            )
            if mult != 1:
                _text_child(arc, "inscription", mult)
            arc_id += 1
        for p, mult in t.inhibitors:
            arc = ET.SubElement(
                page, "arc", id=f"a{arc_id}", source=f"p{p}", target=f"t{t.index}"
            )
            if mult != 1:
                _text_child(arc, "inscription", mult)
            _toolspecific(arc, arctype="inhibitor")
            arc_id += 1

    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def _strip(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _find_text(el, tag) -> Optional[str]:
    for child in el:
        if _strip(child.tag) == tag:
            for inner in child:
                if _strip(inner.tag) == "text":
                    return inner.text or ""
    return None


def _tool_entries(el) -> dict:
    for child in el:
        if _strip(child.tag) == "toolspecific" and child.get("tool") == TOOL_ID:
            return {_strip(sub.tag): (sub.text or "") for sub in child}
    return {}


def import_pnml(text: str) -> Gspn:
    """Inverse of export_pnml, up to renumbering of ids."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise PnmlImportError(f"not well-formed XML: {exc}") from None
    if _strip(root.tag) != "pnml":
        raise PnmlImportError("document root is not <pnml>")

    place_ids: list = []
    places: dict = {}
    transition_ids: list = []
    transitions: dict = {}
    arcs: list = []

    def walk(el):
        tag = _strip(el.tag)
        if tag == "place":
            pid = el.get("id")
            if pid is None:
                raise PnmlImportError("place without id")
            name = _find_text(el, "name") or pid
            marking = _find_text(el, "initialMarking")
            try:
                tokens = int(marking) if marking is not None else 0
            except ValueError:
                raise PnmlImportError("initial marking is not an integer", pid)
            place_ids.append(pid)
            places[pid] = (name, tokens)
        elif tag == "transition":
            tid = el.get("id")
            if tid is None:
                raise PnmlImportError("transition without id")
            name = _find_text(el, "name") or tid
            entries = _tool_entries(el)
            kind = entries.get("kind", TIMED)
            if kind not in (TIMED, IMMEDIATE):
                raise PnmlImportError(f"unknown transition kind {kind!r}", tid)
            try:
                weight = float(entries.get("weight", "1.0"))
            except ValueError:
                raise PnmlImportError("weight is not a number", tid)
            priority = entries.get("priority")
            if kind == IMMEDIATE and priority is None:
                raise PnmlImportError(
                    "immediate transition lacks a priority annotation", tid
                )
            partition = entries.get("partition")
            if kind == IMMEDIATE and partition is None:
                raise PnmlImportError(
                    "immediate transition lacks a partition annotation", tid
                )
            transition_ids.append(tid)
            transitions[tid] = {
                "name": name,
                "kind": kind,
                "weight": weight,
                "priority": int(priority) if priority is not None else 0,
                "partition": int(partition) if partition is not None else None,
                "inputs": {},
                "outputs": {},
                "inhibitors": {},
            }
        elif tag == "arc":
            arcs.append(el)
        for child in el:
            walk(child)

    walk(root)

    for el in arcs:
        source, target = el.get("source"), el.get("target")
        if source is None or target is None:
            raise PnmlImportError("arc without source/target", el.get("id"))
        inscription = _find_text(el, "inscription")
        try:
            mult = int(inscription) if inscription is not None else 1
        except ValueError:
            raise PnmlImportError("inscription is not an integer", el.get("id"))
        inhibitor = _tool_entries(el).get("arctype") == "inhibitor"
        if source in places and target in transitions:
            key = "inhibitors" if inhibitor else "inputs"
            transitions[target][key][places[source][0]] = mult
        elif source in transitions and target in places:
            if inhibitor:
                raise PnmlImportError(
                    "inhibitor arc must run from a place to a transition",
                    el.get("id"),
                )
            transitions[source]["outputs"][places[target][0]] = mult
        else:
            raise PnmlImportError(
                "arc endpoints are not a place/transition pair", el.get("id")
            )

    return Gspn(
        places=[places[pid] for pid in place_ids],
        transitions=[transitions[tid] for tid in transition_ids],
    )


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(net: Gspn) -> str:
    """Graphviz drawing following the usual conventions: circles for places
    (token count inside), open bars for timed and filled bars for immediate
    transitions, circle arrowheads for inhibitor arcs."""
    lines = ["digraph gspn {", "  rankdir=TB;", "  node [fontsize=10];"]
    for i, name in enumerate(net.place_names):
        tokens = net.initial_marking[i]
        label = name if not tokens else f"{name}\\n{'●' * tokens}"
        lines.append(f"  p{i} [shape=circle, label={_dot_quote(label)}];")
    for t in net.transitions:
        if t.kind == TIMED:
            style = 'style="" fillcolor=white'
            label = f"{t.name}\\nrate={t.weight:g}"
        else:
            style = "style=filled fillcolor=black fontcolor=white"
            label = f"{t.name}\\n@{t.priority}"
            if t.weight != 1.0:
                label += f" w={t.weight:g}"
        lines.append(
            f"  t{t.index} [shape=box, height=0.15, {style}, label={_dot_quote(label)}];"
        )
    for t in net.transitions:
        for p, mult in t.inputs:
            attr = f' [label="{mult}"]' if mult != 1 else ""
            lines.append(f"  p{p} -> t{t.index}{attr};")
        for p, mult in t.outputs:
            attr = f' [label="{mult}"]' if mult != 1 else ""
            lines.append(f"  t{t.index} -> p{p}{attr};")
        for p, mult in t.inhibitors:
            attr = f', label="{mult}"' if mult != 1 else ""
            lines.append(f"  p{p} -> t{t.index} [arrowhead=odot{attr}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_marking_graph_dot(graph: MarkingGraph) -> str:
    net = graph.net
    lines = ["digraph markings {", "  rankdir=LR;", "  node [fontsize=10];"]
    for i, m in enumerate(graph.states):
        label = net.describe_marking(m) or "{}"
        shape = "ellipse" if not graph.vanishing[i] else "box"
        extra = ", style=dashed" if graph.vanishing[i] else ""
        marker = "initial " if i == graph.initial else ""
        lines.append(
            f"  s{i} [shape={shape}{extra}, label={_dot_quote(marker + label)}];"
        )
    for s, t, d in graph.edges:
        tr = net.transitions[t]
        style = "" if tr.kind == IMMEDIATE else ", style=bold"
        lines.append(f"  s{s} -> s{d} [label={_dot_quote(tr.name)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_text(net: Gspn) -> str:
    """Compact human-readable dump, stable across runs."""
    lines = [f"gspn places={len(net.place_names)} transitions={len(net.transitions)}"]
    for i, name in enumerate(net.place_names):
        tokens = net.initial_marking[i]
        suffix = f" init={tokens}" if tokens else ""
        lines.append(f"place {name}{suffix}")

    def arcs(pairs):
        return ",".join(
            f"{net.place_names[p]}" + (f"*{m}" if m != 1 else "")
            for p, m in pairs
        )

    for t in net.transitions:
        if t.kind == TIMED:
            head = f"timed {t.name} rate={t.weight!r}"
        else:
            head = (
                f"immediate {t.name} weight={t.weight!r} priority={t.priority} "
                f"partition={t.partition}"
            )
        parts = [head]
        if t.inputs:
            parts.append(f"in[{arcs(t.inputs)}]")
        if t.outputs:
            parts.append(f"out[{arcs(t.outputs)}]")
        if t.inhibitors:
            parts.append(f"inhibit[{arcs(t.inhibitors)}]")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
