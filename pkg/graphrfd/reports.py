"""
JSON report builders shared by the command line and the tool server.
"""
import json
import logging
from typing import Any, Dict

from graphrfd.config import DEFAULT_TOLERANCES, ToleranceConfig
from graphrfd.core.amalgam import amalgam_data, amalgam_to_json
from graphrfd.core.error_handler import ErrorCode, GraphRFDError
from graphrfd.core.graph import (
    Graph, decompose, find_cycles, graph_digest, no_cycle_has_entry, path_count_table,
    relation_partition_check, sources,
)
from graphrfd.core.representations import build_family, check_ck, rep_to_json, roots_of_unity

logger = logging.getLogger(__name__)


def analyze_report(g: Graph) -> Dict[str, Any]:
    """Sources, cycles, entry verdict, finite n(t) values and the decomposition when there is one."""
    verdict = no_cycle_has_entry(g)
    report: Dict[str, Any] = {
        "graph_digest": graph_digest(g),
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "sources": sorted(sources(g)),
        "no_cycle_has_entry": verdict.holds,
        "path_counts": {v: n for v, n in path_count_table(g).items() if n is not None},
    }
    if not verdict.holds:
        report["witness"] = verdict.witness
        report["entered_vertex"] = verdict.entered_vertex
        return report

    cycles = find_cycles(g)
    report["cycles"] = len(cycles)
    report["cycle_list"] = [c.to_json() for c in cycles]
    try:
        d = decompose(g)
    except GraphRFDError as e:
        if e.code != ErrorCode.TRIVIAL_DECOMPOSITION:
            raise
        report["case"] = None
        report["decomposition"] = None
    else:
        report["case"] = d.case_flag.value
        report["decomposition"] = d.summary()
    return report


def decompose_report(g: Graph) -> Dict[str, Any]:
    d = decompose(g)
    report = d.summary()
    report["relation_partition"] = relation_partition_check(g, d)
    report["amalgam"] = amalgam_to_json(amalgam_data(g, d))
    return report


def synthesize_report(
    g: Graph, zcount: int, tolerances: ToleranceConfig = DEFAULT_TOLERANCES, include_matrices: bool = True,
) -> Dict[str, Any]:
    """Family over zcount roots of unity with per-member CK reports."""
    family = build_family(g, roots_of_unity(zcount), tolerances)
    members = []
    for rep in family:
        member: Dict[str, Any] = {"dim": rep.dim, "ck": check_ck(rep, tolerances.construction).to_dict()}
        if include_matrices:
            member["rep"] = rep_to_json(rep)
        members.append(member)
    return {"graph_digest": graph_digest(g), "zcount": zcount, "family": members}


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
