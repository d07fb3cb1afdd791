"""
RFD decision procedure and certificates.

decide_rfd answers with one of two certificates. When some cycle has an
entry it returns the entering edge, a host cycle and the exact trace identity
that forces every finite-dimensional representation to kill the entry. When
no cycle has an entry it returns a concrete family of matrix representations
over roots of unity together with the reports that show the family is a
representation and separates the truncated monomial basis.

Certificates serialize to canonical JSON and are replayed by
verify_certificate against the graph they were made for.
"""
import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from graphrfd import __version__
from graphrfd.config import (
    DEFAULT_TOLERANCES, DEFAULT_TRUNCATION, DEFAULT_ZCOUNT_SEARCH_LIMIT, ExitCode, ToleranceConfig, default_zcount,
)
from graphrfd.core.amalgam import (
    AmalgamSpec, CompatibilityReport, amalgam_data, amalgam_to_json, build_factor_reps, check_compatibility,
)
from graphrfd.core.error_handler import ErrorCode, GraphRFDError, enhance_error
from graphrfd.core.graph import (
    Cycle, Decomposition, Graph, cycle_entries, cycle_vertices, decompose, find_cycles, graph_digest,
    host_cycle, no_cycle_has_entry, simple_cycles_oracle,
)
from graphrfd.core.representations import (
    Rep, SeparationReport, build_family, check_ck, evaluate, rep_from_json, rep_to_json, roots_of_unity,
    separation_check, separation_rank,
)
from graphrfd.core.symbolic import (
    Obstruction, basis_monomials, element_from_json, element_to_json, gen_edge, is_zero, multiply, adjoint,
    trace_obstruction,
)
from graphrfd.core.validation import validate_family_parameters, validate_tolerances

logger = logging.getLogger(__name__)

K_CONVENTION = "k sums n(t) over the sources of G2"


class Verdict(Enum):
    RFD = "RFD"
    NOT_RFD = "NotRFD"


class Branch(Enum):
    """Which construction produced the family."""
    ACYCLIC = "acyclic"
    CYCLES = "cycles"
    GLUED = "glued"


@dataclass
class Certificate:
    verdict: Verdict
    graph: Graph
    truncation: int
    zcount: int
    tolerances: ToleranceConfig
    # NotRFD
    witness: Optional[str] = None
    entered_vertex: Optional[str] = None
    host: Optional[Cycle] = None
    obstruction: Optional[Obstruction] = None
    # RFD
    branch: Optional[Branch] = None
    decomposition: Optional[Decomposition] = None
    amalgam: Optional[AmalgamSpec] = None
    zs: List[complex] = field(default_factory=list)
    family: List[Rep] = field(default_factory=list)
    ck_max_residual: float = 0.0
    separation: Optional[SeparationReport] = None
    compatibility: Optional[CompatibilityReport] = None
    min_zcount: Optional[int] = None

    @property
    def dimensions(self) -> List[int]:
        return [rep.dim for rep in self.family]

    @property
    def exit_code(self) -> ExitCode:
        return ExitCode.OK if self.verdict == Verdict.RFD else ExitCode.NOT_RFD


def _check_parameters(truncation: int, zcount: int, tolerances: ToleranceConfig) -> None:
    ok, message = validate_family_parameters(truncation, zcount)
    if not ok:
        raise enhance_error(ErrorCode.INVALID_PARAMETER, message, truncation=truncation, zcount=zcount)
    ok, message = validate_tolerances(tolerances)
    if not ok:
        raise enhance_error(ErrorCode.INVALID_PARAMETER, message)


def _branch(g: Graph) -> Branch:
    cycles = find_cycles(g)
    if not cycles:
        return Branch.ACYCLIC
    if {v for c in cycles for v in c.vertices} == g.vertex_set:
        return Branch.CYCLES
    return Branch.GLUED


def build_separating_family(
    g: Graph, truncation: int = DEFAULT_TRUNCATION, zcount: Optional[int] = None,
    tolerances: ToleranceConfig = DEFAULT_TOLERANCES,
) -> Tuple[List[Rep], SeparationReport]:
    """
    Family over z_j = exp(2 pi i j / m) and its separation report at L.

    Raises:
        PreconditionError: EntryPresent; TooFewPoints
    """
    zcount = default_zcount(truncation) if zcount is None else zcount
    zs = roots_of_unity(zcount)
    if not no_cycle_has_entry(g).holds:
        raise enhance_error(ErrorCode.ENTRY_PRESENT, "No separating family exists when a cycle has an entry")
    if cycle_vertices(g) and zcount < default_zcount(truncation):
        raise enhance_error(
            ErrorCode.TOO_FEW_POINTS, f"m = {zcount} is below 2L+1 = {default_zcount(truncation)}",
        )
    family = build_family(g, zs, tolerances)
    report = separation_check(g, truncation, zs, tolerances, family=family)
    return family, report


def search_min_zcount(
    g: Graph, truncation: int = DEFAULT_TRUNCATION, limit: int = DEFAULT_ZCOUNT_SEARCH_LIMIT,
    tolerances: ToleranceConfig = DEFAULT_TOLERANCES,
) -> Optional[int]:
    """
    Smallest m <= limit at which m roots of unity separate the basis at L.

    This is the first m that passes the rank check; nothing is claimed about
    other point sets of the same size. Returns None when no m up to limit passes.
    """
    basis = basis_monomials(g, truncation)
    for m in range(1, limit + 1):
        family = build_family(g, roots_of_unity(m), tolerances)
        rank, _, _ = separation_rank(family, basis, tolerances.rank_relative)
        logger.debug(f"m = {m}: rank {rank} of {len(basis)}")
        if rank == len(basis):
            return m
    return None


def decide_rfd(
    g: Graph, truncation: int = DEFAULT_TRUNCATION, zcount: Optional[int] = None,
    tolerances: ToleranceConfig = DEFAULT_TOLERANCES, search_min_z: bool = False,
) -> Certificate:
    """
    Decide whether C*(G) is RFD and build the matching certificate.

    Args:
        g: Parsed graph
        truncation: Length bound L of the separation check
        zcount: Number m of roots of unity; defaults to 2L+1
        tolerances: Numerical tolerances recorded in the certificate
        search_min_z: Also report the smallest m that separates at L

    Raises:
        GraphRFDError: InvalidParameter when m < 2L+1 or a tolerance is not positive
    """
    zcount = default_zcount(truncation) if zcount is None else zcount
    _check_parameters(truncation, zcount, tolerances)
    verdict = no_cycle_has_entry(g)

    if not verdict.holds:
        cycle = host_cycle(g, verdict.witness)
        obstruction = trace_obstruction(g, cycle)
        if not is_zero(obstruction.identity) or is_zero(obstruction.entry_term):
            raise enhance_error(
                ErrorCode.INEXACT_OBSTRUCTION,
                f"Trace identity on the cycle at '{cycle.base}' did not reduce to zero with a nonzero entry term",
                witness=verdict.witness,
            )
        logger.info(f"NotRFD: edge '{verdict.witness}' enters the cycle at '{verdict.entered_vertex}'")
        return Certificate(
            verdict=Verdict.NOT_RFD, graph=g, truncation=truncation, zcount=zcount, tolerances=tolerances,
            witness=verdict.witness, entered_vertex=verdict.entered_vertex, host=cycle, obstruction=obstruction,
        )

    branch = _branch(g)
    family, separation = build_separating_family(g, truncation, zcount, tolerances)
    ck_max = max(check_ck(rep, tolerances.construction).max_residual for rep in family)

    cert = Certificate(
        verdict=Verdict.RFD, graph=g, truncation=truncation, zcount=zcount, tolerances=tolerances,
        branch=branch, zs=list(separation.zs), family=family, ck_max_residual=ck_max, separation=separation,
    )
    if branch == Branch.GLUED:
        d = decompose(g)
        spec = amalgam_data(g, d)
        factors = [build_factor_reps(g, d, z) for z in cert.zs]
        cert.decomposition = d
        cert.amalgam = spec
        cert.compatibility = check_compatibility(spec, factors, cert.zs, tolerances.compatibility)
    if search_min_z:
        cert.min_zcount = search_min_zcount(g, truncation, max(zcount, DEFAULT_ZCOUNT_SEARCH_LIMIT), tolerances)

    logger.info(
        f"RFD via {branch.value} family: dims {cert.dimensions[:1]} x {len(family)}, "
        f"rank {separation.rank}/{separation.expected}, CK residual {ck_max:.2e}"
    )
    return cert


# ====================================================================
# ENTRY AUDIT
# ====================================================================

@dataclass
class EntryAudit:
    """|trace rho(f f*)| per entry edge next to the CK residual of rho."""
    traces: Dict[str, float]
    ck_max_residual: float
    bound: float
    exact: bool

    @property
    def consistent(self) -> bool:
        """Traces vanish whenever the representation satisfies the relations."""
        return not self.exact or all(t <= self.bound for t in self.traces.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "traces": dict(sorted(self.traces.items())),
            "ck_max_residual": self.ck_max_residual,
            "bound": self.bound,
            "exact": self.exact,
            "consistent": self.consistent,
        }


def graph_entries(g: Graph) -> List[str]:
    """Edges entering at least one simple cycle, sorted."""
    entries = set()
    for cycle in simple_cycles_oracle(g):
        entries.update(cycle_entries(g, cycle))
    return sorted(entries)


def entry_vanishing_audit(rep: Rep, tolerances: ToleranceConfig = DEFAULT_TOLERANCES) -> EntryAudit:
    """
    Matrix traces of rho(s_f s_f*) for every entry f of rep.graph.

    On a representation that satisfies the relations to within the
    construction tolerance every trace is at most dim times the trace
    tolerance.

    Raises:
        PreconditionError: NoEntries
    """
    g = rep.graph
    entries = graph_entries(g)
    if not entries:
        raise enhance_error(ErrorCode.NO_ENTRIES, "No cycle of the graph has an entry")
    ck = check_ck(rep, tolerances.construction)
    traces = {}
    for f in entries:
        s = gen_edge(g, f)
        traces[f] = float(abs(np.trace(evaluate(rep, multiply(s, adjoint(s))))))
    return EntryAudit(
        traces=traces, ck_max_residual=ck.max_residual,
        bound=rep.dim * tolerances.trace, exact=ck.passed,
    )


# ====================================================================
# SERIALIZATION
# ====================================================================

def _complex_to_json(z: complex) -> List[float]:
    return [z.real, z.imag]


def family_digest(family_json: Sequence[Dict[str, Any]]) -> str:
    text = json.dumps(list(family_json), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def certificate_to_dict(cert: Certificate) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "verdict": cert.verdict.value,
        "toolkit_version": __version__,
        "graph_digest": graph_digest(cert.graph),
        "params": {"truncation": cert.truncation, "zcount": cert.zcount},
    }
    if cert.verdict == Verdict.NOT_RFD:
        doc["witness"] = {"edge": cert.witness, "entered_vertex": cert.entered_vertex}
        doc["host_cycle"] = cert.host.to_json()
        doc["obstruction"] = {
            "entries": list(cert.obstruction.entries),
            "identity": element_to_json(cert.obstruction.identity),
            "entry_term": element_to_json(cert.obstruction.entry_term),
        }
        return doc

    doc["params"]["tolerances"] = cert.tolerances.to_dict()
    doc["params"]["k_convention"] = K_CONVENTION
    family_json = [rep_to_json(rep) for rep in cert.family]
    doc["branch"] = cert.branch.value
    doc["zs"] = [_complex_to_json(z) for z in cert.zs]
    doc["dimensions"] = cert.dimensions
    doc["family"] = family_json
    doc["family_digest"] = family_digest(family_json)
    reports: Dict[str, Any] = {
        "ck_max_residual": cert.ck_max_residual,
        "separation": cert.separation.to_dict(),
    }
    if cert.decomposition is not None:
        doc["decomposition"] = cert.decomposition.summary()
        doc["amalgam"] = amalgam_to_json(cert.amalgam)
        reports["compatibility"] = cert.compatibility.to_dict()
    if cert.min_zcount is not None:
        reports["min_zcount"] = cert.min_zcount
    doc["reports"] = reports
    return doc


def certificate_to_json(cert: Certificate) -> str:
    """Canonical text: sorted keys and fixed indentation, so reruns are byte-identical."""
    return json.dumps(certificate_to_dict(cert), sort_keys=True, indent=2) + "\n"


# ====================================================================
# VERIFICATION
# ====================================================================

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    verdict: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failing(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    @property
    def exit_code(self) -> ExitCode:
        return ExitCode.OK if self.passed else ExitCode.VERIFY_FAILED

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, bool(passed), detail))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "passed": self.passed,
            "failing": self.failing,
            "checks": [c.to_dict() for c in self.checks],
        }


def _require(doc: Dict[str, Any], *keys: str) -> None:
    missing = [k for k in keys if k not in doc]
    if missing:
        raise enhance_error(ErrorCode.INVALID_CERTIFICATE, f"Certificate lacks {', '.join(missing)}")


def _verify_not_rfd(doc: Dict[str, Any], g: Graph, report: VerificationReport) -> None:
    _require(doc, "witness", "host_cycle", "obstruction")
    witness = doc["witness"].get("edge")
    cycle_doc = doc["host_cycle"]
    cycle = Cycle(base=cycle_doc["base"], edges=tuple(cycle_doc["edges"]), vertices=tuple(cycle_doc["vertices"]))

    report.add("verdict", not no_cycle_has_entry(g).holds, "graph has an entry")
    report.add("witness", witness in cycle_entries(g, cycle), f"edge '{witness}' enters the host cycle")

    identity = element_from_json(g, doc["obstruction"]["identity"])
    entry_term = element_from_json(g, doc["obstruction"]["entry_term"])
    expected = trace_obstruction(g, cycle)
    report.add(
        "obstruction",
        identity == expected.identity and entry_term == expected.entry_term
        and is_zero(identity) and not is_zero(entry_term),
        "identity reduces to zero and the entry term does not",
    )


def _verify_rfd(doc: Dict[str, Any], g: Graph, tolerances: ToleranceConfig, report: VerificationReport) -> None:
    """
    Rebuild the certificate with its recorded parameters and compare every
    recorded field; the acceptance thresholds of the ck and separation checks
    come from tolerances.
    """
    _require(doc, "family", "family_digest", "zs", "reports")
    params = doc["params"]
    recorded_tolerances = ToleranceConfig.from_dict(params.get("tolerances", {}))
    recorded_reports = doc["reports"]
    verdict = no_cycle_has_entry(g).holds
    report.add("verdict", verdict, "no cycle has an entry")
    if not verdict:
        return

    expected = certificate_to_dict(decide_rfd(
        g, int(params["truncation"]), int(params["zcount"]), recorded_tolerances,
        search_min_z="min_zcount" in recorded_reports,
    ))
    expected_reports = expected["reports"]

    family_json = doc["family"]
    report.add("family_digest", family_digest(family_json) == doc["family_digest"], "embedded family digest")
    report.add("zs", doc["zs"] == expected["zs"], f"{params['zcount']} roots of unity")
    report.add("family_reproduction", family_json == expected["family"], "family rebuilt from the graph matches")
    report.add("branch", doc.get("branch") == expected["branch"], f"expected {expected['branch']}")
    report.add(
        "dimensions",
        doc.get("dimensions") == expected["dimensions"]
        and doc.get("dimensions") == [data.get("dim") for data in family_json],
        f"expected {expected['dimensions']}",
    )
    report.add(
        "decomposition", doc.get("decomposition") == expected.get("decomposition"), "cycle/forest split",
    )

    try:
        family = [rep_from_json(g, data) for data in family_json]
    except (KeyError, TypeError, ValueError) as e:
        report.add("ck", False, f"embedded family unreadable: {e}")
        return
    ck_max = max(check_ck(rep, tolerances.construction).max_residual for rep in family)
    report.add(
        "ck",
        ck_max <= tolerances.construction
        and recorded_reports.get("ck_max_residual") == expected_reports["ck_max_residual"],
        f"max residual {ck_max:.3e}",
    )

    zs = [complex(re, im) for re, im in doc["zs"]]
    separation = separation_check(g, int(params["truncation"]), zs, tolerances, family=family)
    report.add(
        "separation",
        separation.separated and recorded_reports.get("separation") == expected_reports["separation"],
        f"rank {separation.rank} of {separation.expected}",
    )

    if "amalgam" in doc or "amalgam" in expected:
        recorded = recorded_reports.get("compatibility")
        report.add(
            "compatibility",
            doc.get("amalgam") == expected.get("amalgam")
            and recorded == expected_reports.get("compatibility")
            and bool(recorded and recorded.get("passed")),
            f"residual {expected_reports.get('compatibility', {}).get('max_residual')}",
        )
    if "min_zcount" in recorded_reports:
        report.add(
            "min_zcount", recorded_reports["min_zcount"] == expected_reports.get("min_zcount"),
            f"expected {expected_reports.get('min_zcount')}",
        )


def verify_certificate(
    doc: Dict[str, Any], g: Graph, tolerances: Optional[ToleranceConfig] = None,
) -> VerificationReport:
    """
    Replay every check recorded in a certificate document against g.

    Raises:
        CertificateError: DigestMismatch when the certificate was made for a
        different graph; InvalidCertificate when the document is malformed
    """
    if not isinstance(doc, dict):
        raise enhance_error(ErrorCode.INVALID_CERTIFICATE, "Certificate must be a JSON object")
    _require(doc, "verdict", "graph_digest", "params")
    digest = graph_digest(g)
    if doc["graph_digest"] != digest:
        raise enhance_error(
            ErrorCode.DIGEST_MISMATCH, "Certificate does not belong to this graph",
            expected=doc["graph_digest"], actual=digest,
        )
    if tolerances is None:
        tolerances = ToleranceConfig.from_dict(doc["params"].get("tolerances", {}))

    report = VerificationReport(verdict=str(doc["verdict"]))
    try:
        if doc["verdict"] == Verdict.NOT_RFD.value:
            _verify_not_rfd(doc, g, report)
        elif doc["verdict"] == Verdict.RFD.value:
            _verify_rfd(doc, g, tolerances, report)
        else:
            raise enhance_error(ErrorCode.INVALID_CERTIFICATE, f"Unknown verdict {doc['verdict']!r}")
    except GraphRFDError as e:
        if e.code in (ErrorCode.INVALID_CERTIFICATE, ErrorCode.DIGEST_MISMATCH):
            raise
        report.add("replay", False, e.message)
    except (KeyError, TypeError, ValueError) as e:
        raise enhance_error(ErrorCode.INVALID_CERTIFICATE, f"Malformed certificate: {e}") from e

    logger.info(f"Verification {'passed' if report.passed else 'failed'}: {report.failing or 'all checks'}")
    return report
