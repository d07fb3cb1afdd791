"""
Amalgamation data for a graph split into its cycles and the rest.

C*(G) is the amalgamated free product of C*(G1) + C and C*(G2) (Case1) or
C*(G2) + C (Case2) over a commutative base C^{n+1} or C^{n+2}. This module
records the two unital embeddings of the base as lists of vertex projections
and checks that the concrete factor representations agree on the base.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from graphrfd.config import DEFAULT_TOLERANCES
from graphrfd.core.error_handler import ErrorCode, enhance_error
from graphrfd.core.graph import CaseFlag, Decomposition, Graph, decompose, no_cycle_has_entry
from graphrfd.core.representations import SlotLayout, no_entry_rep, slot_layout

logger = logging.getLogger(__name__)

# Generator-table key of the adjoined C summand
ADJOINED_UNIT = "<adjoined-unit>"


class AmalgamCase(Enum):
    CASE1 = "Case1"  # G2 holds every vertex; base C^{n+1}
    CASE2 = "Case2"  # some cycle vertex lies outside G2; base C^{n+2}


@dataclass(frozen=True)
class ThetaImage:
    """Image of one base coordinate: a sum of vertex projections, or the adjoined unit."""
    projections: Tuple[str, ...] = ()
    adjoined_unit: bool = False

    def to_json(self) -> Dict[str, Any]:
        return {"projections": list(self.projections), "adjoined_unit": self.adjoined_unit}


@dataclass(frozen=True)
class AmalgamSpec:
    n: int
    case: AmalgamCase
    theta1: Tuple[ThetaImage, ...]
    theta2: Tuple[ThetaImage, ...]

    @property
    def base_dim(self) -> int:
        return len(self.theta1)


def amalgam_data(g: Graph, d: Optional[Decomposition] = None) -> AmalgamSpec:
    """
    The embeddings theta1 into C*(G1) + C and theta2 into the G2 factor.

    Coordinates delta_1 .. delta_n follow the shared vertices. Case1 adds
    delta_{n+1} sent to the adjoined unit and to the sum of the beta
    projections. Case2 adds delta_{n+1} sent to (sum of alphas, 0) and to the
    adjoined unit of C*(G2) + C, and delta_{n+2} sent to the adjoined unit of
    C*(G1) + C and to (sum of betas, 0).

    Raises:
        PreconditionError: TrivialDecomposition; ImpossibleCase when Case2
        has no alpha vertices
    """
    d = d if d is not None else decompose(g)
    shared = tuple(ThetaImage(projections=(v,)) for v in d.shared)
    betas = ThetaImage(projections=d.betas)
    adjoined = ThetaImage(adjoined_unit=True)

    if d.case_flag == CaseFlag.SAME_VERTEX_SET:
        spec = AmalgamSpec(
            n=len(d.shared), case=AmalgamCase.CASE1,
            theta1=shared + (adjoined,),
            theta2=shared + (betas,),
        )
    else:
        if not d.alphas:
            raise enhance_error(
                ErrorCode.IMPOSSIBLE_CASE,
                "G2 misses a vertex of G but no cycle vertex lies outside G2",
            )
        spec = AmalgamSpec(
            n=len(d.shared), case=AmalgamCase.CASE2,
            theta1=shared + (ThetaImage(projections=d.alphas), adjoined),
            theta2=shared + (adjoined, betas),
        )
    logger.debug(f"Amalgam {spec.case.value} over C^{spec.base_dim}")
    return spec


@dataclass
class FactorImages:
    """Generator images of both factors on the common D-dimensional space."""
    z: complex
    dim: int
    pi1: Dict[str, np.ndarray]
    pi2: Dict[str, np.ndarray]
    layout: SlotLayout


def _slot_projection(dim: int, slots: Sequence[int]) -> np.ndarray:
    mat = np.zeros((dim, dim), dtype=complex)
    for slot in slots:
        mat[slot, slot] = 1.0
    return mat


def build_factor_reps(g: Graph, d: Decomposition, z: complex) -> FactorImages:
    """
    pi_{1,z} on C*(G1) + C and pi_2 on the G2 factor, on the glued layout.

    The adjoined unit of the first factor acts on the forest slots off the
    cycles; in Case2 the adjoined unit of the second acts on the cycle tail.

    Raises:
        PreconditionError: EntryPresent
    """
    verdict = no_cycle_has_entry(g)
    if not verdict.holds:
        raise enhance_error(ErrorCode.ENTRY_PRESENT, f"Edge '{verdict.witness}' enters a cycle", witness=verdict.witness)
    layout = slot_layout(d.cycles, d.g2, d.shared)
    rep = no_entry_rep(g, d, {c.base: z for c in d.cycles})

    pi1 = {v: rep.vertex_mats[v] for v in d.g1.vertices}
    pi1.update({e: rep.edge_mats[e] for e in d.g1.edge_ids})
    pi1[ADJOINED_UNIT] = _slot_projection(rep.dim, layout.beta_slots)

    pi2 = {v: rep.vertex_mats[v] for v in d.g2.vertices}
    pi2.update({e: rep.edge_mats[e] for e in d.g2.edge_ids})
    if d.case_flag == CaseFlag.PROPER_SUBSET:
        pi2[ADJOINED_UNIT] = _slot_projection(rep.dim, layout.tail_slots)

    return FactorImages(z=complex(z), dim=rep.dim, pi1=pi1, pi2=pi2, layout=layout)


@dataclass
class CompatibilityReport:
    max_residual: float
    unital: bool
    injective: bool
    per_coordinate: List[Dict[str, Any]] = field(default_factory=list)
    tolerance: float = DEFAULT_TOLERANCES.compatibility

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance and self.unital and self.injective

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_residual": self.max_residual,
            "unital": self.unital,
            "injective": self.injective,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "per_coordinate": self.per_coordinate,
        }


def _theta_image(table: Dict[str, np.ndarray], image: ThetaImage, dim: int) -> np.ndarray:
    result = np.zeros((dim, dim), dtype=complex)
    keys = list(image.projections) + ([ADJOINED_UNIT] if image.adjoined_unit else [])
    for key in keys:
        if key not in table:
            raise enhance_error(ErrorCode.LAYOUT_MISMATCH, f"Factor has no image for '{key}'")
        if table[key].shape != (dim, dim):
            raise enhance_error(ErrorCode.LAYOUT_MISMATCH, f"Image of '{key}' has shape {table[key].shape}")
        result = result + table[key]
    return result


def check_compatibility(
    spec: AmalgamSpec, factors: Sequence[FactorImages], zs: Sequence[complex],
    tolerance: float = DEFAULT_TOLERANCES.compatibility,
) -> CompatibilityReport:
    """
    max over coordinates and z of |pi_{1,z}(theta1(delta_i)) - pi_2(theta2(delta_i))|.

    Both compositions are also checked to be unital, and injective on the base
    in the sense that no coordinate image vanishes.

    Raises:
        PreconditionError: LayoutMismatch
    """
    if len(factors) != len(zs):
        raise enhance_error(ErrorCode.LAYOUT_MISMATCH, f"{len(factors)} factor tables for {len(zs)} z values")
    if len(spec.theta1) != len(spec.theta2):
        raise enhance_error(ErrorCode.LAYOUT_MISMATCH, "theta1 and theta2 have different base dimensions")

    residuals = [0.0] * spec.base_dim
    unital = True
    injective = True
    for z, factor in zip(zs, factors):
        if abs(complex(z) - factor.z) > tolerance:
            raise enhance_error(ErrorCode.LAYOUT_MISMATCH, f"Factor built at z = {factor.z} listed under z = {z}")
        identity = np.eye(factor.dim, dtype=complex)
        sum1 = np.zeros_like(identity)
        sum2 = np.zeros_like(identity)
        for i, (t1, t2) in enumerate(zip(spec.theta1, spec.theta2)):
            img1 = _theta_image(factor.pi1, t1, factor.dim)
            img2 = _theta_image(factor.pi2, t2, factor.dim)
            residuals[i] = max(residuals[i], float(np.linalg.norm(img1 - img2, 2)))
            if np.linalg.norm(img1, 2) <= tolerance or np.linalg.norm(img2, 2) <= tolerance:
                injective = False
            sum1 = sum1 + img1
            sum2 = sum2 + img2
        if np.linalg.norm(sum1 - identity, 2) > tolerance or np.linalg.norm(sum2 - identity, 2) > tolerance:
            unital = False

    per_coordinate = [
        {"coordinate": f"delta_{i + 1}", "residual": residual} for i, residual in enumerate(residuals)
    ]
    report = CompatibilityReport(
        max_residual=max(residuals) if residuals else 0.0,
        unital=unital, injective=injective, per_coordinate=per_coordinate, tolerance=tolerance,
    )
    logger.debug(f"Compatibility residual {report.max_residual:.3e} over {len(zs)} points")
    return report


def amalgam_to_json(spec: AmalgamSpec) -> Dict[str, Any]:
    return {
        "n": spec.n,
        "case": spec.case.value,
        "base_dim": spec.base_dim,
        "theta1": [dict(t.to_json(), coordinate=f"delta_{i + 1}") for i, t in enumerate(spec.theta1)],
        "theta2": [dict(t.to_json(), coordinate=f"delta_{i + 1}") for i, t in enumerate(spec.theta2)],
    }
