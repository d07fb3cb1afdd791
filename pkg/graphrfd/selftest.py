"""
Hermetic self-test for graphrfd.

Validates basic contracts on the named graphs and on a seeded sample of
random graphs:
- decision agrees with brute-force cycle enumeration
- synthesized families satisfy the CK relations
- normal forms do not depend on rewrite order
- certify then verify round-trips
- tool registry imports cleanly
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from typing import Optional

from graphrfd import config
from graphrfd.config import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)

RANDOM_GRAPHS = 40


def _decision_agrees(rng: random.Random) -> None:
    from graphrfd.core.graph import entry_oracle, no_cycle_has_entry
    from graphrfd.corpus import random_graph

    for _ in range(RANDOM_GRAPHS):
        g = random_graph(rng)
        assert no_cycle_has_entry(g).holds == entry_oracle(g), f"decision disagrees on {g}"


def _families_satisfy_relations(rng: random.Random) -> None:
    from graphrfd.core.representations import build_family, check_ck, roots_of_unity
    from graphrfd.corpus import random_no_entry_graph

    for _ in range(RANDOM_GRAPHS // 4):
        g = random_no_entry_graph(rng, max_vertices=8, max_edges=12)
        for rep in build_family(g, roots_of_unity(3)):
            report = check_ck(rep, DEFAULT_TOLERANCES.construction)
            assert report.passed, f"CK failure {report.failing()} on {g}"


def _normal_form_confluent(rng: random.Random) -> None:
    from graphrfd.core.symbolic import normal_form
    from graphrfd.corpus import random_element, random_graph

    for _ in range(RANDOM_GRAPHS // 4):
        g = random_graph(rng, max_vertices=4, max_edges=6)
        x = random_element(rng, g)
        first = normal_form(x, rng=random.Random(rng.random()))
        assert first == normal_form(x, rng=random.Random(rng.random())), "rewrite order changed the normal form"


def _certificates_round_trip() -> None:
    from graphrfd.core.certificate import certificate_to_json, decide_rfd, verify_certificate
    from graphrfd.corpus import NAMED_GRAPHS

    for name, build in NAMED_GRAPHS.items():
        g = build()
        doc = json.loads(certificate_to_json(decide_rfd(g, truncation=1)))
        report = verify_certificate(doc, g)
        assert report.passed, f"{name}: failing checks {report.failing}"


def _tools_import() -> None:
    from graphrfd.tools import get_tool_info

    info = get_tool_info()
    assert "categories" in info and info["total_tools"] >= 1


def run_selftest(seed: Optional[int] = None) -> bool:
    """Run every check; returns False and logs the first failure."""
    seed = seed if seed is not None else random.randrange(2**32)
    logger.info(f"Selftest seed {seed}")
    rng = random.Random(seed)
    try:
        _decision_agrees(rng)
        _families_satisfy_relations(rng)
        _normal_form_confluent(rng)
        _certificates_round_trip()
        _tools_import()
    except AssertionError as e:
        logger.error(f"Selftest failed (seed {seed}): {e}")
        return False
    return True


def main(argv: list[str] | None = None) -> int:
    config.load_environment_config()
    logging.basicConfig(level=getattr(logging, config.LOG_LEVEL), format=config.LOG_FORMAT, stream=sys.stderr)
    parser = argparse.ArgumentParser(prog="selftest", description="graphrfd smoke checks")
    parser.add_argument("--seed", type=int, help="Seed for the randomized checks")
    args = parser.parse_args(argv)

    if not run_selftest(args.seed):
        return 1
    print("Selftest OK")
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
