#!/usr/bin/env python
"""
Unit tests for graph document and parameter validation.
"""
import unittest
from dataclasses import replace

from graphrfd.config import DEFAULT_TOLERANCES
from graphrfd.core.error_handler import ErrorCode
from graphrfd.core.validation import (
    MAX_GRAPH_ITEMS, validate_family_parameters, validate_graph_document, validate_tolerances,
)


class TestGraphDocumentValidation(unittest.TestCase):
    """Test cases for decoded graph documents."""

    def test_valid_document(self):
        doc = {"vertices": ["v", "w"], "edges": [{"id": "e", "src": "v", "rng": "w"}]}
        self.assertEqual(validate_graph_document(doc), (True, None, None))

    def test_edges_default_to_empty(self):
        is_valid, code, _ = validate_graph_document({"vertices": ["v"]})
        self.assertTrue(is_valid)
        self.assertIsNone(code)

    def test_non_object_rejected(self):
        for doc in ([], "graph", 3, None):
            is_valid, code, message = validate_graph_document(doc)
            self.assertFalse(is_valid)
            self.assertEqual(code, ErrorCode.MALFORMED_JSON)
            self.assertIsNotNone(message)

    def test_empty_graph(self):
        _, code, _ = validate_graph_document({"vertices": [], "edges": []})
        self.assertEqual(code, ErrorCode.EMPTY_GRAPH)

    def test_duplicate_ids(self):
        _, code, message = validate_graph_document({"vertices": ["v", "v"]})
        self.assertEqual(code, ErrorCode.DUPLICATE_ID)
        self.assertIn("'v'", message)

        doc = {
            "vertices": ["v"],
            "edges": [{"id": "e", "src": "v", "rng": "v"}, {"id": "e", "src": "v", "rng": "v"}],
        }
        _, code, _ = validate_graph_document(doc)
        self.assertEqual(code, ErrorCode.DUPLICATE_ID)

    def test_vertex_and_edge_may_share_an_id(self):
        doc = {"vertices": ["x"], "edges": [{"id": "x", "src": "x", "rng": "x"}]}
        is_valid, _, _ = validate_graph_document(doc)
        self.assertTrue(is_valid)

    def test_dangling_endpoint(self):
        doc = {"vertices": ["v"], "edges": [{"id": "e", "src": "v", "rng": "w"}]}
        _, code, message = validate_graph_document(doc)
        self.assertEqual(code, ErrorCode.DANGLING_ENDPOINT)
        self.assertIn("'w'", message)

    def test_malformed_edge_records(self):
        for record in ({"id": "e", "src": "v"}, ["e", "v", "v"], {"id": "", "src": "v", "rng": "v"},
                       {"id": 1, "src": "v", "rng": "v"}):
            _, code, _ = validate_graph_document({"vertices": ["v"], "edges": [record]})
            self.assertEqual(code, ErrorCode.MALFORMED_JSON, f"Record should be rejected: {record}")

    def test_size_limit(self):
        doc = {"vertices": [f"v{i}" for i in range(MAX_GRAPH_ITEMS + 1)]}
        _, code, message = validate_graph_document(doc)
        self.assertEqual(code, ErrorCode.MALFORMED_JSON)
        self.assertIn("too large", message)


class TestParameterValidation(unittest.TestCase):
    """Test cases for truncation, z-count and tolerance checks."""

    def test_family_parameters(self):
        for truncation, zcount in [(0, 1), (1, 3), (2, 5), (2, 9)]:
            is_valid, error = validate_family_parameters(truncation, zcount)
            self.assertTrue(is_valid, f"L={truncation}, m={zcount} should be accepted")
            self.assertIsNone(error)

    def test_too_few_points(self):
        is_valid, error = validate_family_parameters(2, 4)
        self.assertFalse(is_valid)
        self.assertIn("2L+1", error)

    def test_bad_types(self):
        for truncation, zcount in [(-1, 3), (1.5, 3), (1, 0), (1, "3")]:
            is_valid, _ = validate_family_parameters(truncation, zcount)
            self.assertFalse(is_valid, f"L={truncation!r}, m={zcount!r} should be rejected")

    def test_tolerances(self):
        self.assertEqual(validate_tolerances(DEFAULT_TOLERANCES), (True, None))
        for value in (0.0, -1e-12, float("inf")):
            is_valid, error = validate_tolerances(replace(DEFAULT_TOLERANCES, construction=value))
            self.assertFalse(is_valid)
            self.assertIn("construction", error)


if __name__ == "__main__":
    unittest.main()
