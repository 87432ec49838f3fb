# SPDX-License-Identifier: MIT
"""
Constantes compartidas: nombres de artefactos, tolerancias y versión.
"""

TOOL_VERSION = "0.3.0"
INSTANCE_SCHEMA_VERSION = 1
SNAPSHOT_FORMAT = "monge_lab field snapshot v1"

DEFAULT_SEED = 42
DEFAULT_OUTPUT_DIR = "runs"

# Artefactos de una ejecución
MANIFEST_FILENAME = "manifest.json"
REPORTS_FILENAME = "reports.jsonl"
ESTIMATES_FILENAME = "estimates.jsonl"
STAGES_FILENAME = "stages.csv"
SOLUTION_FILENAME = "solution.csv"
CONDITIONS_FILENAME = "conditions.json"
LEMMAS_FILENAME = "lemmas.csv"
COUNTEREXAMPLES_FILENAME = "lemma_counterexamples.json"
CURVATURE_FILENAME = "curvature.csv"
AUDIT_FILENAME = "audit.json"
PROFILE_FILENAME = "profile.csv"

# Tolerancias
HERMITIAN_RTOL = 1e-12
OBC_THRESHOLD = -1e-9
LEMMA_RTOL = 1e-12
CONTINUATION_ATOL = 1e-12
