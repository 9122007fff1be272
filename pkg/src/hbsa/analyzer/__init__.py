"""The four-step analyzer, its reference maps and the classification table."""
from hbsa.analyzer.classtable import ClassificationRecord, classification_records, expected_entries, render_expected
from hbsa.analyzer.core import (
    AnalysisReport,
    HeraldLedger,
    OracleMismatch,
    TableEntry,
    VerificationReport,
    analyze,
    check_oracle_equivalence,
    classify,
    run_pipeline,
    verify_table,
)
from hbsa.analyzer.oracle import errata, oracle_step, render_errata
from hbsa.analyzer.pipeline import BLOCK4_MAP, StepLedger, block4, step1, step2, step3

__all__ = [
    "AnalysisReport",
    "BLOCK4_MAP",
    "ClassificationRecord",
    "HeraldLedger",
    "OracleMismatch",
    "StepLedger",
    "TableEntry",
    "VerificationReport",
    "analyze",
    "block4",
    "check_oracle_equivalence",
    "classification_records",
    "classify",
    "errata",
    "expected_entries",
    "oracle_step",
    "render_errata",
    "render_expected",
    "run_pipeline",
    "step1",
    "step2",
    "step3",
    "verify_table",
]
