"""
Constants used throughout the CIUV engine.

This module centralizes view vocabularies, the per-view error statistics,
algorithm defaults and output file names.
"""

from typing import Dict, List, Tuple


class GdpViews:
    """The thirteen GDP views and their error statistics against GDP_PA."""

    FCE = "FCE"
    GCF = "GCF"
    NE = "NE"
    GDP_EA = "GDP_EA"
    NPT = "NPT"
    WC = "WC"
    DFA = "DFA"
    BB = "BB"
    GDP_IA = "GDP_IA"
    FI = "FI"
    SI = "SI"
    TI = "TI"
    GDP_PA = "GDP_PA"

    ALL: List[str] = [FCE, GCF, NE, GDP_EA, NPT, WC, DFA, BB, GDP_IA, FI, SI, TI, GDP_PA]

    GROUND_TRUTH_VIEW = GDP_PA

    # (mean error, standard deviation) in growth-rate percentage points
    ERROR_STATS: Dict[str, Tuple[float, float]] = {
        FCE: (2.4069, 1.5291),
        GCF: (3.8193, 2.9389),
        NE: (33.6287, 34.5794),
        GDP_EA: (1.2462, 0.9685),
        NPT: (3.9390, 3.4461),
        WC: (4.1153, 5.3371),
        DFA: (3.6984, 2.3672),
        BB: (10.7253, 14.3010),
        GDP_IA: (3.0893, 3.6595),
        FI: (4.8382, 3.2961),
        SI: (1.6570, 1.1663),
        TI: (2.6926, 1.9201),
        GDP_PA: (0.0, 0.0),
    }

    # Accounting identities that hold in levels: aggregate = sum(components)
    IDENTITIES: Dict[str, List[str]] = {
        GDP_EA: [FCE, GCF, NE],
        GDP_IA: [NPT, WC, DFA, BB],
        GDP_PA: [FI, SI, TI],
    }

    @classmethod
    def is_valid(cls, name: str) -> bool:
        """Check if a view name belongs to the GDP view vocabulary."""
        return name in cls.ALL


class ErrorSignProfiles:
    """Sign patterns applied to the per-view mean errors during synthesis."""

    POSITIVE = "positive"
    MIXED = "mixed"

    ALL: List[str] = [POSITIVE, MIXED]

    # Alternating signs inside each accounting approach, so errors partly
    # cancel across views as they must in the published series (its Mean
    # baseline error is far below the average absolute view error).
    MIXED_SIGNS: Dict[str, int] = {
        GdpViews.FCE: 1,
        GdpViews.GCF: -1,
        GdpViews.NE: 1,
        GdpViews.GDP_EA: 1,
        GdpViews.NPT: -1,
        GdpViews.WC: 1,
        GdpViews.DFA: -1,
        GdpViews.BB: 1,
        GdpViews.GDP_IA: -1,
        GdpViews.FI: -1,
        GdpViews.SI: 1,
        GdpViews.TI: -1,
        GdpViews.GDP_PA: 1,
    }

    @classmethod
    def signs_for(cls, profile: str) -> Dict[str, int]:
        """Return the per-view sign map for a profile name."""
        if profile == cls.MIXED:
            return dict(cls.MIXED_SIGNS)
        return {view: 1 for view in GdpViews.ALL}


class MethodNames:
    """Estimator names as they appear in result tables."""

    CIUV = "CIUV"
    MEAN = "Mean"
    MEDIAN = "Median"
    VOTING = "Voting"
    K_SOURCES = "K-sources"

    ALL: List[str] = [CIUV, MEAN, MEDIAN, VOTING, K_SOURCES]


class AlgorithmDefaults:
    """Default values for the stopping rule, weighting and simulation."""

    ERROR_THRESHOLD = 1.0
    ACCEPTABLE_CONFIDENCE = 0.9
    MIN_IMPROVEMENT = 0.01
    MAX_ITERATIONS = 50
    N_PROBE_QUESTIONS = 10
    IMPROVEMENT_A = 0.1
    IMPROVEMENT_FACTOR = 0.2
    K = 3
    N_TRIALS = 10
    N_QUESTIONS = 20
    GROWTH_LOW = 0.0
    GROWTH_HIGH = 15.0
    IDENTITY_TOLERANCE = 0.005
    SIMPLEX_TOLERANCE = 1e-9


class FilePatterns:
    """Output file names written by the experiment harness."""

    RESULTS = "results.csv"
    TRAJECTORY = "trajectory.jsonl"
    PLOT_DIR = "plotdata"
    REPORTS = "reports.csv"
    TRUTHS = "truths.csv"


class CsvColumns:
    """Column names of the long-format CSV files."""

    QUESTION_ID = "question_id"
    SOURCE_ID = "source_id"
    VALUE = "value"
    TRUTH = "truth"
    YEAR = "year"
    REPRESENTATION_ID = "representation_id"
    SCALE = "scale"
    OFFSET = "offset"

    REPORTS: List[str] = [QUESTION_ID, SOURCE_ID, VALUE]
    TRUTHS: List[str] = [QUESTION_ID, TRUTH]
    MAPPINGS: List[str] = [REPRESENTATION_ID, SCALE, OFFSET]
    LEVELS: List[str] = [YEAR] + GdpViews.ALL


class ExitCodes:
    """Process exit codes of the command-line harness."""

    OK = 0
    UNEXPECTED = 1
    CONFIGURATION = 2
    DATA = 3
    VALIDATION = 4
