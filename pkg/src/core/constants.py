import os
import tempfile
from pathlib import Path

# Load environment variables from .env file
from dotenv import load_dotenv

# Load .env from project root
_project_root = Path(__file__).parent.parent.parent
load_dotenv(_project_root / ".env")

# Application version from environment
APP_VERSION = os.getenv("APP_VERSION", "0.3.0")
APP_NAME = "corplex"

# Temporary directory for the rotating log file
TMPDIR = os.environ.get("CORPLEX_TMPDIR", os.path.join(tempfile.gettempdir(), APP_NAME))
LOG_FILE = os.path.join(TMPDIR, f"{APP_NAME}.log")
LOG_LEVEL = os.getenv("CORPLEX_LOG_LEVEL", "INFO")

# ---------------------------------------------------------------------------
# Log rotation limits: 5 MB ceiling, at most 3 rotated backups
# ---------------------------------------------------------------------------
LOG_MAX_BYTES = 5 * 1024 * 1024  # exactly 5 MB
LOG_BACKUP_COUNT = 3

# ---------------------------------------------------------------------------
# Analysis defaults (every CLI flag falls back to one of these)
# ---------------------------------------------------------------------------
DEFAULT_SEGMENT_SIZE = int(os.getenv("CORPLEX_SEGMENT_SIZE", "100"))
DEFAULT_READABILITY_SAMPLE = int(os.getenv("CORPLEX_READABILITY_SAMPLE", "1000"))
DEFAULT_FAMILY = os.getenv("CORPLEX_FAMILY", "gigp")
DEFAULT_TYPE_DEF = os.getenv("CORPLEX_TYPE_DEF", "surface")
DEFAULT_SEED = int(os.getenv("CORPLEX_SEED", "0"))
DEFAULT_INPUT_FORMAT = "auto"
DEFAULT_OUTPUT_DIR = os.getenv("CORPLEX_OUT", "corplex-out")
DEFAULT_OUTPUT_FORMATS = ("json", "csv", "svg")
GROWTH_CHECKPOINTS = 40
EXTRAPOLATION_FACTOR = 2

# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------
SENTENCE_END_TAG = os.getenv("CORPLEX_SENTENCE_TAG", "SENT")
PUNCTUATION_TAGS = frozenset({"SENT", "PUN", ",", ":", "(", ")", "''", "``", ".", "$"})
SENTENCE_FINAL_PUNCTUATION = frozenset({".", "!", "?"})
ABBREVIATIONS = ("e.g.", "i.e.", "etc.", "vs.", "cf.", "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.")
UNKNOWN_LEMMA = "<unknown>"
DOC_MARKUP = ("<text", "<doc")
SENTENCE_CLOSE_MARKUP = "</s>"

# ---------------------------------------------------------------------------
# LNRE fitting
# ---------------------------------------------------------------------------
FIT_MAX_CLASS = 15
FIT_MIN_CLASS_COUNT = 5
FIT_SIMPLEX_TOLERANCE = 1e-8
FIT_MAX_EVALUATIONS = 10_000
FIT_STARTS = 5
QUADRATURE_RTOL = 1e-8
FAMILY_FALLBACK_ORDER = ("gigp", "zm", "fzm")

# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------
KDE_GRID_POINTS = 512
KDE_EXTEND_BANDWIDTHS = 3.0
KS_SERIES_CUTOFF = 1e-12

# ---------------------------------------------------------------------------
# D-level
# ---------------------------------------------------------------------------
DLEVEL_LENGTH_CAP = 100
DLEVEL_MAX = 7

# ---------------------------------------------------------------------------
# Exit codes
# ---------------------------------------------------------------------------
EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2

# Output file names
REPORT_JSON = "report.json"
TABLES_CSV = "tables.csv"
DLEVEL_CSV = "dlevel.csv"
DLEVEL_JSON = "dlevel.json"
FITS_CSV = "fits.csv"
