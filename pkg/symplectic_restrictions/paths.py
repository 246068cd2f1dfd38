from pathlib import Path

DATA_DIR = Path(__file__).parent.parent / "data"
GERMS_DIR = DATA_DIR / "germs"
RULESETS_DIR = DATA_DIR / "rulesets"
GOLDEN_DIR = DATA_DIR / "golden"
CHECKS_DIR = DATA_DIR / "checks"
