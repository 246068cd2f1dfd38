from symplectic_restrictions.paths import DATA_DIR

TINYDB_PATH = DATA_DIR / "tinydb.json"
