from tinydb import TinyDB

from symplectic_restrictions.tinydb_helpers.db_path import TINYDB_PATH


def get_executed_checks(passed_only: bool = True) -> set[tuple[str, str, str]]:
    """Returns a set of keys corresponding to check instances already in the database.
    The key is a tuple of (output class name, germ, check instance name).

    Args:
        passed_only (bool): Only count instances whose latest recorded run passed.

    Returns:
        set[tuple[str, str, str]]: A set of tuples of (class_name, germ, check_instance_name).
    """
    db = TinyDB(TINYDB_PATH)
    latest: dict[tuple[str, str, str], dict] = {}
    for doc in db.all():
        if doc.get("output_type") != "instance":
            continue
        key = (doc["class_name"], doc["germ"], doc["check_instance"]["name"])
        if key not in latest or doc["execution_date"] > latest[key]["execution_date"]:
            latest[key] = doc
    return {key for key, doc in latest.items() if doc["passed"] or not passed_only}
