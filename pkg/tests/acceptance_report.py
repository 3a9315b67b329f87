"""Collects one result line per acceptance criterion for the terminal summary."""

RESULTS: dict[int, tuple[bool, str]] = {}


def report(number: int, ok: bool, detail: str) -> bool:
    RESULTS[number] = (bool(ok), detail)
    print(f"CRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok
