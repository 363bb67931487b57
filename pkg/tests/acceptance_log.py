"""One pass/fail line per acceptance criterion, printed at the end of the run."""

RESULTS: list[str] = []
