"""Service selection: check a repository of profiles against one requirement.

The broker loads every profile JSON in a directory, checks each against the
requirement with its own deterministically derived seed, and ranks the
satisfying services by their worst-case decision margin.

The same flow is available on the command line:

    probqos select fixtures/profiles fixtures/requirements/good_min.qreq --seed 7
"""

from pathlib import Path

from probqos import load_repository, parse_requirement, select

root = Path(__file__).resolve().parent.parent
entries = load_repository(root / "fixtures" / "profiles")
print("repository:", [e.service_id for e in entries])

text = (root / "fixtures" / "requirements" / "good_min.qreq").read_text()
req = parse_requirement(text, entries[0].profile.schema)

result = select(entries, req, k=50_000, seed=7)
print("requirement hash:", result.requirement_hash[:16], "...")
print("selected:")
for service_id, report in result.ranked:
    print(f"  {service_id}: {report.verdict}, min margin {report.min_margin:.4f}")
print("all verdicts:")
for service_id, report in result.checked:
    print(f"  {service_id}: {report.verdict}")
