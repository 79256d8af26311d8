# Experiment runners
#
# Each runner returns a report with rows, empirical constants and named
# pass/fail flags. Reports serialise deterministically, so reruns compare
# byte for byte.

from angmax import verify

report = verify.run_identity_sec4()
print(report.experiment, "->", report.empirical_constants["matching_candidate"])

report = verify.run_cauchy_suite(nodes=4000)
for row in report.rows[:3]:
    print(row["function"], "residual", row["residual"], "halved by", row["reduction"])
print("passed:", report.passed)

small = verify.FunctionFamily(count=5)
report = verify.run_theorem2(small, ps=(2.0, float("inf")))
print(report.empirical_constants)
print(report.to_json()[:300], "...")
