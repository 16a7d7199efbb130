"""Show how the depth limit turns an unbounded loop into MAYBE_EQ.

Both versions compute the same value, but v2 loops x times.  Paths that
exceed the limit become DEPTH_LIMITED partitions; every other partition
is proven EQ, so the program is reported MAYBE_EQ rather than UNKNOWN.

    python demos/depth_limit.py [depth]
"""

import sys
from importlib import resources

from pasda_mini.minilang import parse_file
from pasda_mini.refine import RunConfig, run_pasda

depth = int(sys.argv[1]) if len(sys.argv) > 1 else 10
prog = parse_file(resources.files("pasda_mini") / "fixtures" / "loop_pair.mini")
report = run_pasda(prog["eq_v1"], prog["eq_v2"], RunConfig(depth_limit=depth), prog, prog)
for r in report.partitions:
    tag = "depth-limited" if r.depth_limited else r.overall.value
    print(f"{r.index:>3}  {str(r.pc):40} {tag}")
print(f"\nverdict at depth limit {depth}: {report.verdict.value}")
print("step timings:", {k: round(v, 4) for k, v in report.timings.items()})
