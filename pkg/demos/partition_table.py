"""Print the partition-level data for the tan() pair, one row per partition.

    python demos/partition_table.py
"""

from pasda_mini.bench import bundled_benchmark
from pasda_mini.minilang import parse_file
from pasda_mini.refine import RunConfig, run_pasda

case = bundled_benchmark() / "tan_scale_neq"
old, new = parse_file(case / "oldV.mini"), parse_file(case / "newV.mini")
report = run_pasda(old["snippet"], new["snippet"], RunConfig(depth_limit=10), old, new)

print(f"{'#':>2}  {'path condition':52} {'v1':>8} {'v2':>9}  {'reach':16} {'output':8} overall")
for r in report.partitions:
    print(f"{r.index:>2}  {str(r.pc):52} {str(r.effect_v1):>8} {str(r.effect_v2):>9}  "
          f"{r.reach.value:16} {r.output_class.value:8} {r.overall.value}")
print(f"\nprogram verdict: {report.verdict.value}")
for w in report.witnesses:
    print(f"witness for partition {w.partition}: {w.inputs} -> {w.effect_v1} vs {w.effect_v2}")
