"""Follow the abstraction-refinement loop on a pair that needs it.

Iteration 1 sees tan() and cannot decide.  Iteration 2 abstracts every
unchanged statement into an uninterpreted function, and each later
iteration refines one of them until the verdict is decided.

    python demos/refinement_walkthrough.py
"""

from pasda_mini.bench import bundled_benchmark
from pasda_mini.minilang import parse_file
from pasda_mini.refine import Mode, RunConfig, run_pasda

case = bundled_benchmark() / "refinement_needed_eq"
old, new = parse_file(case / "oldV.mini"), parse_file(case / "newV.mini")
print((case / "oldV.mini").read_text())
print((case / "newV.mini").read_text())

for mode in Mode:
    report = run_pasda(old["snippet"], new["snippet"], RunConfig(mode=mode), old, new)
    print(f"mode {mode.value}: {report.verdict.value}")
    for it in report.iterations:
        active = ", ".join(f"{s.id}: {s.text}" for s in it.active_uifs) or "none"
        print(f"  iteration {it.iteration}: {it.program_class.value:9} partitions={len(it.partitions)} "
              f"uifs=[{active}] refine={it.refined_uif}")
    print()
