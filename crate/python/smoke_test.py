#!/usr/bin/env python3
"""End-to-end smoke test for the flowsched_py extension module.

Build the module first (either profile works):

    cargo build -p flowsched-python --release

then run this script from anywhere:

    python3 python/smoke_test.py
"""

import pathlib
import shutil
import sys
import tempfile

REPO = pathlib.Path(__file__).resolve().parent.parent


def import_module():
    candidates = [
        REPO / "target" / "release" / "libflowsched_py.so",
        REPO / "target" / "debug" / "libflowsched_py.so",
    ]
    lib = next((c for c in candidates if c.exists()), None)
    if lib is None:
        sys.exit("build the extension first: cargo build -p flowsched-python")
    stage = pathlib.Path(tempfile.mkdtemp(prefix="flowsched_py_"))
    shutil.copy(lib, stage / "flowsched_py.so")
    sys.path.insert(0, str(stage))
    import flowsched_py

    return flowsched_py


def main():
    fs = import_module()
    data = REPO / "crates" / "flowsched" / "data"

    wf = fs.Workflow.from_json((data / "example_workflow.json").read_text())
    cat = fs.Catalog.from_json((data / "example_catalog.json").read_text())
    assert wf.job_count() == 12 and wf.edge_count() == 19, repr(wf)
    print(f"loaded {wf!r} and {cat!r}")

    ranks = fs.plain_ranks(wf, cat)
    assert ranks["n1"] == 67.0 and ranks["n12"] == 14.0, ranks
    print(f"plain ranks: n1={ranks['n1']}, n12={ranks['n12']}")

    order = fs.priority_order(wf, cat, weighted=True)
    assert order.index("n8") < order.index("n3") < order.index("n10"), order
    print(f"weighted order: {' '.join(order)}")

    sched = fs.schedule(wf, cat, budget=500.0)
    assert sched.makespan == 55 and round(sched.total_cost) == 469, repr(sched)
    first = sched.rows()[0]
    assert (first["job"], first["vm"], first["finish"]) == ("n1", "vm3", 7), first
    print(f"greedy: {sched!r}")

    prop = fs.schedule(wf, cat, budget=500.0, split="proportional")
    assert sched.makespan <= prop.makespan, (sched.makespan, prop.makespan)
    print(f"even split beats extra-demand split: {sched.makespan} <= {prop.makespan}")

    fft = fs.Workflow.fft(16, seed=7)
    assert fft.job_count() == 95, fft.job_count()
    pool = fs.Catalog.builtin().pool(fft.job_count(), sufficiency="normal", seed=7)
    levels = fs.budget_levels(fft, pool)
    assert levels["d_min"] <= levels["d_max"], levels
    mid = fs.schedule(fft, pool, phi=0.5, weighted=True)
    print(f"fft16 on a {pool.instance_count()}-instance pool: {mid!r}")

    pi = fs.stationary(fft)
    assert abs(sum(pi.values()) - 1.0) < 1e-9
    print(f"stationary mass over {len(pi)} nodes sums to 1")

    lp = fs.export_lp(wf, cat, 500.0, 100)
    assert lp.startswith("\\ minimum-makespan") and lp.rstrip().endswith("End")
    assert lp.count("\n eq1_") == 12
    print(f"lp export: {len(lp)} chars, 12 assignment rows")

    tiny = fs.Workflow.random(4, density=0.4, work_lo=1, work_hi=4, seed=3)
    cat3 = fs.Catalog.from_json(
        '{"types":[{"name":"s","vcpus":1,"mem_gib":8,"price_per_slot":1},'
        '{"name":"f","vcpus":4,"mem_gib":8,"price_per_slot":3}],'
        '"instances":[{"id":"s0","type":"s"},{"id":"f0","type":"f"}]}'
    )
    best = fs.oracle(tiny, cat3, budget=100.0, horizon=25)
    greedy = fs.schedule(tiny, cat3, budget=100.0)
    assert best.makespan <= greedy.makespan
    print(f"oracle {best.makespan} <= greedy {greedy.makespan}")

    assert round(fs.compute_ar([64, 9, 2, 0], 75), 2) == 1.17
    print("average rank metric checks out")

    print("smoke test passed")


if __name__ == "__main__":
    main()
