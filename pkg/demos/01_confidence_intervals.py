"""
Per-system bootstrap confidence intervals
=========================================

Build a small synthetic competition, score every system against the gold
standard, and turn the bootstrap sampling distributions into the ordered
interval table and its forest plot.
"""

from pathlib import Path

from boardstats import (
    BootstrapPlan,
    LabelNoise,
    ScoreSpec,
    SynthConfig,
    generate,
    render_forest_plot,
    summarize,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# Five systems of varying quality on a 3-class task with 400 test items.
# Each system corrupts the gold standard at its own rate, so we know in
# advance roughly how they should rank.
config = SynthConfig(
    n=400,
    seed=2024,
    labels=("favor", "none", "against"),
    label_probs=(0.3, 0.4, 0.3),
    systems={
        "team_a.run1": LabelNoise(rate=0.25),
        "team_a.run2": LabelNoise(rate=0.28),
        "team_b.run1": LabelNoise(rate=0.35),
        "team_c.run1": LabelNoise(rate=0.45),
        "baseline": LabelNoise(rate=0.60),
    },
)
table = generate(config)

# The competition metric: macro-F1 over the two stance classes only.
spec = ScoreSpec.macro_f1(["favor", "against"])

# 10,000 resamples, one shared index vector per replicate across systems.
plan = BootstrapPlan(replicates=10_000, seed=7)
summaries = summarize(table, spec, plan)

print(f"{'system':<14} {'observed':>9} {'lci':>8} {'mean':>8} {'uci':>8}")
for name, s in sorted(summaries.items(), key=lambda kv: -kv[1].observed):
    print(f"{name:<14} {s.observed:>9.4f} {s.lci:>8.4f} {s.boot_mean:>8.4f} {s.uci:>8.4f}")

# Overlapping intervals hint that two systems may be statistically tied;
# the paired analysis in demo 02 makes that precise.
figure = render_forest_plot(list(summaries.values()))
(OUT / "confidence_intervals.svg").write_text(figure.svg)
print(f"\nwrote {OUT / 'confidence_intervals.svg'}")
