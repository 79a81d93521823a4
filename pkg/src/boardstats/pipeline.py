"""End-to-end analysis: CSV in, tables, plots and manifest out.

One bootstrap pass feeds every artifact: the per-system performance table,
the differences-from-the-best table, the pairwise significance matrix, the
p-value/correction table, the competition summary panel and the SVG figures
with their JSON sidecars.  A manifest records every knob that influenced the
numbers, so the manifest plus the input file determine every output byte;
nothing volatile (timestamps, machine state, worker count) is written.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from . import __version__, rng
from .bootstrap import QUANTILE_RULE, distributions, percentile_ci
from .corrections import adjust_all, build_families
from .dataio import RunConfig, fmt_float, load_table, parse_metric, write_csv, write_json, write_md
from .errors import ConfigError
from .inference import (
    delta_from_distributions,
    difference_ci,
    matrix_from_distributions,
    significance_stars,
)
from .plots import render_delta_histogram, render_difference_plot, render_forest_plot
from .report import build_report
from .table import BootstrapPlan, DifferenceSummary, PerformanceSummary, PredictionTable

@dataclass(frozen=True)
class PipelineResult:
    out_dir: Path
    artifacts: tuple[str, ...]
    report: object
    ranking: tuple[str, ...]


def run_pipeline(config: RunConfig, table: PredictionTable | None = None) -> PipelineResult:
    """Execute the full analysis described by ``config``.

    ``table`` bypasses CSV loading when the caller already has one in memory
    (the file at ``config.input`` is then never touched).
    """
    stage = "configuration"
    try:
        spec = parse_metric(config.metric, config.direction)
        plan = BootstrapPlan(
            replicates=config.samples,
            confidence=config.confidence,
            seed=config.seed,
            alpha=config.alpha,
            workers=config.workers,
        )
        methods = tuple(m for m in config.corrections if m != "none")

        stage = "input"
        if table is None:
            table = load_table(config.input, gold_col=config.gold_col, task=config.task)
        excluded = tuple(n for n in table.names if n == config.gold_alias)
        competitors = [n for n in table.names if n not in excluded]
        if len(competitors) < 2:
            raise ConfigError("need at least 2 competitors after gold-alias exclusion")
        if spec.metric in ("f1", "macro_f1"):
            missing = [c for c in spec.labels if c not in table.label_set]
            if missing:
                raise ConfigError(f"metric classes absent from the data: {missing}")

        stage = "bootstrap"
        dists = distributions(table, spec, plan, systems=competitors)
        rep = build_report(
            table, spec, plan, family_policy=config.family,
            gold_alias=config.gold_alias, dists=dists,
        )
        ranked = list(rep.ranking)

        stage = "inference"
        summaries = {}
        for name in ranked:
            ci = percentile_ci(dists[name], plan.confidence)
            summaries[name] = (dists[name].observed, ci)
        winner = ranked[0]
        deltas = {}
        for comp in ranked[1:]:
            pd = delta_from_distributions(
                winner, comp, dists[winner], dists[comp], spec, reorient=False
            )
            deltas[comp] = (pd, difference_ci(pd, plan.confidence))
        matrix = matrix_from_distributions(dists, spec, table.names)

        stage = "corrections"
        raw_p = {
            (e.reference, e.competitor): e.p for e in matrix.entries.values()
        }
        adjusted = (
            adjust_all(build_families(ranked, raw_p, config.family), methods)
            if methods
            else {pair: {} for pair in raw_p}
        )
        comparisons = []
        for j in range(len(ranked) - 1):
            for i in range(j + 1, len(ranked)):
                entry = matrix.entry(i, j)
                pair = (entry.reference, entry.competitor)
                if pair not in adjusted:  # vs_winner policy covers winner pairs only
                    continue
                pd = delta_from_distributions(
                    entry.reference, entry.competitor,
                    dists[entry.reference], dists[entry.competitor],
                    spec, reorient=False,
                )
                ci = difference_ci(pd, plan.confidence)
                comparisons.append(
                    DifferenceSummary(
                        reference=entry.reference,
                        competitor=entry.competitor,
                        observed_delta=entry.delta,
                        lci=ci.lci,
                        uci=ci.uci,
                        p_value=entry.p,
                        adjusted_p=adjusted[pair],
                    )
                )

        stage = "output"
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        artifacts = _write_artifacts(
            out, config, spec, plan, table, rep, ranked, summaries, deltas,
            matrix, comparisons, excluded,
        )
        return PipelineResult(
            out_dir=out, artifacts=tuple(artifacts), report=rep, ranking=tuple(ranked)
        )
    except Exception as exc:
        if not getattr(exc, "_stage", None):
            exc._stage = stage
        raise


def _write_artifacts(
    out, config, spec, plan, table, rep, ranked, summaries, deltas, matrix,
    comparisons, excluded,
):
    artifacts = []
    formats = set(config.formats)
    methods = tuple(m for m in config.corrections if m != "none")

    def emit(stem, payload, header, rows, title):
        if "json" in formats:
            write_json(out / f"{stem}.json", payload)
            artifacts.append(f"{stem}.json")
        if "csv" in formats:
            write_csv(out / f"{stem}.csv", header, rows)
            artifacts.append(f"{stem}.csv")
        if "md" in formats:
            write_md(out / f"{stem}.md", title, header, rows)
            artifacts.append(f"{stem}.md")

    # performance table, best system first
    perf_rows = [
        [name, fmt_float(obs), fmt_float(ci.lci), fmt_float(ci.mean), fmt_float(ci.uci)]
        for name, (obs, ci) in ((n, summaries[n]) for n in ranked)
    ]
    emit(
        "performance",
        {
            "metric": spec.display_name,
            "systems": [
                {
                    "system": name,
                    "observed": summaries[name][0],
                    "lci": summaries[name][1].lci,
                    "mean": summaries[name][1].mean,
                    "uci": summaries[name][1].uci,
                }
                for name in ranked
            ],
        },
        ["system", "observed", "lci", "mean", "uci"],
        perf_rows,
        "Bootstrap confidence intervals",
    )

    # differences from the best
    diff_rows = [
        [comp, fmt_float(pd.observed_delta), fmt_float(ci.lci), fmt_float(ci.mean),
         fmt_float(ci.uci), str(ci.contains_zero).lower()]
        for comp, (pd, ci) in ((c, deltas[c]) for c in ranked[1:])
    ]
    emit(
        "differences",
        {
            "reference": ranked[0],
            "comparisons": [
                {
                    "competitor": comp,
                    "observed_delta": deltas[comp][0].observed_delta,
                    "lci": deltas[comp][1].lci,
                    "mean": deltas[comp][1].mean,
                    "uci": deltas[comp][1].uci,
                    "contains_zero": deltas[comp][1].contains_zero,
                }
                for comp in ranked[1:]
            ],
        },
        ["competitor", "delta", "lci", "mean", "uci", "contains_zero"],
        diff_rows,
        f"Differences from the best ({ranked[0]})",
    )

    # lower-triangular difference matrix with stars
    header = ["system"] + list(matrix.systems[:-1])
    matrix_rows = []
    for i in range(1, len(matrix.systems)):
        row = [matrix.systems[i]]
        for j in range(len(matrix.systems) - 1):
            if j < i:
                e = matrix.entry(i, j)
                row.append(f"{e.delta:.3f} {e.stars}".rstrip())
            else:
                row.append("")
        matrix_rows.append(row)
    emit(
        "difference_matrix",
        {
            "systems": list(matrix.systems),
            "entries": [
                {
                    "reference": e.reference,
                    "competitor": e.competitor,
                    "delta": e.delta,
                    "p_value": e.p,
                    "stars": e.stars,
                }
                for (_, _), e in sorted(matrix.entries.items())
            ],
        },
        header,
        matrix_rows,
        "Score differences (column - row) with significance",
    )

    # p-values with corrections; the FDR column mirrors BH row for row
    columns = [
        m for m in ("bonferroni", "fdr", "holm", "bh")
        if m in methods or (m == "fdr" and "bh" in methods)
    ]
    pv_header = ["reference", "competitor", "delta", "p-value"] + columns
    pv_rows = []
    pv_payload = []
    for c in comparisons:
        row = [c.reference, c.competitor, f"{c.observed_delta:.3f}", fmt_float(c.p_value)]
        entry = {
            "reference": c.reference,
            "competitor": c.competitor,
            "delta": c.observed_delta,
            "p_value": c.p_value,
            "stars": significance_stars(c.p_value),
        }
        for m in columns:
            value = c.adjusted_p["bh" if m == "fdr" else m]
            row.append(fmt_float(value))
            entry[m] = value
        pv_rows.append(row)
        pv_payload.append(entry)
    emit(
        "pvalues",
        {"family_policy": config.family, "comparisons": pv_payload},
        pv_header,
        pv_rows,
        "Estimated p-values with multiple-comparison adjustments",
    )

    # competition summary panel
    rep_payload = {
        "n": rep.n,
        "m": rep.m,
        "possible_comparisons": rep.possible_comparisons,
        "ties_with_winner": rep.ties_with_winner,
        "ties_all_pairs": rep.ties_all_pairs,
        "win_med_gap": rep.win_med_gap,
        "cv": rep.cv,
        "cv_comparable": rep.cv_comparable,
        "ppi": rep.ppi,
        "alpha": rep.alpha,
        "metric": rep.metric,
        "direction": rep.direction,
        "family_policy": rep.family_policy,
        "ranking": list(rep.ranking),
        "ranking_ties": list(rep.ranking_ties),
        "excluded_systems": list(rep.excluded_systems),
        "observed_scores": rep.observed_scores,
    }
    tie_w = "/".join(str(rep.ties_with_winner[k]) for k in ("none",) + methods)
    tie_a = (
        "/".join(str(rep.ties_all_pairs[k]) for k in ("none",) + methods)
        if rep.ties_all_pairs is not None
        else "-"
    )
    rep_rows = [
        ["n", rep.n],
        ["m", rep.m],
        ["ties with winner (" + "/".join(("none",) + methods) + ")", tie_w],
        ["possible comparisons", rep.possible_comparisons],
        ["ties all pairs (" + "/".join(("none",) + methods) + ")", tie_a],
        ["|win - med|", f"{rep.win_med_gap:.3f}"],
        ["cv", f"{rep.cv:.3f}" + ("" if rep.cv_comparable else " (not comparable)")],
        ["ppi", f"{rep.ppi:.3f}" if rep.ppi is not None else "-"],
    ]
    emit("report", rep_payload, ["statistic", "value"], rep_rows, "Competition summary")

    # figures
    if "svg" in formats:
        perf_summaries = [
            PerformanceSummary(
                system=name, observed=summaries[name][0],
                boot_mean=summaries[name][1].mean, lci=summaries[name][1].lci,
                uci=summaries[name][1].uci,
            )
            for name in ranked
        ]
        figures = {
            "plot_forest": render_forest_plot(
                perf_summaries, higher_better=spec.higher_is_better
            ),
            "plot_differences": render_difference_plot(
                [(c, deltas[c][1]) for c in ranked[1:]], reference=ranked[0]
            ),
        }
        if ranked[1:]:
            figures["plot_delta_hist"] = render_delta_histogram(
                deltas[ranked[1]][0], bins=config.bins
            )
        for stem, figure in figures.items():
            (out / f"{stem}.svg").write_text(figure.svg, encoding="utf-8")
            write_json(out / f"{stem}.json", figure.data)
            artifacts.extend([f"{stem}.svg", f"{stem}.json"])

    manifest = {
        "package": "boardstats",
        "version": __version__,
        "input": config.input,
        "gold_col": config.gold_col,
        "task": table.task_kind.value,
        "metric": spec.display_name,
        "direction": spec.direction,
        "replicates": plan.replicates,
        "seed": plan.seed,
        "alpha": plan.alpha,
        "confidence": plan.confidence,
        "corrections": list(methods),
        "family_policy": config.family,
        "gold_alias": config.gold_alias,
        "excluded_systems": list(excluded),
        "quantile_rule": QUANTILE_RULE,
        "rng_family": rng.RNG_FAMILY,
        "n": table.n,
        "systems": list(table.names),
        "formats": sorted(formats),
        "artifacts": sorted(artifacts + ["manifest.json"]),
    }
    write_json(out / "manifest.json", manifest)
    artifacts.append("manifest.json")
    return sorted(artifacts)
