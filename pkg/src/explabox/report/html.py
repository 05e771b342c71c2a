"""Static single-file HTML rendering of a report.

Self-contained by construction: inline CSS, inline SVG bars, no scripts and
no external references, so the page can be archived next to the JSON report.
Rendering is a pure function of the report dict (byte-identical re-renders).
"""

from __future__ import annotations

import html

_CSS = """
body { font-family: Georgia, serif; margin: 2rem auto; max-width: 60rem; color: #1c1c1c; }
h1 { border-bottom: 2px solid #1c1c1c; padding-bottom: .3rem; }
h2 { margin-top: 2rem; }
table { border-collapse: collapse; margin: .6rem 0; }
th, td { border: 1px solid #999; padding: .25rem .6rem; text-align: left; }
th { background: #eee; }
td.num { text-align: right; font-variant-numeric: tabular-nums; }
.meta { color: #555; font-size: .9rem; }
.fail { background: #fdd; }
.pass { background: #dfd; }
.cell { text-align: center; }
"""


def _esc(value: object) -> str:
    return html.escape(str(value), quote=True)


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if value is None:
        return "—"
    return str(value)


def _table(headers: list[str], rows: list[list[object]]) -> list[str]:
    out = ["<table>", "<tr>" + "".join(f"<th>{_esc(h)}</th>" for h in headers) + "</tr>"]
    for row in rows:
        cells = []
        for value in row:
            cls = ' class="num"' if isinstance(value, (int, float)) and not isinstance(value, bool) else ""
            cells.append(f"<td{cls}>{_esc(_fmt(value))}</td>")
        out.append("<tr>" + "".join(cells) + "</tr>")
    out.append("</table>")
    return out


def _confusion_section(payload: dict) -> list[str]:
    labels = payload["labels"]
    counts = payload["counts"]
    peak = max((max(row) for row in counts), default=0) or 1
    out = ["<table>", "<tr><th>gold \\ pred</th>" + "".join(f"<th>{_esc(l)}</th>" for l in labels) + "</tr>"]
    for label, row in zip(labels, counts):
        cells = [f"<th>{_esc(label)}</th>"]
        for count in row:
            # light red heat scale by cell count
            alpha = int(200 * count / peak)
            cells.append(
                f'<td class="cell" style="background:rgba(214,69,65,{alpha / 255:.3f})">{count}</td>'
            )
        out.append("<tr>" + "".join(cells) + "</tr>")
    out.append("</table>")
    return out


def _attribution_section(payload: dict) -> list[str]:
    tokens = payload["tokens"]
    weights = payload["rendered_weights"]
    peak = max((abs(w) for w in weights), default=0.0) or 1.0
    bar_w, row_h, mid = 240, 18, 130
    height = row_h * len(tokens) + 4
    parts = [
        f'<svg width="{mid + bar_w + 120}" height="{height}" role="img" aria-label="token attributions">'
    ]
    for i, (token, weight) in enumerate(zip(tokens, weights)):
        y = i * row_h + 2
        length = abs(weight) / peak * (bar_w / 2)
        x = mid if weight >= 0 else mid - length
        color = "#2c7fb8" if weight >= 0 else "#d64541"
        parts.append(
            f'<rect x="{x:.1f}" y="{y}" width="{length:.1f}" height="{row_h - 4}" fill="{color}"/>'
        )
        parts.append(
            f'<text x="4" y="{y + row_h - 8}" font-size="12">{_esc(token)}</text>'
        )
        parts.append(
            f'<text x="{mid + bar_w / 2 + 6:.1f}" y="{y + row_h - 8}" font-size="12">{_fmt(weight)}</text>'
        )
    parts.append(f'<line x1="{mid}" y1="0" x2="{mid}" y2="{height}" stroke="#888"/>')
    parts.append("</svg>")
    header = (
        f"<p class=\"meta\">method {_esc(payload['method'])}, instance {_esc(payload['instance_id'])}, "
        f"target {_esc(payload.get('target_label'))}, base value {_fmt(payload['base_value'])}</p>"
    )
    return [header, "".join(parts)]


def _metrics_section(payload: dict) -> list[str]:
    out: list[str] = []
    if payload.get("task") == "classification":
        table = payload["metrics"]
        out.append(f"<p>accuracy: <strong>{_fmt(table['accuracy'])}</strong></p>")
        rows = [
            [label, m["precision"], m["recall"], m["f1"], m["support"]]
            for label, m in table["per_label"].items()
        ]
        out += _table(["label", "precision", "recall", "f1", "support"], rows)
        agg_rows = [
            [name, agg["precision"], agg["recall"], agg["f1"]]
            for name, agg in (("macro", table["macro"]), ("micro", table["micro"]), ("weighted", table["weighted"]))
        ]
        out += _table(["average", "precision", "recall", "f1"], agg_rows)
        if payload.get("confusion"):
            out.append("<h3>Confusion</h3>")
            out += _confusion_section(payload["confusion"])
    else:
        table = payload["metrics"]
        out += _table(
            ["mae", "mse", "rmse", "r2", "n"],
            [[table["mae"], table["mse"], table["rmse"], table["r2"], table["n"]]],
        )
    return out


def _test_result_section(payload: dict) -> list[str]:
    out = [
        f"<p>kind <strong>{_esc(payload['kind'])}</strong>, cases {payload['n_cases']}, "
        f"failures {payload['n_failures']}, failure rate {_fmt(payload['failure_rate'])}</p>"
    ]
    rows = []
    for verdict in payload["example_failures"]:
        rows.append(
            [verdict["case_id"], verdict["original_text"], verdict.get("variant_text"), verdict.get("detail")]
        )
    if rows:
        out.append("<h3>Example failures</h3>")
        out += _table(["case", "original", "variant", "detail"], rows)
    return out


def _fairness_section(payload: dict) -> list[str]:
    out = [f"<p>attribute <strong>{_esc(payload['attribute'])}</strong></p>"]
    if "positive_label" in payload:
        rows = [
            [g["group"], g["n"], g["positive_rate"], g.get("tpr"), g.get("fpr"), g.get("accuracy")]
            for g in payload["groups"]
        ]
        out += _table(["group", "n", "positive rate", "TPR", "FPR", "accuracy"], rows)
        out += _table(
            ["demographic parity diff", "demographic parity ratio", "equal opportunity diff", "equalized odds diff"],
            [[
                payload["demographic_parity_diff"],
                payload["demographic_parity_ratio"],
                payload.get("equal_opportunity_diff"),
                payload.get("equalized_odds_diff"),
            ]],
        )
    else:
        rows = [[g["group"], g["n"], g["mean_prediction"], g.get("loss")] for g in payload["groups"]]
        out += _table(["group", "n", "mean prediction", payload.get("loss_kind", "loss")], rows)
        out += _table(
            ["group loss max", "KS diff"],
            [[payload.get("group_loss_max"), payload["dp_ks_diff"]]],
        )
    return out


def _split_stats_section(payload: dict) -> list[str]:
    out = [
        f"<p>split <strong>{_esc(payload['split'])}</strong>, {payload['n_instances']} instances, "
        f"vocabulary {payload['vocabulary_size']}</p>"
    ]
    if payload["label_counts"]:
        out += _table(["label", "count"], [[k, v] for k, v in payload["label_counts"].items()])
    for name in ("char_length", "token_length"):
        s = payload[name]
        out += _table(
            [name, "min", "max", "mean", "median", "std"],
            [["", s["min"], s["max"], s["mean"], s["median"], s["std"]]],
        )
    out += _table(["token", "count"], [[t, c] for t, c in payload["top_tokens"]])
    return out


def _fuzz_section(payload: dict) -> list[str]:
    rows = [[v["name"], v["verdict"], v.get("detail", "")] for v in payload["verdicts"]]
    return [
        f"<p>corpus <strong>{_esc(payload['corpus_version'])}</strong></p>",
        *_table(["input", "verdict", "detail"], rows),
    ]


def _global_summary_section(payload: dict) -> list[str]:
    out = [f"<p>kind <strong>{_esc(payload['kind'])}</strong></p>"]
    if payload["kind"] == "token-frequency":
        for label, tokens in payload["per_label"].items():
            out.append(f"<h3>{_esc(label)}</h3>")
            out += _table(["token", "doc freq"], [[t, c] for t, c in tokens])
    elif payload["kind"] == "token-information":
        out += _table(["token", "bits"], [[t, b] for t, b in payload["overall"][:25]])
    else:
        out.append(f"<pre>{_esc(payload.get('overall'))}</pre>")
        for label, body in payload.get("per_label", {}).items():
            out.append(f"<h3>{_esc(label)}</h3><pre>{_esc(body)}</pre>")
    return out


_SECTIONS = {
    "split-stats": _split_stats_section,
    "metrics": _metrics_section,
    "confusion": _confusion_section,
    "attribution": _attribution_section,
    "global-summary": _global_summary_section,
    "test-result": _test_result_section,
    "fairness-report": _fairness_section,
    "fuzz-result": _fuzz_section,
}


def render_html(report: dict) -> str:
    """Render a report dict (as produced by Report.to_dict) to one HTML page."""
    meta = report["meta"]
    parts = [
        "<!DOCTYPE html>",
        '<html lang="en"><head><meta charset="utf-8">',
        "<title>Model audit report</title>",
        f"<style>{_CSS}</style></head><body>",
        "<h1>Model audit report</h1>",
        '<p class="meta">'
        + ", ".join(
            f"{_esc(k)}: {_esc(v)}" for k, v in sorted(meta.items())
        )
        + f", content hash: {_esc(report.get('content_hash', ''))}</p>",
    ]
    for i, digestible in enumerate(report["digestibles"]):
        kind = digestible["kind"]
        parts.append(f"<h2>{i + 1}. {_esc(kind)}</h2>")
        parts += _SECTIONS[kind](digestible["payload"])
        prov = digestible["provenance"]
        parts.append(
            '<p class="meta">seed: '
            + _esc(prov.get("seed"))
            + ", model: "
            + _esc(prov.get("model_id"))
            + "</p>"
        )
    parts.append("</body></html>")
    return "\n".join(parts)
