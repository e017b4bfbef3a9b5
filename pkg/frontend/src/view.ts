/*
 * HTML renderers. Pure string-in string-out so they run headless under the
 * test runner; main.ts owns the DOM. Every number shown here was returned
 * by the service, formatting is the only thing this module does to it.
 */

import type { SelectionBound, SessionView } from "./api.js";
import type { HistoryPair, ReplayOutcome } from "./state.js";

export function escapeHtml(s: string): string {
    return s
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

function fmt(x: number | null): string {
    if (x === null) {
        return "n/a";
    }
    if (x === 0) {
        return "0";
    }
    const abs = Math.abs(x);
    return abs >= 0.001 && abs < 10000 ? String(Number(x.toPrecision(4))) : x.toExponential(3);
}

function intervalInWords(s: SessionView): string {
    const pct = fmt((1 - s.report.alpha) * 100);
    const k = s.report.u_max;
    if (k === 0) {
        return `At level ${pct}% the data certify no false nulls: the interval [0, ${s.n}] is the whole range.`;
    }
    const noun = k === 1 ? "hypothesis is a false null" : "hypotheses are false nulls";
    return `With ${pct}% confidence, at least ${k} of the ${s.n} ${noun} (interval [${k}, ${s.n}]).`;
}

export function renderSessionView(s: SessionView): string {
    const r = s.report;
    const rows: string[] = [];
    for (const row of r.curve) {
        const inPrefix = row.u <= r.u_max;
        const stopsHere = row.u === r.u_max + 1;
        const cls = inPrefix ? "in-prefix" : stopsHere ? "prefix-stop" : "";
        const marker = stopsHere ? " &larr; first u with p above &alpha;, the prefix ends" : "";
        rows.push(
            `<tr${cls ? ` class="${cls}"` : ""}>` +
                `<td>${row.u}</td><td>${row.m}</td>` +
                `<td>${fmt(row.statistic)}</td>` +
                `<td>${fmt(row.p_value)}</td>` +
                `<td>${row.le_alpha ? "yes" : "no"}${marker}</td>` +
                `</tr>`,
        );
    }
    const banner = s.lattice_enabled
        ? ""
        : `<p class="banner">post-hoc queries disabled (n &gt; 20)</p>`;
    return (
        `<div class="session-meta">` +
        `<span class="badge badge-umax">u_max = ${r.u_max}</span> ` +
        `<span class="meta">n = ${s.n}, &alpha; = ${fmt(r.alpha)} (fixed at upload), combiner = ${escapeHtml(r.combiner)}</span>` +
        `</div>` +
        banner +
        `<p class="interval">${intervalInWords(s)}</p>` +
        `<table class="curve"><thead><tr>` +
        `<th>u</th><th>m</th><th>statistic</th><th>p^(u/n)</th><th>&le; &alpha;</th>` +
        `</tr></thead><tbody>${rows.join("")}</tbody></table>`
    );
}

export function renderSelectionPanel(ids: string[], selected: string[], enabled: boolean): string {
    const dis = enabled ? "" : " disabled";
    const boxes = ids
        .map((id) => {
            const esc = escapeHtml(id);
            const checked = selected.includes(id) ? " checked" : "";
            return (
                `<label class="pick"><input type="checkbox" data-id="${esc}"${checked}${dis}> ${esc}</label>`
            );
        })
        .join("");
    return (
        `<div class="pick-list">${boxes}</div>` +
        `<div class="pick-actions">` +
        `<button id="select-all"${dis}>select all</button>` +
        `<button id="select-none"${dis}>clear</button>` +
        `</div>`
    );
}

export function renderAgreementBadge(s: SessionView, bound: SelectionBound): string {
    if (bound.selection_size !== s.n || bound.f_alpha !== s.report.u_max) {
        return "";
    }
    return (
        `<span class="badge badge-agree">full set: f_&alpha; = u_max = ${bound.f_alpha}` +
        ` (closed testing agrees with the curve)</span>`
    );
}

export function renderBound(s: SessionView, bound: SelectionBound | null): string {
    if (bound === null) {
        return `<p class="muted">select &ge; 1 hypothesis</p>`;
    }
    const witness =
        bound.witness.length === 0
            ? "every subset of the selection is rejected"
            : `largest unrejected subset: {${bound.witness.map(escapeHtml).join(", ")}}`;
    const agree = renderAgreementBadge(s, bound);
    return (
        `<p class="bound-line">f_&alpha;({${bound.selection.map(escapeHtml).join(", ")}})` +
        ` = <strong>${bound.f_alpha}</strong> of ${bound.selection_size} selected</p>` +
        `<p class="muted">${witness}</p>` +
        `<p class="muted">simultaneous over all selections, no multiplicity debt across queries</p>` +
        (agree ? `<p>${agree}</p>` : "")
    );
}

export function renderRetryNote(ids: string[], message: string): string {
    return (
        `<p class="error">bound query failed: ${escapeHtml(message)} (selection kept)</p>` +
        `<button id="retry-query" data-ids="${escapeHtml(ids.join(","))}">retry</button>`
    );
}

export function renderHistoryPanel(pairs: HistoryPair[], exportEnabled: boolean): string {
    const items = pairs
        .map(
            (p, i) =>
                `<li>query ${i + 1}: {${p.ids.map(escapeHtml).join(", ")}} &rarr; f_&alpha; = ${p.f_alpha}</li>`,
        )
        .join("");
    const noun = pairs.length === 1 ? "query" : "queries";
    return (
        `<p class="meta">${pairs.length} ${noun} this session</p>` +
        `<ol class="history">${items}</ol>` +
        `<button id="export-history"${exportEnabled ? "" : " disabled"}>export history</button>`
    );
}

export function renderReplayOutcomes(outcomes: ReplayOutcome[]): string {
    const items = outcomes
        .map((o) => {
            const verdict = o.matched ? "matches byte-for-byte" : "MISMATCH";
            return `<li class="${o.matched ? "ok" : "error"}">query ${o.index + 1} {${o.ids
                .map(escapeHtml)
                .join(", ")}}: ${verdict}</li>`;
        })
        .join("");
    const all = outcomes.every((o) => o.matched);
    const head = all
        ? `replayed ${outcomes.length} of ${outcomes.length} queries, all byte-identical`
        : `replay found differences`;
    return `<p class="${all ? "ok" : "error"}">${head}</p><ol>${items}</ol>`;
}

export function renderInlineError(message: string): string {
    return `<p class="error">${escapeHtml(message)}</p>`;
}
