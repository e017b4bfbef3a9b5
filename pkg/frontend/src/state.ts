/*
 * Client-side session state. The page computes no bound of its own: the
 * report comes from session creation and every f_alpha here was returned by
 * a selection query. What this module owns is the selection set, the
 * append-only query history, and the export/import/replay of that history.
 */

import { ApiClient, ApiError } from "./api.js";
import type { Exchange, RequestLine, SelectionBound, SessionView } from "./api.js";

export interface HistoryPair {
    ids: string[];
    f_alpha: number;
}

export interface QueryRecord {
    at: string;
    ids: string[];
    f_alpha: number;
    request: RequestLine;
    status: number;
    response: string;
}

export interface HistoryDocument {
    format: "pc-workbench-history";
    version: 1;
    exported_at: string;
    base_url: string;
    session_id: string;
    n: number;
    alpha: number;
    combiner: string;
    u_max: number;
    queries: QueryRecord[];
}

export class SelectionState {
    readonly session: SessionView;
    readonly baseUrl: string;
    // ids come from the upload; the report only carries the curve
    private readonly ids: string[];
    private selected: string[] = [];
    private bound: SelectionBound | null = null;
    private readonly queries: QueryRecord[] = [];

    constructor(session: SessionView, ids: string[], baseUrl: string) {
        this.session = session;
        this.ids = [...ids];
        this.baseUrl = baseUrl;
    }

    get selectedIds(): string[] {
        return [...this.selected];
    }

    get lastBound(): SelectionBound | null {
        return this.bound;
    }

    get queryCount(): number {
        return this.queries.length;
    }

    /** (ids, f_alpha) pairs in issue order. */
    get history(): HistoryPair[] {
        return this.queries.map((q) => ({ ids: [...q.ids], f_alpha: q.f_alpha }));
    }

    get queryLog(): QueryRecord[] {
        return this.queries.map((q) => ({ ...q, ids: [...q.ids] }));
    }

    isSelected(id: string): boolean {
        return this.selected.includes(id);
    }

    /**
     * The selection set with one id flipped, insertion order kept. Pure:
     * nothing commits until the service has answered for the new set.
     */
    nextSet(id: string): string[] {
        if (!this.ids.includes(id)) {
            throw new Error(`unknown hypothesis id "${id}"`);
        }
        return this.selected.includes(id)
            ? this.selected.filter((s) => s !== id)
            : [...this.selected, id];
    }

    allIds(): string[] {
        return [...this.ids];
    }

    /** Commit a set the service has answered for. History is append-only. */
    applyQuery(ids: string[], exchange: Exchange<SelectionBound>): void {
        this.selected = [...ids];
        this.bound = exchange.data;
        this.queries.push({
            at: new Date().toISOString(),
            ids: [...ids],
            f_alpha: exchange.data.f_alpha,
            request: exchange.request,
            status: exchange.status,
            response: exchange.raw,
        });
    }

    /** Deselecting to empty suppresses the query; no history entry. */
    clearSelection(): void {
        this.selected = [];
        this.bound = null;
    }

    exportHistory(): string {
        const doc: HistoryDocument = {
            format: "pc-workbench-history",
            version: 1,
            exported_at: new Date().toISOString(),
            base_url: this.baseUrl,
            session_id: this.session.session_id,
            n: this.session.n,
            alpha: this.session.report.alpha,
            combiner: this.session.report.combiner,
            u_max: this.session.report.u_max,
            queries: this.queryLog,
        };
        return JSON.stringify(doc, null, 2);
    }
}

export function parseHistoryDocument(text: string): HistoryDocument {
    let parsed: unknown;
    try {
        parsed = JSON.parse(text);
    } catch {
        throw new Error("history file is not valid JSON");
    }
    const doc = parsed as Partial<HistoryDocument>;
    if (doc.format !== "pc-workbench-history" || doc.version !== 1) {
        throw new Error("not a workbench history file");
    }
    if (typeof doc.session_id !== "string" || !Array.isArray(doc.queries)) {
        throw new Error("history file is missing required fields");
    }
    for (const q of doc.queries) {
        if (typeof q.response !== "string" || typeof q.request?.path !== "string") {
            throw new Error("history file has a malformed query entry");
        }
    }
    return doc as HistoryDocument;
}

export interface ReplayOutcome {
    index: number;
    ids: string[];
    matched: boolean;
    expected: string;
    received: string;
}

/**
 * Re-issue every logged query against the service and compare bodies
 * byte-for-byte. Sessions are immutable, so against the same session a
 * faithful log matches exactly; any drift is reported, not hidden.
 */
export async function replayHistory(client: ApiClient, doc: HistoryDocument): Promise<ReplayOutcome[]> {
    const outcomes: ReplayOutcome[] = [];
    for (let i = 0; i < doc.queries.length; i++) {
        const q = doc.queries[i];
        let received: string;
        try {
            const exchange = await client.resend(q.request);
            received = exchange.raw;
        } catch (err) {
            received = err instanceof ApiError ? `error ${err.status}: ${err.message}` : String(err);
        }
        outcomes.push({
            index: i,
            ids: [...q.ids],
            matched: received === q.response,
            expected: q.response,
            received,
        });
    }
    return outcomes;
}
