/*
 * Typed client for the bound service. Every call keeps the response body
 * exactly as it came off the wire (the `raw` field) because the history
 * export promises byte-for-byte replayability; parsed objects are for
 * display only and are never re-serialized back into the log.
 */

export interface HypothesisRecord {
    id: string;
    p: number;
    family?: string;
}

export interface CurveRow {
    u: number;
    m: number;
    statistic: number | null;
    p_value: number;
    le_alpha: boolean;
}

export interface BoundReport {
    n: number;
    alpha: number;
    combiner: string;
    u_max: number;
    interval: [number, number];
    independence_assumed: boolean;
    curve: CurveRow[];
}

export interface SessionView {
    session_id: string;
    created_at: string;
    n: number;
    lattice_enabled: boolean;
    report: BoundReport;
}

export interface SelectionBound {
    f_alpha: number;
    selection: string[];
    selection_size: number;
    witness: string[];
    alpha: number;
    combiner: string;
    simultaneous: boolean;
    session_id: string;
}

export interface HealthStatus {
    status: string;
    sessions: number;
}

export interface RequestLine {
    method: string;
    path: string;
    body: string | null;
}

export interface Exchange<T> {
    status: number;
    data: T;
    raw: string;
    request: RequestLine;
}

/** An HTTP error the service described through its error envelope. */
export class ApiError extends Error {
    readonly status: number;
    readonly code: string;

    constructor(status: number, code: string, message: string) {
        super(message);
        this.name = "ApiError";
        this.status = status;
        this.code = code;
    }
}

export class ApiClient {
    private readonly baseUrl: string;
    private readonly fetchFn: typeof fetch;

    constructor(baseUrl: string, fetchFn: typeof fetch = fetch) {
        this.baseUrl = baseUrl.replace(/\/+$/, "");
        this.fetchFn = fetchFn;
    }

    get base(): string {
        return this.baseUrl;
    }

    async health(): Promise<Exchange<HealthStatus>> {
        return this.exchange("GET", "/healthz");
    }

    async createSession(
        hypotheses: HypothesisRecord[],
        alpha: number,
        combiner: string,
    ): Promise<Exchange<SessionView>> {
        return this.exchange("POST", "/sessions", { hypotheses, alpha, combiner });
    }

    async report(sessionId: string): Promise<Exchange<SessionView>> {
        return this.exchange("GET", `/sessions/${encodeURIComponent(sessionId)}/report`);
    }

    async selection(sessionId: string, ids: string[]): Promise<Exchange<SelectionBound>> {
        return this.exchange("POST", `/sessions/${encodeURIComponent(sessionId)}/selection`, { ids });
    }

    /**
     * Re-issue a logged request without touching its body. The body string
     * is sent verbatim, not re-encoded, so a replayed exchange is the same
     * bytes on the wire as the original.
     */
    async resend(line: RequestLine): Promise<Exchange<unknown>> {
        return this.send(line.method, line.path, line.body);
    }

    private async exchange<T>(method: string, path: string, body?: unknown): Promise<Exchange<T>> {
        const payload = body === undefined ? null : JSON.stringify(body);
        return this.send(method, path, payload) as Promise<Exchange<T>>;
    }

    private async send(method: string, path: string, payload: string | null): Promise<Exchange<unknown>> {
        const init: RequestInit = { method };
        if (payload !== null) {
            init.body = payload;
            init.headers = { "content-type": "application/json" };
        }
        const res = await this.fetchFn(this.baseUrl + path, init);
        const raw = await res.text();
        let data: unknown;
        try {
            data = JSON.parse(raw);
        } catch {
            throw new ApiError(res.status, "bad_response", "service returned a non-JSON body");
        }
        if (!res.ok) {
            const envelope = (data as { error?: { code?: string; message?: string } }).error ?? {};
            throw new ApiError(
                res.status,
                envelope.code ?? "http_error",
                envelope.message ?? `request failed with status ${res.status}`,
            );
        }
        return { status: res.status, data, raw, request: { method, path, body: payload } };
    }
}
