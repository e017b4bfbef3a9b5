import { readFileSync } from "node:fs";
import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { SelectionBound, SessionView } from "../src/api.js";

function fixture(name: string): string {
    return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");
}

const CREATE_BODY = fixture("create_session.json");
const SELECTION_BODY = fixture("selection_full.json");
const VALIDATION_BODY = fixture("error_validation.json");
const LATTICE_BODY = fixture("error_lattice.json");

function stubFetch(body: string, status: number) {
    return vi.fn(async () => new Response(body, { status }));
}

describe("ApiClient", () => {
    it("posts hypotheses and keeps the response bytes untouched", async () => {
        const fetchFn = stubFetch(CREATE_BODY, 201);
        const client = new ApiClient("http://example.test", fetchFn);
        const ex = await client.createSession([{ id: "h1", p: 0.01 }], 0.05, "fisher");

        expect(fetchFn).toHaveBeenCalledTimes(1);
        const [url, init] = fetchFn.mock.calls[0] as unknown as [string, RequestInit];
        expect(url).toBe("http://example.test/sessions");
        expect(init.method).toBe("POST");
        expect(init.body).toBe('{"hypotheses":[{"id":"h1","p":0.01}],"alpha":0.05,"combiner":"fisher"}');

        expect(ex.status).toBe(201);
        expect(ex.raw).toBe(CREATE_BODY);
        const view = ex.data as SessionView;
        expect(view.n).toBe(3);
        expect(view.lattice_enabled).toBe(true);
        expect(view.report.u_max).toBe(1);
        expect(view.report.curve).toHaveLength(3);
    });

    it("records the request line it actually sent", async () => {
        const client = new ApiClient("http://example.test/", stubFetch(SELECTION_BODY, 200));
        const ex = await client.selection("abc", ["h1", "h2", "h3"]);
        expect(ex.request).toEqual({
            method: "POST",
            path: "/sessions/abc/selection",
            body: '{"ids":["h1","h2","h3"]}',
        });
        expect((ex.data as SelectionBound).f_alpha).toBe(1);
    });

    it("strips trailing slashes from the base url", async () => {
        const fetchFn = stubFetch(fixture("healthz.json"), 200);
        const client = new ApiClient("http://example.test///", fetchFn);
        await client.health();
        expect(fetchFn.mock.calls[0][0]).toBe("http://example.test/healthz");
    });

    it("resends a logged request body verbatim", async () => {
        const fetchFn = stubFetch(SELECTION_BODY, 200);
        const client = new ApiClient("http://example.test", fetchFn);
        const line = { method: "POST", path: "/sessions/abc/selection", body: '{"ids":["h1","h2","h3"]}' };
        await client.resend(line);
        const [, init] = fetchFn.mock.calls[0] as unknown as [string, RequestInit];
        expect(init.body).toBe(line.body);
    });

    it("turns the error envelope into a typed error", async () => {
        const client = new ApiClient("http://example.test", stubFetch(VALIDATION_BODY, 400));
        const err = await client.createSession([{ id: "a", p: 1.5 }], 0.05, "fisher").catch((e) => e);
        expect(err).toBeInstanceOf(ApiError);
        expect(err.status).toBe(400);
        expect(err.code).toBe("validation_error");
        expect(err.message).toContain("outside [0, 1]");
    });

    it("reports the lattice cap the way the service phrases it", async () => {
        const client = new ApiClient("http://example.test", stubFetch(LATTICE_BODY, 409));
        const err = await client.selection("abc", ["g01"]).catch((e) => e);
        expect(err).toBeInstanceOf(ApiError);
        expect(err.code).toBe("lattice_unavailable");
        expect(err.message).toContain("exceeds the cap of 20");
    });

    it("flags non-JSON bodies instead of guessing", async () => {
        const client = new ApiClient("http://example.test", stubFetch("<html>gateway</html>", 502));
        const err = await client.health().catch((e) => e);
        expect(err).toBeInstanceOf(ApiError);
        expect(err.code).toBe("bad_response");
    });
});
