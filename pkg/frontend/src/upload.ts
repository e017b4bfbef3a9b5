/*
 * Structural parsing of uploaded files into hypothesis records. Only the
 * shape is checked here (header, field counts, numbers that parse); range
 * rules, duplicate ids and the rest stay on the service side so the page
 * never disagrees with it.
 */

import type { HypothesisRecord } from "./api.js";

export class UploadFormatError extends Error {
    readonly line: number | null;

    constructor(message: string, line: number | null = null) {
        super(line === null ? message : `line ${line}: ${message}`);
        this.name = "UploadFormatError";
        this.line = line;
    }
}

const HEADERS: ReadonlyArray<ReadonlyArray<string>> = [
    ["id", "p"],
    ["id", "p", "family"],
];

function splitRow(row: string): string[] {
    // plain comma split; ids in these files are simple tokens
    return row.split(",").map((f) => f.trim());
}

export function parseCsv(text: string): HypothesisRecord[] {
    const lines = text.split(/\r\n|\r|\n/);
    let header: string[] | null = null;
    const records: HypothesisRecord[] = [];
    for (let i = 0; i < lines.length; i++) {
        const stripped = lines[i].trim();
        if (stripped === "" || stripped.startsWith("#")) {
            continue;
        }
        const fields = splitRow(stripped);
        if (header === null) {
            const lowered = fields.map((f) => f.toLowerCase());
            if (!HEADERS.some((h) => h.length === lowered.length && h.every((c, j) => c === lowered[j]))) {
                throw new UploadFormatError(`expected header "id,p" or "id,p,family", got "${stripped}"`, i + 1);
            }
            header = lowered;
            continue;
        }
        if (fields.length !== header.length) {
            throw new UploadFormatError(`expected ${header.length} fields, got ${fields.length}`, i + 1);
        }
        const p = Number(fields[1]);
        if (fields[1] === "" || Number.isNaN(p)) {
            throw new UploadFormatError(`p-value "${fields[1]}" is not a number`, i + 1);
        }
        const record: HypothesisRecord = { id: fields[0], p };
        if (header.length === 3 && fields[2] !== "") {
            record.family = fields[2];
        }
        records.push(record);
    }
    if (header === null) {
        throw new UploadFormatError("no header row found");
    }
    if (records.length === 0) {
        throw new UploadFormatError("no data rows found");
    }
    return records;
}

export function parseJsonUpload(text: string): HypothesisRecord[] {
    let parsed: unknown;
    try {
        parsed = JSON.parse(text);
    } catch {
        throw new UploadFormatError("file is not valid JSON");
    }
    if (!Array.isArray(parsed)) {
        throw new UploadFormatError("expected a JSON array of {id, p} objects");
    }
    if (parsed.length === 0) {
        throw new UploadFormatError("no data rows found");
    }
    // entries go to the service as-is; it owns the per-entry rules
    return parsed as HypothesisRecord[];
}

export function parseUpload(name: string, text: string): HypothesisRecord[] {
    return name.toLowerCase().endsWith(".json") ? parseJsonUpload(text) : parseCsv(text);
}
