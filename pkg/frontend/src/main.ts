import { ApiClient, ApiError } from "./api.js";
import { SelectionState, parseHistoryDocument, replayHistory } from "./state.js";
import { UploadFormatError, parseUpload } from "./upload.js";
import {
    renderBound,
    renderHistoryPanel,
    renderInlineError,
    renderReplayOutcomes,
    renderRetryNote,
    renderSelectionPanel,
    renderSessionView,
} from "./view.js";

class Workbench {
    private serverUrl: HTMLInputElement;
    private healthButton: HTMLButtonElement;
    private healthStatus: HTMLElement;
    private uploadText: HTMLTextAreaElement;
    private uploadFile: HTMLInputElement;
    private alphaInput: HTMLInputElement;
    private combinerSelect: HTMLSelectElement;
    private openButton: HTMLButtonElement;
    private uploadError: HTMLElement;
    private sessionView: HTMLElement;
    private selectionPanel: HTMLElement;
    private boundView: HTMLElement;
    private historyPanel: HTMLElement;
    private replayFile: HTMLInputElement;
    private replayButton: HTMLButtonElement;
    private replayView: HTMLElement;

    private client: ApiClient | null = null;
    private state: SelectionState | null = null;
    private uploadName = "pasted.csv";

    constructor() {
        this.serverUrl = document.getElementById("server-url") as HTMLInputElement;
        this.healthButton = document.getElementById("check-health") as HTMLButtonElement;
        this.healthStatus = document.getElementById("health-status") as HTMLElement;
        this.uploadText = document.getElementById("upload-text") as HTMLTextAreaElement;
        this.uploadFile = document.getElementById("upload-file") as HTMLInputElement;
        this.alphaInput = document.getElementById("alpha") as HTMLInputElement;
        this.combinerSelect = document.getElementById("combiner") as HTMLSelectElement;
        this.openButton = document.getElementById("open-session") as HTMLButtonElement;
        this.uploadError = document.getElementById("upload-error") as HTMLElement;
        this.sessionView = document.getElementById("session-view") as HTMLElement;
        this.selectionPanel = document.getElementById("selection-panel") as HTMLElement;
        this.boundView = document.getElementById("bound-view") as HTMLElement;
        this.historyPanel = document.getElementById("history-panel") as HTMLElement;
        this.replayFile = document.getElementById("replay-file") as HTMLInputElement;
        this.replayButton = document.getElementById("replay-history") as HTMLButtonElement;
        this.replayView = document.getElementById("replay-view") as HTMLElement;

        this.healthButton.addEventListener("click", this.checkHealth.bind(this));
        this.openButton.addEventListener("click", this.openSession.bind(this));
        this.uploadFile.addEventListener("change", this.fileChosen.bind(this));
        this.selectionPanel.addEventListener("change", this.selectionChanged.bind(this));
        this.selectionPanel.addEventListener("click", this.selectionClicked.bind(this));
        this.boundView.addEventListener("click", this.boundClicked.bind(this));
        this.historyPanel.addEventListener("click", this.historyClicked.bind(this));
        this.replayButton.addEventListener("click", this.replay.bind(this));
    }

    private async checkHealth(): Promise<void> {
        const client = new ApiClient(this.serverUrl.value);
        try {
            const ex = await client.health();
            this.healthStatus.textContent = `ok, ${ex.data.sessions} session(s) held`;
        } catch (err) {
            this.healthStatus.textContent = `unreachable: ${err instanceof Error ? err.message : err}`;
        }
    }

    private async fileChosen(): Promise<void> {
        const file = this.uploadFile.files?.[0];
        if (file) {
            this.uploadName = file.name;
            this.uploadText.value = await file.text();
        }
    }

    private async openSession(): Promise<void> {
        this.uploadError.innerHTML = "";
        this.replayView.innerHTML = "";
        let records;
        try {
            records = parseUpload(this.uploadName, this.uploadText.value);
        } catch (err) {
            // structural problems stop here; no session is created
            const msg = err instanceof UploadFormatError ? err.message : String(err);
            this.uploadError.innerHTML = renderInlineError(msg);
            return;
        }
        const alpha = Number(this.alphaInput.value);
        const client = new ApiClient(this.serverUrl.value);
        try {
            const ex = await client.createSession(records, alpha, this.combinerSelect.value);
            this.client = client;
            this.state = new SelectionState(
                ex.data,
                records.map((r) => r.id),
                client.base,
            );
            this.renderAll();
        } catch (err) {
            const msg = err instanceof ApiError ? err.message : `service unreachable: ${err}`;
            this.uploadError.innerHTML = renderInlineError(msg);
        }
    }

    private selectionChanged(event: Event): void {
        const target = event.target as HTMLInputElement;
        const id = target.dataset.id;
        if (id !== undefined) {
            void this.toggle(id);
        }
    }

    private selectionClicked(event: Event): void {
        const target = event.target as HTMLElement;
        if (target.id === "select-all" && this.state) {
            void this.querySelection(this.state.allIds());
        } else if (target.id === "select-none" && this.state) {
            this.state.clearSelection();
            this.renderAll();
        }
    }

    private boundClicked(event: Event): void {
        const target = event.target as HTMLElement;
        if (target.id === "retry-query") {
            const ids = (target.dataset.ids ?? "").split(",").filter((s) => s !== "");
            void this.querySelection(ids);
        }
    }

    private historyClicked(event: Event): void {
        const target = event.target as HTMLElement;
        if (target.id === "export-history" && this.state && this.state.queryCount > 0) {
            this.download(
                `history-${this.state.session.session_id}.json`,
                this.state.exportHistory(),
            );
        }
    }

    private async toggle(id: string): Promise<void> {
        if (!this.state) {
            return;
        }
        const ids = this.state.nextSet(id);
        if (ids.length === 0) {
            this.state.clearSelection();
            this.renderAll();
            return;
        }
        await this.querySelection(ids);
    }

    private async querySelection(ids: string[]): Promise<void> {
        if (!this.state || !this.client) {
            return;
        }
        try {
            const ex = await this.client.selection(this.state.session.session_id, ids);
            this.state.applyQuery(ids, ex);
            this.renderAll();
        } catch (err) {
            // prior state stays on screen, only the bound panel shows the failure
            const msg = err instanceof Error ? err.message : String(err);
            this.renderAll();
            this.boundView.innerHTML = renderRetryNote(ids, msg);
        }
    }

    private async replay(): Promise<void> {
        const file = this.replayFile.files?.[0];
        if (!file) {
            this.replayView.innerHTML = renderInlineError("choose an exported history file first");
            return;
        }
        try {
            const doc = parseHistoryDocument(await file.text());
            const client = new ApiClient(this.serverUrl.value);
            const outcomes = await replayHistory(client, doc);
            this.replayView.innerHTML = renderReplayOutcomes(outcomes);
        } catch (err) {
            this.replayView.innerHTML = renderInlineError(err instanceof Error ? err.message : String(err));
        }
    }

    private download(name: string, text: string): void {
        const blob = new Blob([text], { type: "application/json" });
        const link = document.createElement("a");
        link.href = URL.createObjectURL(blob);
        link.download = name;
        link.click();
        URL.revokeObjectURL(link.href);
    }

    private renderAll(): void {
        if (!this.state) {
            return;
        }
        const s = this.state;
        this.sessionView.innerHTML = renderSessionView(s.session);
        this.selectionPanel.innerHTML = renderSelectionPanel(
            s.allIds(),
            s.selectedIds,
            s.session.lattice_enabled,
        );
        this.boundView.innerHTML = renderBound(s.session, s.lastBound);
        this.historyPanel.innerHTML = renderHistoryPanel(s.history, s.queryCount > 0);
    }
}

if (typeof document !== "undefined") {
    window.addEventListener("DOMContentLoaded", () => {
        if (document.getElementById("workbench-root")) {
            new Workbench();
        }
    });
}
