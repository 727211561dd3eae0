/** Session store: holds the latest service responses and drives the
 * create / recommend / decide / refresh cycle. Every number shown by the UI
 * comes from these server payloads; nothing is recomputed client-side. */

import {
  ApiError,
  CohesionEntry,
  CurationApi,
  DecisionAction,
  ExportDecision,
  ExportMember,
  RecommendationItem,
  SessionSummary,
} from "./api.js";

export type Connection = "ok" | "unreachable" | "stale";

export interface ConsoleState {
  summary: SessionSummary | null;
  items: RecommendationItem[];
  members: ExportMember[];
  decisions: ExportDecision[];
  cohesion: CohesionEntry[];
  connection: Connection;
  busy: boolean;
  truncated: boolean;
  degenerate: boolean;
  notice: string | null;
  k: number;
}

const INITIAL: ConsoleState = {
  summary: null,
  items: [],
  members: [],
  decisions: [],
  cohesion: [],
  connection: "ok",
  busy: false,
  truncated: false,
  degenerate: false,
  notice: null,
  k: 10,
};

export class SessionStore {
  state: ConsoleState = { ...INITIAL };

  constructor(
    private readonly api: CurationApi,
    private readonly onChange: (state: ConsoleState) => void = () => {},
    k = 10,
  ) {
    this.state.k = k;
  }

  private emit(partial: Partial<ConsoleState>): void {
    this.state = { ...this.state, ...partial };
    this.onChange(this.state);
  }

  /** Create a fresh session on the given dataset and load everything. */
  async start(datasetId: string, criteria?: string[]): Promise<void> {
    this.emit({ busy: true, notice: null });
    try {
      const summary = await this.api.createSession(datasetId, criteria);
      this.emit({ summary, connection: "ok" });
      await this.refresh();
    } catch (error) {
      this.handleError(error);
    } finally {
      this.emit({ busy: false });
    }
  }

  /** Attach to an existing session (e.g. after a page reload). */
  async attach(sessionId: string): Promise<void> {
    this.emit({ busy: true, notice: null });
    try {
      const summary = await this.api.getSession(sessionId);
      this.emit({ summary, connection: "ok" });
      await this.refresh();
    } catch (error) {
      this.handleError(error);
    } finally {
      this.emit({ busy: false });
    }
  }

  /** Re-pull recommendations, the member list, history, and cohesion. */
  async refresh(): Promise<void> {
    const summary = this.state.summary;
    if (!summary) return;
    try {
      const [recommendations, exported, cohesion] = await Promise.all([
        this.api.recommendations(summary.session_id, this.state.k),
        this.api.exportList(summary.session_id),
        this.api.cohesion(summary.session_id),
      ]);
      // the service already excludes members and rejected users; the filter
      // enforces the "never both candidate and member" invariant regardless
      const memberIds = new Set(exported.members.map((m) => m.user_id));
      this.emit({
        items: recommendations.items.filter((item) => !memberIds.has(item.user_id)),
        truncated: recommendations.truncated,
        degenerate: recommendations.degenerate,
        members: exported.members,
        decisions: exported.decisions,
        cohesion: cohesion.entries,
        connection: "ok",
      });
    } catch (error) {
      this.handleError(error);
    }
  }

  /** Post one accept/reject decision, then refresh the whole view. */
  async decide(userId: string, action: DecisionAction): Promise<void> {
    const summary = this.state.summary;
    if (!summary || this.state.busy) return;
    this.emit({ busy: true, notice: null });
    try {
      const updated = await this.api.decide(summary.session_id, userId, action);
      this.emit({ summary: updated, connection: "ok" });
      await this.refresh();
    } catch (error) {
      if (error instanceof ApiError && error.code === "already_decided") {
        // conflicting decision from elsewhere: surface it and resync
        this.emit({ notice: error.message });
        await this.refresh();
      } else {
        this.handleError(error);
      }
    } finally {
      this.emit({ busy: false });
    }
  }

  candidateIds(): string[] {
    return this.state.items.map((item) => item.user_id);
  }

  memberIds(): string[] {
    return this.state.members.map((m) => m.user_id);
  }

  private handleError(error: unknown): void {
    if (error instanceof ApiError) {
      if (error.status === 0) {
        this.emit({ connection: "unreachable" });
        return;
      }
      if (error.status === 404 && error.code === "unknown_session") {
        this.emit({ connection: "stale" });
        return;
      }
      this.emit({ notice: `${error.code}: ${error.message}` });
      return;
    }
    throw error;
  }
}
