/** Dashboard state machine.
 *
 * Holds no authoritative data: every refresh replaces local state with
 * the server's answer, and the only write path is the review endpoint.
 * Reviews apply optimistically and reconcile with the response; a 409
 * conflict rolls the item back and re-fetches the authoritative state.
 */

import {
  ApiClient,
  ApiError,
  Decision,
  ItemStatus,
  QueueItem,
  QueueItemDetail,
  QueuePage,
} from "./api.js";

export interface Notice {
  kind: "conflict" | "error" | "info";
  message: string;
}

export interface Filters {
  status: ItemStatus | "";
  minScore: number | null;
}

export interface DashboardState {
  items: QueueItem[]; // server order: score descending
  counts: Record<ItemStatus, number>;
  page: number;
  pageSize: number;
  total: number;
  filters: Filters;
  selected: QueueItemDetail | null;
  /** Non-null while the service is unreachable; rendered as a banner. */
  connectionError: string | null;
  notices: Notice[];
  reviewer: string;
}

type Listener = (state: DashboardState) => void;

const EMPTY_COUNTS: Record<ItemStatus, number> = {
  pending: 0,
  confirmed: 0,
  rejected: 0,
};

export class DashboardStore {
  readonly state: DashboardState = {
    items: [],
    counts: { ...EMPTY_COUNTS },
    page: 1,
    pageSize: 50,
    total: 0,
    filters: { status: "pending", minScore: null },
    selected: null,
    connectionError: null,
    notices: [],
    reviewer: "",
  };

  private listeners: Listener[] = [];
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly api: ApiClient,
    readonly pollIntervalMs: number = 5000,
  ) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private pushNotice(notice: Notice): void {
    this.state.notices = [...this.state.notices, notice];
    this.emit();
  }

  dismissNotices(): void {
    this.state.notices = [];
    this.emit();
  }

  get pendingCount(): number {
    return this.state.counts.pending;
  }

  setReviewer(name: string): void {
    this.state.reviewer = name;
    this.emit();
  }

  setFilters(filters: Partial<Filters>): Promise<void> {
    this.state.filters = { ...this.state.filters, ...filters };
    this.state.page = 1;
    return this.refresh();
  }

  setPage(page: number): Promise<void> {
    this.state.page = Math.max(1, page);
    return this.refresh();
  }

  /** Pull the current queue page; a failure raises the banner but keeps
   * the last good items on screen. */
  async refresh(): Promise<void> {
    let page: QueuePage;
    try {
      page = await this.api.fetchQueue({
        status: this.state.filters.status,
        minScore: this.state.filters.minScore,
        page: this.state.page,
        pageSize: this.state.pageSize,
      });
    } catch (err) {
      this.state.connectionError =
        err instanceof Error ? err.message : String(err);
      this.emit();
      return;
    }
    this.state.connectionError = null;
    this.state.items = page.items;
    this.state.counts = page.counts;
    this.state.total = page.total;
    this.state.page = page.page;
    this.state.pageSize = page.page_size;
    this.emit();
  }

  startPolling(): void {
    if (this.pollTimer !== null) return;
    this.pollTimer = setInterval(() => {
      void this.refresh();
    }, this.pollIntervalMs);
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  async select(itemId: string | null): Promise<void> {
    if (itemId === null) {
      this.state.selected = null;
      this.emit();
      return;
    }
    try {
      this.state.selected = await this.api.fetchItem(itemId);
      this.state.connectionError = null;
    } catch (err) {
      this.state.connectionError =
        err instanceof Error ? err.message : String(err);
    }
    this.emit();
  }

  private applyItem(item: QueueItem): void {
    const visible =
      (!this.state.filters.status ||
        item.status === this.state.filters.status) &&
      (this.state.filters.minScore === null ||
        item.score >= this.state.filters.minScore);
    const rest = this.state.items.filter((i) => i.item_id !== item.item_id);
    if (visible) {
      rest.push(item);
      rest.sort(
        (a, b) => b.score - a.score || a.item_id.localeCompare(b.item_id),
      );
    }
    this.state.items = rest;
    if (this.state.selected && this.state.selected.item_id === item.item_id) {
      this.state.selected = { ...this.state.selected, ...item };
    }
  }

  /** Optimistic review: the UI moves immediately, the server response
   * (or its conflict) decides what sticks. */
  async review(itemId: string, decision: Decision): Promise<void> {
    const previous = this.state.items.find((i) => i.item_id === itemId);
    if (previous && previous.status !== "pending") {
      this.pushNotice({
        kind: "info",
        message: `item ${itemId} is already ${previous.status}`,
      });
      return;
    }
    const reviewer = this.state.reviewer || "dashboard";
    if (previous) {
      this.applyItem({ ...previous, status: decision, reviewer });
      this.emit();
    }
    try {
      const confirmed = await this.api.review(itemId, decision, reviewer);
      this.applyItem(confirmed);
      await this.refresh(); // counts and ordering come from the server
    } catch (err) {
      if (previous) {
        this.applyItem(previous); // roll the optimistic change back
        this.emit();
      }
      if (err instanceof ApiError && err.status === 409) {
        // someone else reviewed it first: show the authoritative state
        try {
          const authoritative = await this.api.fetchItem(itemId);
          this.applyItem(authoritative);
        } catch {
          // fall through; the refresh below will reconcile
        }
        this.pushNotice({
          kind: "conflict",
          message: `item ${itemId} was already reviewed: ${err.message}`,
        });
        await this.refresh();
      } else {
        this.pushNotice({
          kind: "error",
          message:
            `review of ${itemId} failed (${String(
              err instanceof Error ? err.message : err,
            )}); the item is still pending, retry when the service is back`,
        });
      }
    }
  }

  async exportCsv(): Promise<string> {
    return this.api.fetchExport();
  }
}
