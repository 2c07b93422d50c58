/** Typed client for the scoring service's queue API. */

export type ItemStatus = "pending" | "confirmed" | "rejected";
export type Decision = "confirmed" | "rejected";

export interface FeatureContribution {
  trigram: string;
  contribution: number;
}

export interface QueueItem {
  item_id: string;
  text: string;
  score: number;
  label: string;
  received_at: string;
  status: ItemStatus;
  reviewer: string | null;
  reviewed_at: string | null;
}

export interface QueueItemDetail extends QueueItem {
  normalized_text: string;
  top_features: FeatureContribution[];
}

export interface QueuePage {
  items: QueueItem[];
  page: number;
  page_size: number;
  total: number;
  counts: Record<ItemStatus, number>;
}

export interface QueueQuery {
  status?: ItemStatus | "";
  minScore?: number | null;
  page?: number;
  pageSize?: number;
}

/** Non-2xx response; status lets callers branch on 409 conflicts. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let detail = resp.statusText;
  try {
    const body = (await resp.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(resp.status, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly authToken: string | null = null,
  ) {}

  private headers(json: boolean): HeadersInit {
    const headers: Record<string, string> = {};
    if (json) headers["Content-Type"] = "application/json";
    if (this.authToken) headers["X-Auth-Token"] = this.authToken;
    return headers;
  }

  private async get<T>(path: string): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      headers: this.headers(false),
    });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  async fetchQueue(query: QueueQuery = {}): Promise<QueuePage> {
    const params = new URLSearchParams();
    if (query.status) params.set("status", query.status);
    if (query.minScore !== undefined && query.minScore !== null) {
      params.set("min_score", String(query.minScore));
    }
    params.set("page", String(query.page ?? 1));
    params.set("page_size", String(query.pageSize ?? 50));
    return this.get<QueuePage>(`/queue?${params.toString()}`);
  }

  async fetchItem(itemId: string): Promise<QueueItemDetail> {
    return this.get<QueueItemDetail>(`/queue/${encodeURIComponent(itemId)}`);
  }

  async review(
    itemId: string,
    decision: Decision,
    reviewer: string,
  ): Promise<QueueItem> {
    const resp = await fetch(
      `${this.baseUrl}/queue/${encodeURIComponent(itemId)}/review`,
      {
        method: "POST",
        headers: this.headers(true),
        body: JSON.stringify({ decision, reviewer }),
      },
    );
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as QueueItem;
  }

  /** Reviewed items as corpus-format CSV text. */
  async fetchExport(): Promise<string> {
    const resp = await fetch(`${this.baseUrl}/export`, {
      headers: this.headers(false),
    });
    if (!resp.ok) throw await parseError(resp);
    return resp.text();
  }
}
