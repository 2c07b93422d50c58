/** DOM rendering. Text containers use dir="auto" so Arabic content lays
 * out right-to-left without any client-side language guessing. */

import { QueueItem, QueueItemDetail } from "./api.js";
import { DashboardState, DashboardStore } from "./store.js";
import { segmentText } from "./highlight.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderBanner(state: DashboardState, store: DashboardStore): HTMLElement {
  const banner = el("div", "banner error");
  banner.append(
    el("span", "", `service unreachable: ${state.connectionError}`),
  );
  const retry = el("button", "", "retry");
  retry.addEventListener("click", () => void store.refresh());
  banner.append(retry);
  return banner;
}

function renderNotices(state: DashboardState, store: DashboardStore): HTMLElement {
  const box = el("div", "notices");
  for (const notice of state.notices) {
    box.append(el("div", `notice ${notice.kind}`, notice.message));
  }
  if (state.notices.length) {
    const clear = el("button", "", "dismiss");
    clear.addEventListener("click", () => store.dismissNotices());
    box.append(clear);
  }
  return box;
}

function renderToolbar(state: DashboardState, store: DashboardStore): HTMLElement {
  const bar = el("div", "toolbar");

  const badge = el("span", "badge", `pending: ${state.counts.pending}`);
  bar.append(badge);

  const statusSelect = el("select");
  for (const value of ["pending", "confirmed", "rejected", ""]) {
    const option = el("option", "", value || "all");
    option.value = value;
    if (state.filters.status === value) option.selected = true;
    statusSelect.append(option);
  }
  statusSelect.addEventListener("change", () => {
    void store.setFilters({
      status: statusSelect.value as DashboardState["filters"]["status"],
    });
  });
  bar.append(statusSelect);

  const minScore = el("input");
  minScore.type = "number";
  minScore.step = "0.1";
  minScore.placeholder = "min score";
  if (state.filters.minScore !== null) minScore.value = String(state.filters.minScore);
  minScore.addEventListener("change", () => {
    const value = minScore.value === "" ? null : Number(minScore.value);
    void store.setFilters({ minScore: Number.isNaN(value as number) ? null : value });
  });
  bar.append(minScore);

  const reviewer = el("input");
  reviewer.type = "text";
  reviewer.placeholder = "reviewer name";
  reviewer.value = state.reviewer;
  reviewer.addEventListener("change", () => store.setReviewer(reviewer.value));
  bar.append(reviewer);

  const refresh = el("button", "", "refresh");
  refresh.addEventListener("click", () => void store.refresh());
  bar.append(refresh);

  const exportBtn = el("button", "", "export training data");
  exportBtn.addEventListener("click", () => {
    void store.exportCsv().then((csv) => downloadCsv(csv));
  });
  bar.append(exportBtn);

  return bar;
}

function downloadCsv(csv: string): void {
  const blob = new Blob([csv], { type: "text/csv" });
  const url = URL.createObjectURL(blob);
  const link = document.createElement("a");
  link.href = url;
  link.download = "training-data.csv";
  link.click();
  URL.revokeObjectURL(url);
}

function renderItemRow(
  item: QueueItem,
  state: DashboardState,
  store: DashboardStore,
): HTMLElement {
  const row = el("div", `item status-${item.status}`);
  if (state.selected?.item_id === item.item_id) row.classList.add("selected");
  const head = el("div", "item-head");
  head.append(el("span", "score", item.score.toFixed(3)));
  head.append(el("span", "label", item.label));
  head.append(el("span", "status", item.status));
  row.append(head);
  const text = el("div", "item-text", item.text);
  text.setAttribute("dir", "auto");
  row.append(text);
  row.addEventListener("click", () => void store.select(item.item_id));
  return row;
}

function renderDetail(
  detail: QueueItemDetail,
  store: DashboardStore,
): HTMLElement {
  const panel = el("div", "detail");
  panel.append(el("h2", "", `item ${detail.item_id}`));
  panel.append(
    el(
      "div",
      "meta",
      `score ${detail.score.toFixed(4)} | ${detail.label} | ${detail.status}` +
        (detail.reviewer ? ` by ${detail.reviewer}` : ""),
    ),
  );

  const text = el("div", "detail-text");
  text.setAttribute("dir", "auto");
  const needles = detail.top_features.map((f) => f.trigram);
  for (const segment of segmentText(detail.normalized_text, needles)) {
    if (segment.highlighted) {
      text.append(el("mark", "", segment.text));
    } else {
      text.append(document.createTextNode(segment.text));
    }
  }
  panel.append(text);

  const features = el("table", "features");
  for (const f of detail.top_features) {
    const tr = el("tr");
    tr.append(el("td", "", f.trigram));
    tr.append(el("td", "", f.contribution.toFixed(5)));
    features.append(tr);
  }
  panel.append(features);

  if (detail.status === "pending") {
    const actions = el("div", "actions");
    const confirm = el("button", "confirm", "confirm (HATE)");
    confirm.addEventListener("click", () =>
      void store.review(detail.item_id, "confirmed"),
    );
    const reject = el("button", "reject", "reject (SAFE)");
    reject.addEventListener("click", () =>
      void store.review(detail.item_id, "rejected"),
    );
    actions.append(confirm, reject);
    panel.append(actions);
  }
  return panel;
}

export function render(
  root: HTMLElement,
  state: DashboardState,
  store: DashboardStore,
): void {
  root.replaceChildren();
  if (state.connectionError !== null) {
    root.append(renderBanner(state, store));
  }
  root.append(renderNotices(state, store));
  root.append(renderToolbar(state, store));

  const main = el("div", "columns");
  const list = el("div", "queue");
  if (state.items.length === 0) {
    list.append(
      el(
        "div",
        "empty",
        state.filters.status === "pending"
          ? "no pending items"
          : "no items match the filter",
      ),
    );
  }
  for (const item of state.items) {
    list.append(renderItemRow(item, state, store));
  }
  const pager = el("div", "pager");
  const prev = el("button", "", "newer");
  prev.disabled = state.page <= 1;
  prev.addEventListener("click", () => void store.setPage(state.page - 1));
  const next = el("button", "", "older");
  next.disabled = state.page * state.pageSize >= state.total;
  next.addEventListener("click", () => void store.setPage(state.page + 1));
  pager.append(prev, el("span", "", `page ${state.page}`), next);
  list.append(pager);
  main.append(list);

  if (state.selected) {
    main.append(renderDetail(state.selected, store));
  }
  root.append(main);
}
