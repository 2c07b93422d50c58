import { ApiClient } from "./api.js";
import { DashboardStore } from "./store.js";
import { render } from "./render.js";

// ?api=<base url> targets a remote service (default: same origin);
// ?poll=<ms> tunes the auto-refresh interval; ?token=<secret> adds auth.
const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "", params.get("token"));
const poll = Number(params.get("poll") ?? "5000");
const store = new DashboardStore(api, Number.isFinite(poll) ? poll : 5000);

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

store.subscribe((state) => render(root, state, store));
void store.refresh();
store.startPolling();
