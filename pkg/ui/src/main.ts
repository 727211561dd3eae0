/** Console bootstrap: wires the store to the DOM with event delegation.
 * Configuration via query string: ?api=<base>&dataset=<id>&session=<id>&k=<n>. */

import { CurationApi } from "./api.js";
import { renderApp } from "./render.js";
import { SessionStore } from "./state.js";

function config() {
  const params = new URLSearchParams(window.location.search);
  return {
    api: params.get("api") ?? "",
    dataset: params.get("dataset"),
    session: params.get("session"),
    k: Number(params.get("k") ?? "10"),
    token: params.get("token") ?? undefined,
  };
}

export async function boot(root: HTMLElement): Promise<SessionStore> {
  const cfg = config();
  const api = new CurationApi(cfg.api, { token: cfg.token });
  const store = new SessionStore(api, (state) => {
    root.innerHTML = renderApp(state);
  }, cfg.k);

  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-action]");
    if (!(target instanceof HTMLElement)) return;
    const action = target.dataset.action;
    const userId = target.dataset.userId;
    if (action === "accept" && userId) void store.decide(userId, "accept");
    if (action === "reject" && userId) void store.decide(userId, "reject");
    if (action === "retry") void store.refresh();
    if (action === "reload") window.location.reload();
    if (action === "export" && store.state.summary) {
      void api.exportList(store.state.summary.session_id).then((doc) => {
        const blob = new Blob([JSON.stringify(doc, null, 2)], { type: "application/json" });
        const link = document.createElement("a");
        link.href = URL.createObjectURL(blob);
        link.download = `${doc.dataset_id}-${doc.session_id}.json`;
        link.click();
        URL.revokeObjectURL(link.href);
      });
    }
  });

  if (cfg.session) {
    await store.attach(cfg.session);
  } else if (cfg.dataset) {
    await store.start(cfg.dataset);
  } else {
    const { datasets } = await api.listDatasets();
    const first = datasets[0];
    if (first) await store.start(first.dataset_id);
  }
  return store;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot(document.getElementById("app") as HTMLElement);
}
