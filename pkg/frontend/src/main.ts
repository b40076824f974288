// Page entry point: read the service URL, restore any permalinked evidence,
// and keep the address bar in sync as the selection changes.

import { ServiceClient } from "./api.js";
import { Explorer } from "./explorer.js";

function serviceUrl(): string {
  const meta = document.querySelector('meta[name="service-url"]');
  const fromMeta = meta?.getAttribute("content");
  if (fromMeta) return fromMeta.replace(/\/$/, "");
  return "http://127.0.0.1:8000";
}

function boot(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const params = new URLSearchParams(window.location.search);
  const explorer = new Explorer(root, new ServiceClient(serviceUrl()), {
    initialSelection: params.get("ev") ?? "",
    onSelectionChange: (encoded) => {
      const next = new URLSearchParams(window.location.search);
      if (encoded) {
        next.set("ev", encoded);
      } else {
        next.delete("ev");
      }
      const suffix = next.toString();
      window.history.replaceState(
        null,
        "",
        suffix ? `?${suffix}` : window.location.pathname,
      );
    },
  });
  void explorer.start();
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", boot);
} else {
  boot();
}
