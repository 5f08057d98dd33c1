/** Browser entry point: pick the service URL and boot the console. */

import { ServiceClient } from "./api.js";
import { App } from "./app.js";

export const serviceUrl = (search: string): string => {
  const params = new URLSearchParams(search);
  return params.get("api") ?? "http://127.0.0.1:8000";
};

/** Mount on #app when present; inert otherwise so imports stay side-effect free. */
export const boot = (): App | null => {
  const root = document.getElementById("app");
  if (root === null) return null;
  const app = new App(root, new ServiceClient(serviceUrl(location.search)));
  void app.start();
  return app;
};

if (typeof document !== "undefined") {
  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", () => void boot());
  } else {
    boot();
  }
}
