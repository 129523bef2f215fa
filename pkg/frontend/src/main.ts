import { AnnotationApi } from "./api.js";
import { attachKeyboard } from "./keyboard.js";
import { LabelSession } from "./session.js";
import type { Settings } from "./types.js";
import { render } from "./ui.js";

async function loadSettings(): Promise<Settings> {
  const response = await fetch("settings.json");
  if (!response.ok) {
    throw new Error("settings.json not found next to the app");
  }
  return (await response.json()) as Settings;
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");

  const settings = await loadSettings();
  const api = new AnnotationApi(settings.serviceUrl, settings.token);
  const session = new LabelSession(api);

  session.onChange((state) => render(root, state));
  attachKeyboard(window, {
    onHyper: () => void session.vote("H"),
    onNonHyper: () => void session.vote("N"),
    onSkip: () => session.skip(),
    onSync: () => void session.sync(),
  });
  window.addEventListener("online", () => void session.sync());
  // background flush keeps buffered votes draining after reconnects
  setInterval(() => void session.sync(), 5000);

  await session.start();
}

boot().catch((err) => {
  const root = document.getElementById("app");
  if (root) {
    root.innerHTML = `<main><p class="error">${(err as Error).message}</p></main>`;
  }
});
