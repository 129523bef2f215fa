import type { UiSessionState } from "./types.js";

/** Render the session state into the app container (single-item focus view). */
export function render(root: HTMLElement, state: UiSessionState): void {
  const offlineBanner = state.offline
    ? `<div class="banner offline">Connection lost — ${state.pendingVotes} vote(s) buffered, they will flush automatically.</div>`
    : "";
  const conflictBanner = state.conflicts.length
    ? `<div class="banner conflict">${state.conflicts.length} title(s) flagged for re-review.</div>`
    : "";

  if (state.phase === "loading") {
    root.innerHTML = `${offlineBanner}<main><p class="muted">Loading batch…</p></main>`;
    return;
  }
  if (state.phase === "error") {
    root.innerHTML = `<main><p class="error">${state.error ?? "Something went wrong."}</p></main>`;
    return;
  }
  if (state.phase === "complete" || state.phase === "syncing") {
    const rows = state.metricsHistory
      .map(
        (m) =>
          `<tr><td>${m.iteration}</td><td>${m.accuracy.toFixed(2)}</td>` +
          `<td>${m.precision.toFixed(2)}</td><td>${m.recall.toFixed(2)}</td>` +
          `<td>${m.f1.toFixed(2)}</td></tr>`,
      )
      .join("");
    const syncing =
      state.phase === "syncing"
        ? `<p class="muted">Flushing ${state.pendingVotes} buffered vote(s)…</p>`
        : "";
    root.innerHTML = `${offlineBanner}${conflictBanner}<main>
      <h1>Batch complete</h1>
      <p>${state.votesSubmitted} votes submitted in iteration ${state.iteration}.</p>
      ${syncing}
      <table class="metrics">
        <thead><tr><th>iter</th><th>acc</th><th>P</th><th>R</th><th>F1</th></tr></thead>
        <tbody>${rows}</tbody>
      </table>
    </main>`;
    return;
  }

  const done = state.votesSubmitted + state.pendingVotes;
  root.innerHTML = `${offlineBanner}${conflictBanner}<main>
    <div class="progress" role="progressbar">
      <span>${done} voted · ${state.queueDepth} to go · iteration ${state.iteration}</span>
    </div>
    <article class="title-card"><p>${escapeHtml(state.current?.text ?? "")}</p></article>
    <footer class="hints">
      <kbd>h</kbd> hyperpartisan · <kbd>n</kbd> not hyperpartisan · <kbd>s</kbd> skip
    </footer>
  </main>`;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
