export interface KeyHandlers {
  onHyper: () => void;
  onNonHyper: () => void;
  onSkip: () => void;
  onSync?: () => void;
}

const BINDINGS: Record<string, keyof KeyHandlers> = {
  h: "onHyper",
  n: "onNonHyper",
  s: "onSkip",
  r: "onSync",
};

function isEditable(target: EventTarget | null): boolean {
  // duck-typed so it also works outside a DOM environment
  const el = target as { tagName?: string; isContentEditable?: boolean } | null;
  return (
    !!el &&
    (el.tagName === "INPUT" || el.tagName === "TEXTAREA" || !!el.isContentEditable)
  );
}

/** Map keydown events to session actions; returns a detach function. */
export function attachKeyboard(
  element: Pick<Window, "addEventListener" | "removeEventListener">,
  handlers: KeyHandlers,
): () => void {
  const listener = (event: Event) => {
    const key = (event as KeyboardEvent).key?.toLowerCase();
    if (!key || isEditable(event.target)) return;
    const action = BINDINGS[key];
    if (action && handlers[action]) {
      event.preventDefault();
      handlers[action]!();
    }
  };
  element.addEventListener("keydown", listener);
  return () => element.removeEventListener("keydown", listener);
}
