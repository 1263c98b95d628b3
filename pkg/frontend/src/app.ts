/** Application wiring: session lifecycle, the send loop, sidebar mount. */

import { ApiClient, ApiError } from "./api.js";
import { errorBubble, pendingBubble, turnBubble, userBubble } from "./render.js";
import { mountSidebar } from "./sidebar.js";

const SESSION_KEY = "datadesk-session-id";

export interface AppHandles {
  client: ApiClient;
  sessionId: string;
  thread: HTMLElement;
  send(text: string): Promise<void>;
}

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

/** Reuse the stored session when the service still knows it; otherwise
 * create a fresh one transparently. Restores history on reuse. */
export async function ensureSession(
  client: ApiClient,
  storage: KeyValueStore,
): Promise<{ sessionId: string; restored: import("./api.js").TurnDoc[] }> {
  const stored = storage.getItem(SESSION_KEY);
  if (stored) {
    try {
      const restored = await client.history(stored);
      return { sessionId: stored, restored };
    } catch (error) {
      if (!(error instanceof ApiError && error.status === 404)) throw error;
      storage.removeItem(SESSION_KEY);
    }
  }
  const created = await client.createSession();
  storage.setItem(SESSION_KEY, created.session_id);
  return { sessionId: created.session_id, restored: [] };
}

export async function createApp(
  root: HTMLElement,
  client: ApiClient,
  storage: KeyValueStore = localStorage,
): Promise<AppHandles> {
  root.textContent = "";
  const layout = document.createElement("div");
  layout.className = "layout";
  const sidebar = document.createElement("aside");
  sidebar.className = "sidebar";
  const main = document.createElement("main");
  main.className = "chat";
  const thread = document.createElement("div");
  thread.className = "thread";
  const form = document.createElement("form");
  form.className = "composer";
  const input = document.createElement("input");
  input.type = "text";
  input.placeholder = "ask about the registered datasets...";
  const sendButton = document.createElement("button");
  sendButton.type = "submit";
  sendButton.textContent = "send";
  sendButton.disabled = true;
  form.appendChild(input);
  form.appendChild(sendButton);
  main.appendChild(thread);
  main.appendChild(form);
  layout.appendChild(sidebar);
  layout.appendChild(main);
  root.appendChild(layout);

  let sessionId: string;
  try {
    const session = await ensureSession(client, storage);
    sessionId = session.sessionId;
    for (const turn of session.restored) {
      thread.appendChild(userBubble(turn.query));
      thread.appendChild(await turnBubble(turn, client));
    }
  } catch (error) {
    const banner = document.createElement("div");
    banner.className = "banner error";
    banner.textContent = `service unreachable: ${String(error)}`;
    const retry = document.createElement("button");
    retry.textContent = "retry";
    retry.addEventListener("click", () => {
      void createApp(root, client, storage);
    });
    banner.appendChild(retry);
    root.appendChild(banner);
    throw error;
  }

  let inFlight = false;

  const refreshSendEnabled = () => {
    sendButton.disabled = inFlight || input.value.trim().length === 0;
  };
  input.addEventListener("input", refreshSendEnabled);

  async function send(text: string): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed || inFlight) return;
    inFlight = true;
    refreshSendEnabled();
    thread.appendChild(userBubble(trimmed));
    const pending = pendingBubble();
    thread.appendChild(pending);
    try {
      const turn = await client.sendMessage(sessionId, trimmed);
      pending.replaceWith(await turnBubble(turn, client));
    } catch (error) {
      pending.replaceWith(
        errorBubble(`send failed: ${String(error)}`, () => {
          void send(trimmed);
        }),
      );
    } finally {
      inFlight = false;
      refreshSendEnabled();
    }
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value;
    input.value = "";
    refreshSendEnabled();
    void send(text);
  });

  await mountSidebar(sidebar, client);

  return { client, sessionId, thread, send };
}

export function serviceBaseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const fromQuery = params.get("service");
  if (fromQuery) return fromQuery.replace(/\/$/, "");
  const meta = document.querySelector('meta[name="datadesk-service"]');
  const fromMeta = meta?.getAttribute("content");
  if (fromMeta) return fromMeta.replace(/\/$/, "");
  return "http://127.0.0.1:8040";
}

export async function bootstrap(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const client = new ApiClient(serviceBaseUrl());
  await createApp(root, client);
}
