/** UI behavior against a recorded-transcript mock server: no engine needed. */

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { createApp, ensureSession } from "../src/app.js";
import { sanitizeSvg } from "../src/sanitize.js";
import { Recording, mockFetch } from "./mock-server.js";

const recording: Recording = JSON.parse(
  readFileSync(join(process.cwd(), "tests", "fixtures", "recorded-q1.json"), "utf-8"),
);

class MemoryStorage {
  private data = new Map<string, string>();
  getItem(key: string): string | null {
    return this.data.has(key) ? this.data.get(key)! : null;
  }
  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }
  removeItem(key: string): void {
    this.data.delete(key);
  }
}

function client(): ApiClient {
  return new ApiClient("http://mock.test", mockFetch(recording));
}

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
});

describe("session lifecycle", () => {
  it("creates one session on a fresh load and stores its id", async () => {
    const storage = new MemoryStorage();
    const app = await createApp(document.getElementById("app")!, client(), storage);
    expect(app.sessionId).toBe("recorded-session");
    expect(storage.getItem("datadesk-session-id")).toBe("recorded-session");
  });

  it("reuses a stored session and restores history", async () => {
    const storage = new MemoryStorage();
    const api = client();
    const first = await createApp(document.getElementById("app")!, api, storage);
    await first.send(recording.query);
    document.body.innerHTML = '<div id="app"></div>';
    const second = await createApp(document.getElementById("app")!, api, storage);
    expect(second.sessionId).toBe("recorded-session");
    expect(second.thread.querySelectorAll(".bubble.user").length).toBe(1);
  });

  it("transparently re-creates a session when the stored id is stale", async () => {
    const storage = new MemoryStorage();
    storage.setItem("datadesk-session-id", "stale-id");
    const { sessionId, restored } = await ensureSession(client(), storage);
    expect(sessionId).toBe("recorded-session");
    expect(restored).toEqual([]);
  });
});

describe("Q1 turn rendering", () => {
  it("renders the explanation and inlines the SVG with the peak month text node", async () => {
    const app = await createApp(document.getElementById("app")!, client(), new MemoryStorage());
    await app.send(recording.query);

    const bubble = app.thread.querySelector(".bubble.response:not(.pending)");
    expect(bubble, "response bubble").toBeTruthy();
    expect(bubble!.textContent).toContain(recording.peak_month);

    const svg = bubble!.querySelector("figure.artifact svg");
    expect(svg, "inline svg").toBeTruthy();
    const textNodes = Array.from(svg!.querySelectorAll("text"), (n) => n.textContent ?? "");
    expect(textNodes.some((t) => t.includes(recording.peak_month))).toBe(true);
  });

  it("renders result tables as collapsible grids with server-sent numbers only", async () => {
    const app = await createApp(document.getElementById("app")!, client(), new MemoryStorage());
    await app.send(recording.query);
    const details = app.thread.querySelector("details.result-table");
    expect(details).toBeTruthy();
    const cells = Array.from(details!.querySelectorAll("td"), (n) => n.textContent);
    const turnTable = (recording.turn as any).results[0].table;
    expect(cells.length).toBeGreaterThan(0);
    for (const cell of cells) {
      expect(turnTable.rows.flat()).toContain(cell);
    }
  });

  it("shows an optimistic user bubble", async () => {
    const app = await createApp(document.getElementById("app")!, client(), new MemoryStorage());
    await app.send(recording.query);
    const user = app.thread.querySelector(".bubble.user");
    expect(user!.textContent).toBe(recording.query);
  });
});

describe("dataset sidebar", () => {
  it("lists both fixture datasets", async () => {
    await createApp(document.getElementById("app")!, client(), new MemoryStorage());
    const items = Array.from(document.querySelectorAll(".dataset-item"), (n) => n.textContent ?? "");
    expect(items.length).toBe(2);
    expect(items[0]).toContain("ProthomAlo");
    expect(items[1]).toContain("NGORep");
  });

  it("click shows the description and a sample grid", async () => {
    await createApp(document.getElementById("app")!, client(), new MemoryStorage());
    const item = document.querySelector(".dataset-item") as HTMLElement;
    item.click();
    await Promise.resolve();
    const detail = document.querySelector(".dataset-detail")!;
    expect(detail.textContent).toContain("Prothom Alo");
    expect(detail.querySelectorAll(".sample-grid tr").length).toBe(6); // header + 5 sample rows
  });

  it("shows an error state when the service is down", async () => {
    const failing = new ApiClient("http://mock.test", async () => {
      throw new Error("connection refused");
    });
    const sidebar = document.createElement("div");
    const { mountSidebar } = await import("../src/sidebar.js");
    await mountSidebar(sidebar, failing);
    expect(sidebar.querySelector(".sidebar-error")).toBeTruthy();
  });
});

describe("svg sanitizer", () => {
  it("strips scripts and event handlers but keeps text nodes", () => {
    const dirty =
      '<svg xmlns="http://www.w3.org/2000/svg"><script>alert(1)</script>' +
      '<text onclick="alert(2)">2020-01</text></svg>';
    const clean = sanitizeSvg(dirty)!;
    expect(clean.querySelector("script")).toBeNull();
    const text = clean.querySelector("text")!;
    expect(text.getAttribute("onclick")).toBeNull();
    expect(text.textContent).toBe("2020-01");
  });

  it("rejects non-svg payloads", () => {
    expect(sanitizeSvg("<html><body>nope</body></html>")).toBeNull();
  });
});

describe("composer", () => {
  it("send stays disabled for empty input", async () => {
    await createApp(document.getElementById("app")!, client(), new MemoryStorage());
    const button = document.querySelector(".composer button") as HTMLButtonElement;
    const input = document.querySelector(".composer input") as HTMLInputElement;
    expect(button.disabled).toBe(true);
    input.value = "hello";
    input.dispatchEvent(new Event("input"));
    expect(button.disabled).toBe(false);
    input.value = "   ";
    input.dispatchEvent(new Event("input"));
    expect(button.disabled).toBe(true);
  });

  it("a failed send renders a retry affordance that resends", async () => {
    let failures = 0;
    const flaky = mockFetch(recording);
    const api = new ApiClient("http://mock.test", async (input, init) => {
      if (String(input).includes("/messages") && failures === 0) {
        failures += 1;
        throw new Error("network blip");
      }
      return flaky(input, init);
    });
    const app = await createApp(document.getElementById("app")!, api, new MemoryStorage());
    await app.send(recording.query);
    const retry = app.thread.querySelector(".bubble.error .retry") as HTMLButtonElement;
    expect(retry).toBeTruthy();
    retry.click();
    await new Promise((resolve) => setTimeout(resolve, 20));
    expect(app.thread.querySelector("figure.artifact svg")).toBeTruthy();
  });
});
