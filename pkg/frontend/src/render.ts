/** DOM builders for the conversation thread. The UI renders only what the
 * service sent: explanation text, result tables, and fetched artifacts. */

import { ApiClient, ResultDoc, TableDoc, TurnDoc } from "./api.js";
import { sanitizeSvg } from "./sanitize.js";

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

export function userBubble(text: string): HTMLElement {
  const bubble = el("div", "bubble user");
  bubble.appendChild(el("div", "text", text));
  return bubble;
}

export function pendingBubble(): HTMLElement {
  const bubble = el("div", "bubble response pending");
  bubble.appendChild(el("div", "text", "thinking..."));
  return bubble;
}

export function errorBubble(message: string, onRetry?: () => void): HTMLElement {
  const bubble = el("div", "bubble response error");
  bubble.appendChild(el("div", "text", message));
  if (onRetry) {
    const retry = el("button", "retry", "retry");
    retry.addEventListener("click", onRetry);
    bubble.appendChild(retry);
  }
  return bubble;
}

export function tableGrid(table: TableDoc): HTMLElement {
  const details = el("details", "result-table");
  const summary = el("summary", undefined, `${table.name} (${table.rows.length} rows)`);
  details.appendChild(summary);
  const grid = el("table");
  const head = el("tr");
  for (const column of table.columns) head.appendChild(el("th", undefined, column.name));
  grid.appendChild(head);
  for (const row of table.rows.slice(0, 50)) {
    const tr = el("tr");
    for (const cell of row) tr.appendChild(el("td", undefined, cell));
    grid.appendChild(tr);
  }
  details.appendChild(grid);
  return details;
}

function resultBlocks(results: ResultDoc[]): HTMLElement[] {
  const blocks: HTMLElement[] = [];
  for (const result of results) {
    if (result.table) blocks.push(tableGrid(result.table));
    for (const warning of result.warnings ?? []) {
      blocks.push(el("div", "warning", warning));
    }
  }
  return blocks;
}

/** Build the response bubble for a turn; artifacts stream in as they load. */
export async function turnBubble(turn: TurnDoc, client: ApiClient): Promise<HTMLElement> {
  const bubble = el("div", turn.error ? "bubble response error" : "bubble response");
  for (const line of turn.explanation.split("\n")) {
    if (line.trim()) bubble.appendChild(el("p", "text", line));
  }
  for (const block of resultBlocks(turn.results)) bubble.appendChild(block);
  for (const ref of turn.artifacts) {
    const holder = el("figure", `artifact ${ref.kind}`);
    bubble.appendChild(holder);
    try {
      const svg = sanitizeSvg(await client.artifact(ref.id));
      if (svg) holder.appendChild(svg);
      else holder.appendChild(el("div", "warning", "artifact was not valid SVG"));
    } catch (error) {
      holder.appendChild(el("div", "warning", `artifact failed to load: ${String(error)}`));
    }
  }
  return bubble;
}
