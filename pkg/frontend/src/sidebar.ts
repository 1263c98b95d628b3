/** Dataset browser: names on the left, description and sample rows on click. */

import { ApiClient, DatasetDoc } from "./api.js";

export async function mountSidebar(root: HTMLElement, client: ApiClient): Promise<void> {
  root.textContent = "";
  const list = document.createElement("ul");
  list.className = "dataset-list";
  const detail = document.createElement("div");
  detail.className = "dataset-detail";

  let datasets: DatasetDoc[];
  try {
    datasets = await client.datasets();
  } catch (error) {
    const failure = document.createElement("div");
    failure.className = "sidebar-error";
    failure.textContent = `datasets unavailable: ${String(error)}`;
    root.appendChild(failure);
    return;
  }

  if (datasets.length === 0) {
    const empty = document.createElement("div");
    empty.className = "sidebar-empty";
    empty.textContent = "no datasets registered";
    root.appendChild(empty);
    return;
  }

  for (const dataset of datasets) {
    const item = document.createElement("li");
    item.className = "dataset-item";
    item.textContent = `${dataset.name} (${dataset.rows} rows)`;
    item.addEventListener("click", () => showDetail(detail, dataset));
    list.appendChild(item);
  }
  root.appendChild(list);
  root.appendChild(detail);
}

function showDetail(root: HTMLElement, dataset: DatasetDoc): void {
  root.textContent = "";
  const title = document.createElement("h3");
  title.textContent = dataset.name;
  const description = document.createElement("p");
  description.textContent = dataset.description;
  root.appendChild(title);
  root.appendChild(description);

  const grid = document.createElement("table");
  grid.className = "sample-grid";
  const head = document.createElement("tr");
  for (const column of dataset.schema) {
    const th = document.createElement("th");
    th.textContent = column.name;
    head.appendChild(th);
  }
  grid.appendChild(head);
  for (const row of dataset.sample) {
    const tr = document.createElement("tr");
    for (const cell of row) {
      const td = document.createElement("td");
      td.textContent = cell;
      tr.appendChild(td);
    }
    grid.appendChild(tr);
  }
  root.appendChild(grid);
}
