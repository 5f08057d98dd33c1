/**
 * What-if comparison table: one row per override with a changed/unchanged
 * badge; selecting a row loads that item's explanation.
 */

import type { WhatIfItem } from "./api.js";

export function renderWhatIfTable(
  container: HTMLElement,
  items: WhatIfItem[],
  onSelect: (item: WhatIfItem) => void,
): void {
  container.textContent = "";
  if (items.length === 0) {
    const note = document.createElement("p");
    note.className = "empty-state";
    note.textContent = "No overrides set.";
    container.append(note);
    return;
  }

  const table = document.createElement("table");
  table.className = "whatif-table";
  const head = document.createElement("tr");
  for (const title of ["feature", "value", "prediction", "effect"]) {
    const th = document.createElement("th");
    th.textContent = title;
    head.append(th);
  }
  table.append(head);

  for (const item of items) {
    const row = document.createElement("tr");
    row.className = "whatif-row";
    row.dataset.feature = item.override.feature;

    const feature = document.createElement("td");
    feature.textContent = item.override.feature;
    const value = document.createElement("td");
    value.textContent = String(item.override.value);
    const prediction = document.createElement("td");
    prediction.textContent = item.prediction;

    const effect = document.createElement("td");
    const badge = document.createElement("span");
    badge.className = item.changed ? "badge changed" : "badge unchanged";
    badge.textContent = item.changed ? "changed" : "unchanged";
    effect.append(badge);

    row.append(feature, value, prediction, effect);
    row.addEventListener("click", () => onSelect(item));
    table.append(row);
  }
  container.append(table);
}
