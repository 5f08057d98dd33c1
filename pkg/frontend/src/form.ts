/**
 * Case form: state and DOM generation driven entirely by the service's
 * model metadata. Features are never hardcoded; retraining the model must
 * not require touching the console.
 */

import type { Encoding, FeatureInfo, WhatIfOverride } from "./api.js";

export interface Completeness {
  complete: boolean;
  missing: string[];
  invalid: string[];
}

/**
 * Per-feature current value, per-feature override (or none), and the
 * selected encoding view. Values are kept as raw input strings; parsing
 * happens when building request bodies.
 */
export class FormState {
  readonly values = new Map<string, string>();
  readonly overrides = new Map<string, string>();
  encoding: Encoding = "paths";

  constructor(readonly features: FeatureInfo[]) {}

  setValue(name: string, raw: string): void {
    this.values.set(name, raw);
  }

  setOverride(name: string, raw: string): void {
    this.overrides.set(name, raw);
  }

  clearOverride(name: string): void {
    this.overrides.delete(name);
  }

  private parse(feature: FeatureInfo, raw: string): number | string | null {
    if (feature.kind === "numeric") {
      if (raw.trim() === "") return null;
      const parsed = Number(raw);
      return Number.isFinite(parsed) ? parsed : null;
    }
    return (feature.categories ?? []).includes(raw) ? raw : null;
  }

  /**
   * The submit gate. Mirrors the service's validation rule exactly: every
   * feature needs a value, numbers must parse finite, categories must be
   * one of the feature's tokens. Submit stays disabled while this reports
   * anything, so no reachable submit is rejected by the service for
   * incompleteness.
   */
  completeness(): Completeness {
    const missing: string[] = [];
    const invalid: string[] = [];
    for (const feature of this.features) {
      const raw = this.values.get(feature.name);
      if (raw === undefined || raw === "") {
        missing.push(feature.name);
      } else if (this.parse(feature, raw) === null) {
        invalid.push(feature.name);
      }
    }
    return { complete: missing.length + invalid.length === 0, missing, invalid };
  }

  /** Typed case body, or null while the form is incomplete. */
  caseBody(): Record<string, number | string> | null {
    if (!this.completeness().complete) return null;
    const body: Record<string, number | string> = {};
    for (const feature of this.features) {
      const parsed = this.parse(feature, this.values.get(feature.name) ?? "");
      if (parsed === null) return null;
      body[feature.name] = parsed;
    }
    return body;
  }

  /** Overrides with set, parseable values, in feature order. */
  overrideList(): WhatIfOverride[] {
    const out: WhatIfOverride[] = [];
    for (const feature of this.features) {
      const raw = this.overrides.get(feature.name);
      if (raw === undefined || raw === "") continue;
      const parsed = this.parse(feature, raw);
      out.push({ feature: feature.name, value: parsed ?? raw });
    }
    return out;
  }
}

export interface FormCallbacks {
  onEdit: () => void;
}

const categoricalSelect = (
  name: string,
  categories: string[],
  className: string,
): HTMLSelectElement => {
  const select = document.createElement("select");
  select.name = name;
  select.className = className;
  const blank = document.createElement("option");
  blank.value = "";
  blank.textContent = "--";
  select.append(blank);
  for (const category of categories) {
    const option = document.createElement("option");
    option.value = category;
    option.textContent = category;
    select.append(option);
  }
  return select;
};

const numericInput = (name: string, className: string): HTMLInputElement => {
  const input = document.createElement("input");
  input.type = "number";
  input.step = "any";
  input.name = name;
  input.className = className;
  return input;
};

/**
 * Build one row per feature: label, value control, override control, and a
 * slot for inline validation messages. Numeric rows are annotated with the
 * model's decision thresholds for that feature.
 */
export function renderCaseForm(
  container: HTMLElement,
  state: FormState,
  callbacks: FormCallbacks,
): void {
  container.textContent = "";
  if (state.features.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent =
      "The loaded model uses no features; there is nothing to enter.";
    container.append(empty);
    return;
  }

  for (const feature of state.features) {
    const row = document.createElement("div");
    row.className = "feature-row";
    row.dataset.feature = feature.name;

    const label = document.createElement("label");
    label.className = "feature-name";
    label.textContent = feature.name;
    label.htmlFor = `value-${feature.name}`;
    row.append(label);

    const value =
      feature.kind === "categorical"
        ? categoricalSelect(feature.name, feature.categories ?? [], "case-value")
        : numericInput(feature.name, "case-value");
    value.id = `value-${feature.name}`;
    value.addEventListener("input", () => {
      state.setValue(feature.name, value.value);
      callbacks.onEdit();
    });
    value.addEventListener("change", () => {
      state.setValue(feature.name, value.value);
      callbacks.onEdit();
    });
    row.append(value);

    const override =
      feature.kind === "categorical"
        ? categoricalSelect(feature.name, feature.categories ?? [], "override-value")
        : numericInput(feature.name, "override-value");
    override.id = `override-${feature.name}`;
    override.title = "what-if override";
    const onOverrideEdit = () => {
      if (override.value === "") state.clearOverride(feature.name);
      else state.setOverride(feature.name, override.value);
      callbacks.onEdit();
    };
    override.addEventListener("input", onOverrideEdit);
    override.addEventListener("change", onOverrideEdit);
    row.append(override);

    if (feature.kind === "numeric" && (feature.thresholds ?? []).length > 0) {
      const note = document.createElement("span");
      note.className = "thresholds";
      note.textContent = `cut points: ${(feature.thresholds ?? []).join(", ")}`;
      row.append(note);
    }

    const error = document.createElement("span");
    error.className = "field-error";
    error.dataset.errorFor = feature.name;
    row.append(error);

    container.append(row);
  }
}

/** Write per-field messages into the rows; unnamed fields go to fallback. */
export function showFieldErrors(
  container: HTMLElement,
  errors: { field: string; message: string }[],
  fallback: (message: string) => void,
): void {
  for (const slot of container.querySelectorAll<HTMLElement>(".field-error")) {
    slot.textContent = "";
  }
  for (const error of errors) {
    const slot = container.querySelector<HTMLElement>(
      `[data-error-for="${error.field}"]`,
    );
    if (slot) slot.textContent = error.message;
    else fallback(`${error.field}: ${error.message}`);
  }
}
