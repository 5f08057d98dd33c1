/**
 * Console wiring: load model metadata, generate the form, gate submission,
 * fetch explanations and what-if comparisons, and keep exactly one request
 * in flight (editing the form cancels a stale one).
 */

import {
  Encoding,
  ExplainResponse,
  ModelInfo,
  ServiceClient,
  ServiceError,
  WhatIfItem,
} from "./api.js";
import { FormState, renderCaseForm, showFieldErrors } from "./form.js";
import { clearExplanation, renderExplanation } from "./explanation.js";
import { renderWhatIfTable } from "./whatif.js";

const isAbort = (error: unknown): boolean =>
  error instanceof DOMException && error.name === "AbortError";

export class App {
  model: ModelInfo | null = null;
  state: FormState = new FormState([]);

  readonly banner: HTMLElement;
  readonly form: HTMLElement;
  readonly submitButton: HTMLButtonElement;
  readonly whatIfButton: HTMLButtonElement;
  readonly encodingInputs: HTMLInputElement[] = [];
  readonly predictionSlot: HTMLElement;
  readonly asciiPane: HTMLElement;
  readonly treePane: HTMLElement;
  readonly whatIfPane: HTMLElement;
  readonly messages: HTMLElement;

  private inflight: AbortController | null = null;
  private shownCase: Record<string, number | string> | null = null;
  private shownWhatIf = false;

  constructor(
    readonly root: HTMLElement,
    readonly client: ServiceClient,
  ) {
    root.textContent = "";
    this.banner = this.section("banner");
    this.form = this.section("case-form");

    const controls = this.section("controls");
    this.submitButton = document.createElement("button");
    this.submitButton.id = "submit";
    this.submitButton.textContent = "explain";
    this.submitButton.disabled = true;
    this.submitButton.addEventListener("click", () => void this.submit());
    controls.append(this.submitButton);

    this.whatIfButton = document.createElement("button");
    this.whatIfButton.id = "run-whatif";
    this.whatIfButton.textContent = "run what-if";
    this.whatIfButton.disabled = true;
    this.whatIfButton.addEventListener("click", () => void this.runWhatIf());
    controls.append(this.whatIfButton);

    for (const [encoding, title] of [
      ["paths", "flat"],
      ["nodes", "cascade"],
    ] as [Encoding, string][]) {
      const label = document.createElement("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = "encoding";
      radio.value = encoding;
      radio.checked = encoding === "paths";
      radio.addEventListener("change", () => void this.setEncoding(encoding));
      label.append(radio, document.createTextNode(` ${title}`));
      controls.append(label);
      this.encodingInputs.push(radio);
    }

    this.predictionSlot = this.section("prediction");
    this.asciiPane = document.createElement("pre");
    this.asciiPane.id = "ascii-pane";
    root.append(this.asciiPane);
    this.treePane = this.section("tree-pane");
    this.whatIfPane = this.section("whatif-pane");
    this.messages = this.section("messages");
  }

  private section(id: string): HTMLElement {
    const el = document.createElement("div");
    el.id = id;
    this.root.append(el);
    return el;
  }

  /** Fetch /model and build the form; on failure show a retry banner. */
  async start(): Promise<void> {
    this.banner.textContent = "";
    try {
      this.model = await this.client.getModel();
    } catch (error) {
      const note = document.createElement("span");
      note.className = "banner-error";
      note.textContent =
        error instanceof ServiceError
          ? `service error: ${error.message}`
          : "service unreachable";
      const retry = document.createElement("button");
      retry.id = "retry";
      retry.textContent = "retry";
      retry.addEventListener("click", () => void this.start());
      this.banner.append(note, retry);
      return;
    }
    this.state = new FormState(this.model.features);
    renderCaseForm(this.form, this.state, { onEdit: () => this.onEdit() });
    this.refreshGate();
  }

  /** Called on every form edit: cancel stale requests, re-check the gate. */
  onEdit(): void {
    this.abortInflight();
    this.refreshGate();
  }

  private refreshGate(): void {
    const complete = this.state.completeness().complete;
    this.submitButton.disabled = !complete;
    this.whatIfButton.disabled = !complete;
  }

  private abortInflight(): void {
    if (this.inflight !== null) {
      this.inflight.abort();
      this.inflight = null;
    }
  }

  private beginRequest(): AbortController {
    this.abortInflight();
    this.messages.textContent = "";
    showFieldErrors(this.form, [], () => undefined);
    this.inflight = new AbortController();
    return this.inflight;
  }

  private showError(error: unknown): void {
    if (isAbort(error)) return;
    if (error instanceof ServiceError && error.fieldErrors.length > 0) {
      showFieldErrors(this.form, error.fieldErrors, (message) => {
        const line = document.createElement("div");
        line.className = "message-error";
        line.textContent = message;
        this.messages.append(line);
      });
      return;
    }
    const line = document.createElement("div");
    line.className = "message-error";
    line.textContent =
      error instanceof Error ? error.message : "request failed";
    this.messages.append(line);
  }

  /** Explain the base case with the selected encoding. */
  async submit(): Promise<void> {
    const body = this.state.caseBody();
    if (body === null) return;
    const controller = this.beginRequest();
    let response: ExplainResponse;
    try {
      response = await this.client.explain(
        { case: body, encoding: this.state.encoding },
        controller.signal,
      );
    } catch (error) {
      this.showError(error);
      return;
    }
    if (controller.signal.aborted) return;
    this.shownCase = body;
    renderExplanation(
      this.asciiPane,
      this.treePane,
      this.predictionSlot,
      response,
    );
  }

  /** Compare every set override against the base case. */
  async runWhatIf(): Promise<void> {
    const body = this.state.caseBody();
    if (body === null) return;
    const controller = this.beginRequest();
    let items: WhatIfItem[];
    try {
      items = await this.client.whatIf(
        {
          case: body,
          overrides: this.state.overrideList(),
          encoding: this.state.encoding,
        },
        controller.signal,
      );
    } catch (error) {
      this.showError(error);
      return;
    }
    if (controller.signal.aborted) return;
    this.shownWhatIf = true;
    renderWhatIfTable(this.whatIfPane, items, (item) => {
      renderExplanation(this.asciiPane, this.treePane, this.predictionSlot, {
        prediction: item.prediction,
        explanations: item.explanations,
        rendered: item.rendered,
      });
    });
  }

  /** Switch views and re-request whatever is on screen. */
  async setEncoding(encoding: Encoding): Promise<void> {
    if (this.state.encoding === encoding) return;
    this.state.encoding = encoding;
    for (const radio of this.encodingInputs) {
      radio.checked = radio.value === encoding;
    }
    if (this.shownCase !== null) await this.submit();
    if (this.shownWhatIf) await this.runWhatIf();
  }

  clear(): void {
    this.shownCase = null;
    this.shownWhatIf = false;
    clearExplanation(this.asciiPane, this.treePane, this.predictionSlot);
  }
}
