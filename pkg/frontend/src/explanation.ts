/**
 * Explanation views: the service's rendered text shown verbatim in a
 * monospace pane, and the JSON explanation trees as a collapsible outline.
 */

import type { ExplainResponse, ExplanationNode } from "./api.js";

const treeNode = (node: ExplanationNode): HTMLElement => {
  if (node.children.length === 0) {
    const leaf = document.createElement("div");
    leaf.className = "tree-leaf";
    leaf.textContent = node.label;
    return leaf;
  }
  const details = document.createElement("details");
  details.open = true;
  details.className = "tree-branch";
  const summary = document.createElement("summary");
  summary.textContent = node.label;
  details.append(summary);
  for (const child of node.children) {
    details.append(treeNode(child));
  }
  return details;
};

export function renderExplanation(
  asciiPane: HTMLElement,
  treePane: HTMLElement,
  predictionSlot: HTMLElement,
  response: ExplainResponse,
): void {
  predictionSlot.textContent = response.prediction;
  // textContent, not innerHTML: the text must stay byte-identical
  asciiPane.textContent = response.rendered;
  treePane.textContent = "";
  for (const explanation of response.explanations) {
    treePane.append(treeNode(explanation));
  }
}

export function clearExplanation(
  asciiPane: HTMLElement,
  treePane: HTMLElement,
  predictionSlot: HTMLElement,
): void {
  predictionSlot.textContent = "";
  asciiPane.textContent = "";
  treePane.textContent = "";
}
