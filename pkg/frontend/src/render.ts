/** String renderer for the advisor view.
 *
 * Output is plain HTML with inline SVG charts.  Control values appear only
 * in attributes; visible text numbers all come from the view-model layer,
 * which reads them out of service responses.
 */

import type { AdvisorState } from "./state.js";
import type { AdvisorData } from "./viewmodel.js";
import {
  chartViewModels,
  fitSummary,
  fmtNum,
  recommendationViewModel,
  tableViewModel,
} from "./viewmodel.js";
import { renderChart } from "./charts.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function attr(value: string | number | null): string {
  return value === null ? "" : esc(String(value));
}

function option(value: string, label: string, selected: boolean): string {
  return `<option value="${esc(value)}"${selected ? " selected" : ""}>${esc(label)}</option>`;
}

function priorText(p: AdvisorState["pi"]): string {
  if (p === null) return "";
  switch (p.kind) {
    case "point":
      return `point:${p.value}`;
    case "beta":
      return `beta:${p.alpha},${p.beta}`;
    case "ci95":
      return `ci:${p.lo},${p.hi}`;
  }
}

function renderControls(state: AdvisorState, data: AdvisorData): string {
  const entries = data.catalog?.entries ?? [];
  const prev = entries.filter((e) => e.parameter === "prevalence");
  const trans = entries.filter((e) => e.parameter === "transmission");
  const parts: string[] = ['<form class="controls">'];

  parts.push('<fieldset class="group-scenario"><legend>Scenario</legend>');
  parts.push('<select name="prev">');
  parts.push(option("", "custom prevalence prior", state.prevalenceName === null));
  for (const e of prev) parts.push(option(e.name, e.name, e.name === state.prevalenceName));
  parts.push("</select>");
  parts.push('<select name="trans">');
  parts.push(option("", "custom transmission prior", state.transmissionName === null));
  for (const e of trans) parts.push(option(e.name, e.name, e.name === state.transmissionName));
  parts.push("</select>");
  parts.push(
    `<input name="pi" placeholder="prevalence prior" value="${attr(priorText(state.pi))}">`,
  );
  parts.push(
    `<input name="tau" placeholder="transmission prior" value="${attr(priorText(state.tau))}">`,
  );
  parts.push("</fieldset>");

  parts.push('<fieldset class="group-range"><legend>Pool sizes and setting</legend>');
  parts.push(`<input name="nLo" type="number" value="${attr(state.nLo)}">`);
  parts.push(`<input name="nHi" type="number" value="${attr(state.nHi)}">`);
  parts.push('<select name="setting">');
  for (const s of ["fixed", "tau_graph", "pi_graph", "all_graph"] as const) {
    parts.push(option(s, s.replace("_", " "), state.setting === s));
  }
  parts.push("</select>");
  parts.push(`<input name="replicates" type="number" value="${attr(state.replicates)}">`);
  parts.push(`<input name="seed" type="number" value="${attr(state.seed)}">`);
  parts.push("</fieldset>");

  parts.push('<fieldset class="group-assay"><legend>Assay</legend>');
  parts.push('<select name="curveKind">');
  parts.push(option("step", "step detection", state.curveKind === "step"));
  parts.push(option("logistic", "logistic detection", state.curveKind === "logistic"));
  parts.push("</select>");
  parts.push(`<input name="lod" value="${attr(state.lod)}">`);
  parts.push(`<input name="curveWidth" value="${attr(state.curveWidth)}">`);
  parts.push(`<input name="tailFraction" value="${attr(state.tailFraction)}">`);
  parts.push(`<input name="draws" type="number" value="${attr(state.draws)}">`);
  parts.push("</fieldset>");

  parts.push('<fieldset class="group-constraints"><legend>Constraints</legend>');
  parts.push(`<input name="minSensitivity" value="${attr(state.minSensitivity)}">`);
  parts.push(`<input name="minPassRate" value="${attr(state.minPassRate)}">`);
  parts.push('<select name="objective">');
  parts.push(option("min_tests", "fewest tests", state.objective === "min_tests"));
  parts.push(option("max_savings", "greatest savings", state.objective === "max_savings"));
  parts.push("</select>");
  parts.push(`<input name="fdaThreshold" value="${attr(state.fdaThreshold)}">`);
  parts.push("</fieldset>");

  parts.push("</form>");
  return parts.join("");
}

export function renderAdvisor(state: AdvisorState, data: AdvisorData): string {
  const parts: string[] = ['<div class="advisor">'];
  parts.push(renderControls(state, data));

  if (data.banner) {
    parts.push(
      `<div class="banner" role="alert">${esc(data.banner.message)}</div>`,
    );
  }

  const scenarioName = data.simulate?.scenario.name ?? data.recommend?.result.scenario.name;
  const seed = data.sweep?.seed ?? data.simulate?.seed ?? data.recommend?.seed;
  if (scenarioName !== undefined || seed !== undefined) {
    parts.push('<section class="summary">');
    if (scenarioName !== undefined) {
      parts.push(`<span class="scenario-name">${esc(scenarioName)}</span>`);
    }
    if (seed !== undefined) {
      parts.push(`<span class="seed">master seed ${fmtNum(seed)}</span>`);
    }
    parts.push("</section>");
  }

  const charts = chartViewModels(data);
  if (charts.length > 0) {
    parts.push('<section class="charts">');
    for (const vm of charts) parts.push(renderChart(vm));
    parts.push("</section>");
  }

  const rec = recommendationViewModel(data);
  if (rec) {
    parts.push(
      `<section class="recommendation ${rec.feasible ? "feasible" : "infeasible"}">`,
    );
    parts.push(`<h2>${esc(rec.headline)}</h2>`);
    if (rec.details.length > 0) {
      parts.push("<ul>");
      for (const line of rec.details) parts.push(`<li>${esc(line)}</li>`);
      parts.push("</ul>");
    }
    parts.push(
      `<p class="binding">binding constraint: ` +
        `<span class="binding-name">${esc(rec.bindingLabel)}</span></p>`,
    );
    parts.push("</section>");
  }

  if (data.fit) {
    parts.push(`<p class="fit-summary">${esc(fitSummary(data.fit))}</p>`);
  }

  const table = tableViewModel(data);
  if (table) {
    parts.push('<details class="data-table" open><summary>Data table</summary>');
    parts.push("<table><thead><tr>");
    for (const h of table.header) parts.push(`<th>${esc(h)}</th>`);
    parts.push("</tr></thead><tbody>");
    for (const row of table.rows) {
      parts.push(`<tr><td>${esc(row.n)}</td>`);
      for (const cell of row.cells) parts.push(`<td>${esc(cell)}</td>`);
      parts.push("</tr>");
    }
    parts.push("</tbody></table></details>");
  }

  parts.push("</div>");
  return parts.join("");
}
