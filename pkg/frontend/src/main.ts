/** Browser entry point: mounts the advisor and keeps the URL shareable. */

import { AdvisorApp } from "./app.js";
import type { AdvisorState, PriorInput } from "./state.js";

function parsePrior(text: string): PriorInput | null {
  const t = text.trim();
  if (t === "") return null;
  const sep = t.indexOf(":");
  const tag = sep < 0 ? "point" : t.slice(0, sep);
  const rest = sep < 0 ? t : t.slice(sep + 1);
  if (tag === "point") return { kind: "point", value: Number(rest) };
  const [a, b] = rest.split(",").map(Number);
  if (tag === "beta") return { kind: "beta", alpha: a ?? 0, beta: b ?? 0 };
  return { kind: "ci95", lo: a ?? 0, hi: b ?? 0 };
}

function patchFromForm(form: HTMLFormElement): Partial<AdvisorState> {
  const f = new FormData(form);
  const text = (name: string) => String(f.get(name) ?? "");
  const num = (name: string) => Number(text(name));
  const numOrNull = (name: string) => (text(name).trim() === "" ? null : num(name));
  const prev = text("prev");
  const trans = text("trans");
  return {
    prevalenceName: prev === "" ? null : prev,
    transmissionName: trans === "" ? null : trans,
    pi: parsePrior(text("pi")),
    tau: parsePrior(text("tau")),
    nLo: num("nLo"),
    nHi: num("nHi"),
    setting: text("setting") as AdvisorState["setting"],
    replicates: num("replicates"),
    seed: numOrNull("seed"),
    curveKind: text("curveKind") as AdvisorState["curveKind"],
    lod: num("lod"),
    curveWidth: numOrNull("curveWidth"),
    tailFraction: num("tailFraction"),
    draws: num("draws"),
    minSensitivity: numOrNull("minSensitivity"),
    minPassRate: numOrNull("minPassRate"),
    objective: text("objective") as AdvisorState["objective"],
    fdaThreshold: num("fdaThreshold"),
  };
}

export function mount(root: HTMLElement, baseUrl = ""): AdvisorApp {
  const app = new AdvisorApp(
    baseUrl,
    (url, init) => fetch(url, init),
    (html) => {
      root.innerHTML = html;
    },
    window.location.search.replace(/^\?/, ""),
  );
  root.addEventListener("change", (ev) => {
    const form = (ev.target as HTMLElement).closest("form");
    if (!(form instanceof HTMLFormElement)) return;
    app.update(patchFromForm(form));
    const query = app.queryString();
    window.history.replaceState(null, "", query ? `?${query}` : window.location.pathname);
  });
  void app.start();
  return app;
}

const rootEl = typeof document !== "undefined" ? document.getElementById("advisor") : null;
if (rootEl) mount(rootEl);
