/** Advisor controller: state in, debounced requests out, HTML back.
 *
 * Three control groups map to the three computing endpoints; each keeps a
 * single logical in-flight request, and superseded responses are dropped by
 * the client's id matching, so a slow older answer can never overwrite a
 * newer one.
 */

import {
  AdvisorClient,
  buildCatalogRequest,
  buildRecommendRequest,
  buildSimulateRequest,
  buildSweepRequest,
  catalogIndex,
  debounce,
  type FetchLike,
} from "./api.js";
import { renderAdvisor } from "./render.js";
import type { AdvisorState } from "./state.js";
import { defaultState, stateFromQuery, stateToQuery } from "./state.js";
import type {
  CatalogResponse,
  RecommendResponse,
  SimulateResponse,
  SweepResponse,
} from "./types.js";
import type { AdvisorData } from "./viewmodel.js";

export class AdvisorApp {
  state: AdvisorState;
  data: AdvisorData = {};
  private readonly client: AdvisorClient;
  private readonly renderTo: (html: string) => void;
  private readonly debouncedRefresh: () => void;

  constructor(
    baseUrl: string,
    fetchFn: FetchLike,
    renderTo: (html: string) => void,
    query = "",
    debounceMs = 250,
  ) {
    this.state = query ? stateFromQuery(query) : defaultState();
    this.client = new AdvisorClient(baseUrl, fetchFn);
    this.renderTo = renderTo;
    this.debouncedRefresh = debounce(() => void this.refresh(), debounceMs);
  }

  /** The shareable query string for the current state. */
  queryString(): string {
    return stateToQuery(this.state);
  }

  async start(): Promise<void> {
    const outcome = await this.client.send<CatalogResponse>(
      "catalog",
      buildCatalogRequest(),
    );
    if (outcome.kind === "ok") this.data.catalog = outcome.data;
    else if (outcome.kind === "error") this.data.banner = outcome.error;
    this.render();
    await this.refresh();
  }

  /** Apply a state patch; requests fire on the trailing debounce edge. */
  update(patch: Partial<AdvisorState>): void {
    this.state = { ...this.state, ...patch };
    this.render();
    this.debouncedRefresh();
  }

  async refresh(): Promise<void> {
    const catalog = catalogIndex(this.data.catalog?.entries ?? []);
    this.data.banner = undefined;

    const sweepP = this.client.send<SweepResponse>(
      "sweep",
      buildSweepRequest(this.state, catalog),
    );
    const simulateP = this.client.send<SimulateResponse>(
      "simulate",
      buildSimulateRequest(this.state),
    );
    const recommendP = this.client.send<RecommendResponse>(
      "recommend",
      buildRecommendRequest(this.state),
    );

    const sweep = await sweepP;
    if (sweep.kind === "ok") this.data.sweep = sweep.data;
    else if (sweep.kind === "error") this.data.banner = sweep.error;

    const simulate = await simulateP;
    if (simulate.kind === "ok") this.data.simulate = simulate.data;
    else if (simulate.kind === "error") this.data.banner = simulate.error;

    const recommend = await recommendP;
    if (recommend.kind === "ok") {
      this.data.recommend = recommend.data;
      this.data.recommendError = undefined;
    } else if (recommend.kind === "error") {
      if (recommend.error.code === "infeasible") {
        this.data.recommend = undefined;
        this.data.recommendError = recommend.error;
      } else {
        this.data.banner = recommend.error;
      }
    }

    this.render();
  }

  render(): void {
    this.renderTo(renderAdvisor(this.state, this.data));
  }
}
