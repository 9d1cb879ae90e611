export { AdvisorApp } from "./app.js";
export {
  AdvisorClient,
  buildCatalogRequest,
  buildFitBetaRequest,
  buildRecommendRequest,
  buildSimulateRequest,
  buildSweepRequest,
  catalogIndex,
  debounce,
} from "./api.js";
export type { ApiOutcome, ApiRequest, CatalogIndex, FetchLike } from "./api.js";
export { DEFAULT_GEOMETRY, renderChart, xScale, yScale } from "./charts.js";
export type { ChartGeometry } from "./charts.js";
export { renderAdvisor } from "./render.js";
export {
  SERVICE_DEFAULTS,
  defaultState,
  stateFromQuery,
  stateToQuery,
} from "./state.js";
export type { AdvisorState, Objective, PriorInput, SettingKind } from "./state.js";
export * from "./types.js";
export {
  bindingLabel,
  chartViewModels,
  fitSummary,
  fmtNum,
  recommendationViewModel,
  tableViewModel,
} from "./viewmodel.js";
export type {
  AdvisorData,
  BandPoint,
  ChartVM,
  GuideLine,
  RecommendationVM,
  SeriesPoint,
  TableVM,
} from "./viewmodel.js";
