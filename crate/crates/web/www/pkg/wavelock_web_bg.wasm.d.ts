/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_driftview_free: (a: number, b: number) => void;
export const __wbg_histogramview_free: (a: number, b: number) => void;
export const __wbg_stepview_free: (a: number, b: number) => void;
export const drift: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const driftview_closed_adev: (a: number) => [number, number];
export const driftview_closed_p2p_pm: (a: number) => number;
export const driftview_closed_pm: (a: number) => [number, number];
export const driftview_closed_sd_pm: (a: number) => number;
export const driftview_open_adev: (a: number) => [number, number];
export const driftview_open_p2p_pm: (a: number) => number;
export const driftview_open_pm: (a: number) => [number, number];
export const driftview_open_sd_pm: (a: number) => number;
export const driftview_taus_s: (a: number) => [number, number];
export const driftview_times_h: (a: number) => [number, number];
export const histogram: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const histogramview_bin_width_ps: (a: number) => number;
export const histogramview_counts: (a: number) => [number, number];
export const histogramview_model: (a: number) => [number, number];
export const histogramview_start_ps: (a: number) => number;
export const histogramview_tau0_ps: (a: number) => number;
export const histogramview_tau0_stderr_ps: (a: number) => number;
export const histogramview_true_tau0_ps: (a: number) => number;
export const histogramview_width_ps: (a: number) => number;
export const stepResponse: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const stepview_deadband_c: (a: number) => number;
export const stepview_gated: (a: number) => [number, number];
export const stepview_residual_c: (a: number) => [number, number];
export const stepview_setpoint_c: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
