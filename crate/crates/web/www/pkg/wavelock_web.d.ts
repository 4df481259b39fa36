/* tslint:disable */
/* eslint-disable */

export class DriftView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    closed_adev(): Float64Array;
    closed_pm(): Float64Array;
    open_adev(): Float64Array;
    /**
     * Measured deviation from the degenerate wavelength, pm.
     */
    open_pm(): Float64Array;
    taus_s(): Float64Array;
    times_h(): Float64Array;
    readonly closed_p2p_pm: number;
    readonly closed_sd_pm: number;
    readonly open_p2p_pm: number;
    readonly open_sd_pm: number;
}

export class HistogramView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Counts per display bin.
     */
    counts(): Float64Array;
    /**
     * Fitted model on the same display bins.
     */
    model(): Float64Array;
    readonly bin_width_ps: number;
    readonly start_ps: number;
    readonly tau0_ps: number;
    readonly tau0_stderr_ps: number;
    readonly true_tau0_ps: number;
    readonly width_ps: number;
}

export class StepView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * 1 where the cycle fell inside the deadband.
     */
    gated(): Uint8Array;
    /**
     * Offset of the SPDC temperature from nominal after each cycle, degC.
     */
    residual_c(): Float64Array;
    setpoint_c(): Float64Array;
    readonly deadband_c: number;
}

export function drift(hours: number, seed: number, kp: number, ki: number, kd: number, tau_th_ps: number): DriftView;

export function histogram(lambda_nm: number, pair_rate_hz: number, integration_s: number, seed: number, rebin: number): HistogramView;

export function stepResponse(step_c: number, kp: number, ki: number, kd: number, tau_th_ps: number, cycles: number): StepView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_driftview_free: (a: number, b: number) => void;
    readonly __wbg_histogramview_free: (a: number, b: number) => void;
    readonly __wbg_stepview_free: (a: number, b: number) => void;
    readonly drift: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly driftview_closed_adev: (a: number) => [number, number];
    readonly driftview_closed_p2p_pm: (a: number) => number;
    readonly driftview_closed_pm: (a: number) => [number, number];
    readonly driftview_closed_sd_pm: (a: number) => number;
    readonly driftview_open_adev: (a: number) => [number, number];
    readonly driftview_open_p2p_pm: (a: number) => number;
    readonly driftview_open_pm: (a: number) => [number, number];
    readonly driftview_open_sd_pm: (a: number) => number;
    readonly driftview_taus_s: (a: number) => [number, number];
    readonly driftview_times_h: (a: number) => [number, number];
    readonly histogram: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly histogramview_bin_width_ps: (a: number) => number;
    readonly histogramview_counts: (a: number) => [number, number];
    readonly histogramview_model: (a: number) => [number, number];
    readonly histogramview_start_ps: (a: number) => number;
    readonly histogramview_tau0_ps: (a: number) => number;
    readonly histogramview_tau0_stderr_ps: (a: number) => number;
    readonly histogramview_true_tau0_ps: (a: number) => number;
    readonly histogramview_width_ps: (a: number) => number;
    readonly stepResponse: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly stepview_deadband_c: (a: number) => number;
    readonly stepview_gated: (a: number) => [number, number];
    readonly stepview_residual_c: (a: number) => [number, number];
    readonly stepview_setpoint_c: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
