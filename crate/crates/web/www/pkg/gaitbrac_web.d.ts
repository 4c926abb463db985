/* tslint:disable */
/* eslint-disable */

/**
 * Pooled leave-one-subject-out result on a synthetic cohort.
 */
export class RocView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly auc: number;
    readonly bracs: Float64Array;
    readonly fpr: Float64Array;
    readonly fpr_at_tpr1: number;
    readonly scores: Float64Array;
    readonly tpr: Float64Array;
}

/**
 * Preprocessed vertical acceleration of one device before and after
 * drinking, with one-sided magnitude spectra.
 */
export class WalkView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly after: Float64Array;
    readonly before: Float64Array;
    readonly freqs: Float64Array;
    readonly peak_after: number;
    readonly peak_before: number;
    readonly spectrum_after: Float64Array;
    readonly spectrum_before: Float64Array;
}

export function evaluate_cohort(n_subjects: number, seed: number, threshold: number, model: string, devices: string): RocView;

export function simulate_walk(cadence_hz: number, brac: number, seed: number, device: string): WalkView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_rocview_free: (a: number, b: number) => void;
    readonly __wbg_walkview_free: (a: number, b: number) => void;
    readonly evaluate_cohort: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly rocview_auc: (a: number) => number;
    readonly rocview_bracs: (a: number) => [number, number];
    readonly rocview_fpr: (a: number) => [number, number];
    readonly rocview_fpr_at_tpr1: (a: number) => number;
    readonly rocview_scores: (a: number) => [number, number];
    readonly rocview_tpr: (a: number) => [number, number];
    readonly simulate_walk: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly walkview_after: (a: number) => [number, number];
    readonly walkview_before: (a: number) => [number, number];
    readonly walkview_freqs: (a: number) => [number, number];
    readonly walkview_peak_after: (a: number) => number;
    readonly walkview_peak_before: (a: number) => number;
    readonly walkview_spectrum_after: (a: number) => [number, number];
    readonly walkview_spectrum_before: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
