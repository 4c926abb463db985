/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_rocview_free: (a: number, b: number) => void;
export const __wbg_walkview_free: (a: number, b: number) => void;
export const evaluate_cohort: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const rocview_auc: (a: number) => number;
export const rocview_bracs: (a: number) => [number, number];
export const rocview_fpr: (a: number) => [number, number];
export const rocview_fpr_at_tpr1: (a: number) => number;
export const rocview_scores: (a: number) => [number, number];
export const rocview_tpr: (a: number) => [number, number];
export const simulate_walk: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const walkview_after: (a: number) => [number, number];
export const walkview_before: (a: number) => [number, number];
export const walkview_freqs: (a: number) => [number, number];
export const walkview_peak_after: (a: number) => number;
export const walkview_peak_before: (a: number) => number;
export const walkview_spectrum_after: (a: number) => [number, number];
export const walkview_spectrum_before: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
