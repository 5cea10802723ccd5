/* tslint:disable */
/* eslint-disable */

export function bergerSweep(r_min: number, r_max: number, steps: number, samples: number, seed: number): Float64Array;

export function kappa3Heatmap(psi: Float64Array, n: number): Float64Array;

export function pathCurve(psi: Float64Array, steps: number, samples: number, seed: number): Float64Array;

export function projectionPsi(which: string, sign: number): Float64Array;

export function s3ActionPsi(alpha: number, beta: number, l1: number, l2: number, l3: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bergerSweep: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly kappa3Heatmap: (a: number, b: number, c: number) => [number, number, number, number];
    readonly pathCurve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly projectionPsi: (a: number, b: number, c: number) => [number, number, number, number];
    readonly s3ActionPsi: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
