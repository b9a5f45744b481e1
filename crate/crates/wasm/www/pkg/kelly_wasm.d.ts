/* tslint:disable */
/* eslint-disable */

export function regimePoints(p: number): Float64Array;

export function samplePaths(p: number, stake: number, trials: number, paths: number, seed: number, w0: number): Float64Array;

export function tradeoffCurves(p: number, f: number, trials: number, w0: number, steps: number): Float64Array;

export function utilityCurve(p: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly regimePoints: (a: number) => [number, number, number, number];
    readonly samplePaths: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly tradeoffCurves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly utilityCurve: (a: number, b: number) => [number, number, number, number];
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
