/* tslint:disable */
/* eslint-disable */

/**
 * Gaussian bump on the 2d torus `[-4, 4)^2`, advanced in chunks of `dt`.
 */
export class KsDemo {
    free(): void;
    [Symbol.dispose](): void;
    blown_up(): boolean;
    density(): Float64Array;
    mass(): number;
    max_abs(): number;
    constructor(alpha: number, points: number, amplitude: number);
    points(): number;
    step(steps: number): void;
    time(): number;
}

export function kernel_profile(alpha: number, dim: number, t: number, r_max: number, count: number): Float64Array;

export function luxemburg_step(p: number, q: number, a: number, b: number, cells: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_ksdemo_free: (a: number, b: number) => void;
    readonly kernel_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly ksdemo_blown_up: (a: number) => number;
    readonly ksdemo_density: (a: number) => [number, number];
    readonly ksdemo_mass: (a: number) => number;
    readonly ksdemo_max_abs: (a: number) => number;
    readonly ksdemo_new: (a: number, b: number, c: number) => [number, number, number];
    readonly ksdemo_points: (a: number) => number;
    readonly ksdemo_step: (a: number, b: number) => [number, number];
    readonly ksdemo_time: (a: number) => number;
    readonly luxemburg_step: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
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
