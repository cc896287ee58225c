/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_ksdemo_free: (a: number, b: number) => void;
export const kernel_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const ksdemo_blown_up: (a: number) => number;
export const ksdemo_density: (a: number) => [number, number];
export const ksdemo_mass: (a: number) => number;
export const ksdemo_max_abs: (a: number) => number;
export const ksdemo_new: (a: number, b: number, c: number) => [number, number, number];
export const ksdemo_points: (a: number) => number;
export const ksdemo_step: (a: number, b: number) => [number, number];
export const ksdemo_time: (a: number) => number;
export const luxemburg_step: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
