/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_atlas_free: (a: number, b: number) => void;
export const atlas_classify: (a: number, b: number) => [number, number, number, number];
export const atlas_degree: (a: number) => number;
export const atlas_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const atlas_orbit: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const atlas_render: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
