/* tslint:disable */
/* eslint-disable */

/**
 * A Newton map of `p·exp(q)`.
 */
export class Atlas {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Degrees, fixed and critical points, petals and postcritical evidence as JSON.
     */
    classify(budget: number): string;
    degree(): number;
    /**
     * Builds the Newton map from JSON coefficient lists in ascending degree.
     */
    constructor(p: string, q: string);
    /**
     * Fate and the first iterates of the orbit of `re + i·im`, as JSON.
     */
    orbit(re: number, im: number, budget: number): string;
    /**
     * Basin picture of the rectangle centered at `(cx, cy)` as RGBA bytes.
     * A zero budget selects the default.
     */
    render(cx: number, cy: number, w: number, h: number, width: number, height: number, budget: number, rays: boolean, critical: boolean): Uint8Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_atlas_free: (a: number, b: number) => void;
    readonly atlas_classify: (a: number, b: number) => [number, number, number, number];
    readonly atlas_degree: (a: number) => number;
    readonly atlas_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly atlas_orbit: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly atlas_render: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
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
