/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Add a point to `class`; the model is dropped since it no longer fits.
     */
    add_point(_class: number, x: number, y: number): void;
    /**
     * Number of class slots the page offers.
     */
    class_count(): number;
    /**
     * Scores and decision at a point, as JSON. The label is a class slot;
     * scores follow the trained classes in slot order.
     */
    classify(x: number, y: number): string;
    clear(): void;
    static color(_class: number): string;
    /**
     * Replace the points by a preset: `triangle` or `clusters`.
     */
    load_preset(name: string): void;
    constructor();
    /**
     * SVG of the window: regions when a model exists, then the points.
     */
    render(resolution: number): string;
    /**
     * Train on the non-empty classes. `kind` is `simple` or `tsvm`; a
     * positive `soft_margin` selects the soft variant. Returns a JSON summary.
     */
    train(kind: string, soft_margin?: number | null): string;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_add_point: (a: number, b: number, c: number, d: number) => [number, number];
    readonly demo_class_count: (a: number) => number;
    readonly demo_classify: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_clear: (a: number) => void;
    readonly demo_color: (a: number) => [number, number];
    readonly demo_load_preset: (a: number, b: number, c: number) => [number, number];
    readonly demo_new: () => number;
    readonly demo_render: (a: number, b: number) => [number, number];
    readonly demo_train: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
