/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_add_point: (a: number, b: number, c: number, d: number) => [number, number];
export const demo_class_count: (a: number) => number;
export const demo_classify: (a: number, b: number, c: number) => [number, number, number, number];
export const demo_clear: (a: number) => void;
export const demo_color: (a: number) => [number, number];
export const demo_load_preset: (a: number, b: number, c: number) => [number, number];
export const demo_new: () => number;
export const demo_render: (a: number, b: number) => [number, number];
export const demo_train: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
